#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "biaslearn/net.hpp"
#include "biaslearn/rng.hpp"
#include "biaslearn/sample.hpp"

namespace biaslearn::env {

enum class LabelSpace { UnitInterval, Sign };
enum class LossId { Squared, Discrete };

struct SupportAtom {
  Eigen::VectorXd x;
  double y = 0.0;
  double p = 0.0;
};

// A learning task: a sampleable distribution on X x Y, either with explicit
// finite support or in shared-feature generative form (inputs uniform on
// [-1,1]^d, label sigma(alpha . Phi_w*(x) + alpha_0) plus Gaussian noise
// clipped to [0,1]).
class Task {
 public:
  enum class Kind { FiniteSupport, SharedFeatureGenerative, BooleanBiased };

  static Task finite_support(int input_dim, std::vector<SupportAtom> atoms,
                             LabelSpace space);
  static Task boolean_biased(int input_dim, std::vector<SupportAtom> atoms);
  static Task generative(std::shared_ptr<const net::FeatureWeights> features,
                         Eigen::VectorXd head, double noise_std);

  Kind kind() const { return kind_; }
  int input_dim() const { return input_dim_; }
  LabelSpace label_space() const { return space_; }
  const std::vector<SupportAtom>& support() const { return atoms_; }
  const std::shared_ptr<const net::FeatureWeights>& true_features() const {
    return features_;
  }
  const Eigen::VectorXd& head() const { return head_; }
  double noise_std() const { return noise_std_; }

  std::pair<Eigen::VectorXd, double> sample(SplitRng& rng) const;
  // Clean label of the generative model (before noise).
  double clean_label(const Eigen::VectorXd& x) const;

 private:
  Task() = default;
  Kind kind_ = Kind::FiniteSupport;
  int input_dim_ = 0;
  LabelSpace space_ = LabelSpace::UnitInterval;
  std::vector<SupportAtom> atoms_;
  std::shared_ptr<const net::FeatureWeights> features_;
  Eigen::VectorXd head_;
  double noise_std_ = 0.0;
};

// Appendix-C style hard instance: task i is supported on row i's points with
// per-point (sign-biased) masses (1 +- beta) / (2 * cols).
struct HardInstance {
  std::vector<Task> tasks;
  std::vector<std::vector<Eigen::VectorXd>> points;  // n rows of cols points
  std::vector<std::vector<std::int8_t>> optimal_signs;
  double beta = 0.0;
  std::uint64_t sign_seed = 0;
};

HardInstance make_hard_boolean_env(
    const std::vector<std::vector<Eigen::VectorXd>>& x, double beta,
    std::uint64_t sign_seed);

// An environment (P, Q): a distribution over tasks.
class Environment {
 public:
  enum class Kind { FiniteMixture, SharedFeature, HardBoolean };

  static Environment finite_mixture(std::vector<std::pair<Task, double>> mix,
                                    std::uint64_t seed_domain = 0);
  static Environment shared_feature(
      std::shared_ptr<const net::FeatureWeights> features, double head_bound,
      double noise_std, std::uint64_t seed_domain = 0);
  static Environment hard_boolean(HardInstance instance,
                                  std::uint64_t seed_domain = 0);

  Kind kind() const { return kind_; }
  int input_dim() const { return input_dim_; }
  std::uint64_t seed_domain() const { return seed_domain_; }
  const std::vector<std::pair<Task, double>>& mixture() const { return mix_; }
  const std::shared_ptr<const net::FeatureWeights>& shared_features() const {
    return features_;
  }
  double head_bound() const { return head_bound_; }
  double noise_std() const { return noise_std_; }
  const HardInstance& hard() const { return hard_; }

  // Bayes squared error when the generative formula pins it down.
  std::optional<double> known_bayes_mse() const;

 private:
  Environment() = default;
  Kind kind_ = Kind::FiniteMixture;
  int input_dim_ = 0;
  std::uint64_t seed_domain_ = 0;
  std::vector<std::pair<Task, double>> mix_;
  std::shared_ptr<const net::FeatureWeights> features_;
  double head_bound_ = 1.0;
  double noise_std_ = 0.0;
  HardInstance hard_;
};

// Draw one task from Q; a pure function of (env, seed).
Task sample_task(const Environment& e, std::uint64_t seed);

// Two-stage (n, m)-sampling: n tasks i.i.d. from Q, then m labeled pairs
// i.i.d. from each. Hard environments use their fixed task sequence and
// require n to match it.
std::pair<NMSample, std::vector<Task>> sample_nm(const Environment& e, int n,
                                                 int m, std::uint64_t seed);

// Draw one training set of m examples from a task, keyed like one (n, m)
// sample row.
TrainingSet sample_training_set(const Task& task, int m, std::uint64_t seed);

// Synthetic shared-feature environment; the hidden feature map is recorded
// for oracle evaluation. Heads are drawn uniform in [-head_bound, head_bound],
// hidden feature weights uniform in [-feature_scale, feature_scale].
Environment make_shared_feature_env(int d, int l, int k, double head_bound,
                                    double noise_std, std::uint64_t seed,
                                    double feature_scale = 1.0);

using Predictor = std::function<double(const Eigen::VectorXd&)>;

struct ErrorEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

// True expected loss of a predictor on a task: exact for finite support,
// Monte Carlo with standard error otherwise.
ErrorEstimate task_error(const Task& task, const Predictor& predictor,
                         LossId loss, int mc_samples, std::uint64_t seed);

// Versioned plain-text record for persistence.
std::string env_to_text(const Environment& e);
Environment env_from_text(const std::string& text);

}  // namespace biaslearn::env
