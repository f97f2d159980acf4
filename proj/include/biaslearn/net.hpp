#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "biaslearn/rng.hpp"
#include "biaslearn/sample.hpp"

namespace biaslearn::net {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Two-layer feature map x in R^d -> [0,1]^k. Row j of `u` holds the j-th
// hidden unit's weights with its bias in the last column; row i of `v` the
// i-th feature's combination weights plus bias.
struct FeatureWeights {
  Eigen::MatrixXd u;  // l x (d+1)
  Eigen::MatrixXd v;  // k x (l+1)
  double weight_bound = 10.0;

  int d() const { return static_cast<int>(u.cols()) - 1; }
  int l() const { return static_cast<int>(u.rows()); }
  int k() const { return static_cast<int>(v.rows()); }
  // Flattened feature-parameter count W = l(d+1) + k(l+1).
  int param_count() const {
    return static_cast<int>(u.size() + v.size());
  }
  void validate() const;
};

// Squashed affine head on the feature outputs: alpha = (a_1..a_k, a_0).
struct OutputHead {
  Eigen::VectorXd alpha;  // k+1 entries, bias last
  double head_bound = 10.0;

  int k() const { return static_cast<int>(alpha.size()) - 1; }
  void validate() const;
};

struct MultiTaskNet {
  FeatureWeights features;
  std::vector<OutputHead> heads;

  int n() const { return static_cast<int>(heads.size()); }
  // Total parameter count W + n(k+1).
  int param_count() const;
  void validate() const;
};

struct Arch {
  int d = 1;
  int l = 1;
  int k = 1;
};

// Random net with entries uniform in [-init_scale, init_scale].
MultiTaskNet init_net(const Arch& arch, int n, double init_scale, SplitRng rng,
                      double weight_bound = 10.0, double head_bound = 10.0);

Eigen::VectorXd feature_forward(const FeatureWeights& fw,
                                const Eigen::VectorXd& x);

double head_forward(const FeatureWeights& fw, const OutputHead& head,
                    const Eigen::VectorXd& x);

double net_forward(const MultiTaskNet& net, int task_index,
                   const Eigen::VectorXd& x);

struct LossGrad {
  double loss = 0.0;
  Eigen::VectorXd grad;  // length W + n(k+1), documented flattening order
};

// Empirical squared loss averaged over tasks and examples, with the exact
// analytic gradient with respect to all feature and head parameters.
// Flattening order: u row-major, v row-major, then heads in task order
// (each head a_1..a_k, a_0).
LossGrad loss_and_grad(const MultiTaskNet& net, const NMSample& sample);

// Loss/grad of a single frozen-feature head on one training set; gradient
// has k+1 entries.
LossGrad head_loss_and_grad(const FeatureWeights& fw, const OutputHead& head,
                            const TrainingSet& z);

double empirical_loss(const MultiTaskNet& net, const NMSample& sample);

// Clamp every parameter into [-bound, +bound] for its bound; idempotent.
MultiTaskNet clip_weights(MultiTaskNet net);
OutputHead clip_head(OutputHead head);

Eigen::VectorXd flatten(const MultiTaskNet& net);
MultiTaskNet unflatten(const Arch& arch, int n, const Eigen::VectorXd& params,
                       double weight_bound = 10.0, double head_bound = 10.0);

// Versioned plain-text record: architecture header then parameters in the
// flattening order, 17 significant digits.
std::string net_to_text(const MultiTaskNet& net);
MultiTaskNet net_from_text(const std::string& text);

}  // namespace biaslearn::net
