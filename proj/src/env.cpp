#include "biaslearn/env.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "biaslearn/format.hpp"

namespace biaslearn::env {
namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void check_atoms(int input_dim, const std::vector<SupportAtom>& atoms,
                 LabelSpace space) {
  require(!atoms.empty(), "finite support must be nonempty");
  double total = 0.0;
  for (const auto& a : atoms) {
    require(static_cast<int>(a.x.size()) == input_dim,
            "support point dimension mismatch");
    require(a.p >= 0.0, "probabilities must be nonnegative");
    total += a.p;
    if (space == LabelSpace::UnitInterval)
      require(a.y >= 0.0 && a.y <= 1.0, "labels must lie in [0,1]");
    else
      require(a.y == 1.0 || a.y == -1.0, "labels must be +1 or -1");
  }
  require(std::abs(total - 1.0) <= 1e-12,
          "support probabilities must sum to 1");
}

// Sub-stream tags for the (n, m)-sampling process.
constexpr std::uint64_t kTaskStream = 1;
constexpr std::uint64_t kExampleStream = 2;

}  // namespace

Task Task::finite_support(int input_dim, std::vector<SupportAtom> atoms,
                          LabelSpace space) {
  require(input_dim >= 1, "input dimension must be >= 1");
  check_atoms(input_dim, atoms, space);
  Task t;
  t.kind_ = Kind::FiniteSupport;
  t.input_dim_ = input_dim;
  t.space_ = space;
  t.atoms_ = std::move(atoms);
  return t;
}

Task Task::boolean_biased(int input_dim, std::vector<SupportAtom> atoms) {
  Task t = finite_support(input_dim, std::move(atoms), LabelSpace::Sign);
  t.kind_ = Kind::BooleanBiased;
  return t;
}

Task Task::generative(std::shared_ptr<const net::FeatureWeights> features,
                      Eigen::VectorXd head, double noise_std) {
  require(features != nullptr, "generative task needs feature weights");
  features->validate();
  require(head.size() == features->k() + 1, "head size must be k+1");
  require(noise_std >= 0.0, "noise std must be nonnegative");
  Task t;
  t.kind_ = Kind::SharedFeatureGenerative;
  t.input_dim_ = features->d();
  t.space_ = LabelSpace::UnitInterval;
  t.features_ = std::move(features);
  t.head_ = std::move(head);
  t.noise_std_ = noise_std;
  return t;
}

double Task::clean_label(const Eigen::VectorXd& x) const {
  require(kind_ == Kind::SharedFeatureGenerative,
          "clean_label is defined for generative tasks");
  const Eigen::VectorXd phi = net::feature_forward(*features_, x);
  const int k = features_->k();
  return net::sigmoid(head_.head(k).dot(phi) + head_(k));
}

std::pair<Eigen::VectorXd, double> Task::sample(SplitRng& rng) const {
  if (kind_ == Kind::SharedFeatureGenerative) {
    Eigen::VectorXd x(input_dim_);
    for (int i = 0; i < input_dim_; ++i) x(i) = rng.uniform(-1.0, 1.0);
    double y = clean_label(x);
    if (noise_std_ > 0.0) y += noise_std_ * rng.normal();
    return {std::move(x), std::clamp(y, 0.0, 1.0)};
  }
  // Finite support: CDF walk.
  const double u = rng.uniform();
  double acc = 0.0;
  for (const auto& a : atoms_) {
    acc += a.p;
    if (u < acc) return {a.x, a.y};
  }
  return {atoms_.back().x, atoms_.back().y};
}

HardInstance make_hard_boolean_env(
    const std::vector<std::vector<Eigen::VectorXd>>& x, double beta,
    std::uint64_t sign_seed) {
  require(beta > 0.0 && beta < 1.0, "beta must lie in (0,1)");
  require(!x.empty(), "need at least one row");
  const int cols = static_cast<int>(x.front().size());
  require(cols >= 1, "need at least one column");
  const int dim = static_cast<int>(x.front().front().size());

  HardInstance inst;
  inst.points = x;
  inst.beta = beta;
  inst.sign_seed = sign_seed;
  SplitRng root(sign_seed);
  const double p_plus = (1.0 + beta) / (2.0 * cols);
  const double p_minus = (1.0 - beta) / (2.0 * cols);
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(static_cast<int>(x[i].size()) == cols, "ragged point matrix");
    std::vector<SupportAtom> atoms;
    std::vector<std::int8_t> signs;
    SplitRng row = root.child(i);
    for (int j = 0; j < cols; ++j) {
      require(static_cast<int>(x[i][j].size()) == dim,
              "point dimension mismatch");
      for (int j2 = 0; j2 < j; ++j2)
        require((x[i][j] - x[i][j2]).lpNorm<Eigen::Infinity>() > 0.0,
                "row points must be distinct");
      const bool plus_up = row.child(j).next_u64() & 1u;
      signs.push_back(plus_up ? 1 : -1);
      atoms.push_back({x[i][j], 1.0, plus_up ? p_plus : p_minus});
      atoms.push_back({x[i][j], -1.0, plus_up ? p_minus : p_plus});
    }
    inst.optimal_signs.push_back(std::move(signs));
    inst.tasks.push_back(Task::boolean_biased(dim, std::move(atoms)));
  }
  return inst;
}

Environment Environment::finite_mixture(
    std::vector<std::pair<Task, double>> mix, std::uint64_t seed_domain) {
  require(!mix.empty(), "mixture must be nonempty");
  double total = 0.0;
  const int dim = mix.front().first.input_dim();
  for (const auto& [task, p] : mix) {
    require(p >= 0.0, "mixture probabilities must be nonnegative");
    require(task.input_dim() == dim, "mixture tasks must share the dimension");
    total += p;
  }
  require(std::abs(total - 1.0) <= 1e-12,
          "mixture probabilities must sum to 1");
  Environment e;
  e.kind_ = Kind::FiniteMixture;
  e.input_dim_ = dim;
  e.seed_domain_ = seed_domain;
  e.mix_ = std::move(mix);
  return e;
}

Environment Environment::shared_feature(
    std::shared_ptr<const net::FeatureWeights> features, double head_bound,
    double noise_std, std::uint64_t seed_domain) {
  require(features != nullptr, "shared environment needs feature weights");
  features->validate();
  require(head_bound > 0.0, "head bound must be positive");
  require(noise_std >= 0.0, "noise std must be nonnegative");
  Environment e;
  e.kind_ = Kind::SharedFeature;
  e.input_dim_ = features->d();
  e.seed_domain_ = seed_domain;
  e.features_ = std::move(features);
  e.head_bound_ = head_bound;
  e.noise_std_ = noise_std;
  return e;
}

Environment Environment::hard_boolean(HardInstance instance,
                                      std::uint64_t seed_domain) {
  require(!instance.tasks.empty(), "hard instance has no tasks");
  Environment e;
  e.kind_ = Kind::HardBoolean;
  e.input_dim_ = instance.tasks.front().input_dim();
  e.seed_domain_ = seed_domain;
  e.hard_ = std::move(instance);
  return e;
}

std::optional<double> Environment::known_bayes_mse() const {
  if (kind_ == Kind::SharedFeature) return noise_std_ * noise_std_;
  return std::nullopt;
}

Task sample_task(const Environment& e, std::uint64_t seed) {
  SplitRng rng = SplitRng(seed).child(e.seed_domain());
  switch (e.kind()) {
    case Environment::Kind::FiniteMixture: {
      const double u = rng.uniform();
      double acc = 0.0;
      for (const auto& [task, p] : e.mixture()) {
        acc += p;
        if (u < acc) return task;
      }
      return e.mixture().back().first;
    }
    case Environment::Kind::SharedFeature: {
      const int k = e.shared_features()->k();
      Eigen::VectorXd head(k + 1);
      for (int i = 0; i <= k; ++i)
        head(i) = rng.uniform(-e.head_bound(), e.head_bound());
      return Task::generative(e.shared_features(), std::move(head),
                              e.noise_std());
    }
    case Environment::Kind::HardBoolean: {
      const auto idx = rng.integer(e.hard().tasks.size());
      return e.hard().tasks[idx];
    }
  }
  throw std::logic_error("unreachable environment kind");
}

TrainingSet sample_training_set(const Task& task, int m, std::uint64_t seed) {
  require(m >= 1, "m must be >= 1");
  TrainingSet z;
  z.reserve(m);
  SplitRng row(seed);
  for (int j = 0; j < m; ++j) {
    SplitRng er = row.child(j);
    z.push_back(task.sample(er));
  }
  return z;
}

std::pair<NMSample, std::vector<Task>> sample_nm(const Environment& e, int n,
                                                 int m, std::uint64_t seed) {
  require(n >= 1 && m >= 1, "n and m must be >= 1");
  SplitRng root = SplitRng(seed).child(e.seed_domain());
  std::vector<Task> tasks;
  tasks.reserve(n);
  if (e.kind() == Environment::Kind::HardBoolean) {
    require(n == static_cast<int>(e.hard().tasks.size()),
            "hard environments fix the task sequence; n must match it");
    tasks = e.hard().tasks;
  } else {
    for (int i = 0; i < n; ++i)
      tasks.push_back(sample_task(e, root.child(kTaskStream).child(i).next_u64()));
  }
  NMSample s;
  s.n = n;
  s.m = m;
  s.task_ids.resize(n);
  s.rows.resize(n);
  for (int i = 0; i < n; ++i) {
    s.task_ids[i] = i;
    s.rows[i] = sample_training_set(
        tasks[i], m, root.child(kExampleStream).child(i).next_u64());
  }
  s.validate();
  return {std::move(s), std::move(tasks)};
}

Environment make_shared_feature_env(int d, int l, int k, double head_bound,
                                    double noise_std, std::uint64_t seed,
                                    double feature_scale) {
  require(d >= 1 && l >= 1 && k >= 1, "d, l, k must be >= 1");
  require(feature_scale > 0.0, "feature scale must be positive");
  auto fw = std::make_shared<net::FeatureWeights>();
  fw->u.resize(l, d + 1);
  fw->v.resize(k, l + 1);
  fw->weight_bound = std::max(10.0, feature_scale);
  SplitRng rng(seed);
  SplitRng ur = rng.child(1);
  SplitRng vr = rng.child(2);
  for (int i = 0; i < l; ++i)
    for (int j = 0; j <= d; ++j)
      fw->u(i, j) = ur.uniform(-feature_scale, feature_scale);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j <= l; ++j)
      fw->v(i, j) = vr.uniform(-feature_scale, feature_scale);
  return Environment::shared_feature(std::move(fw), head_bound, noise_std,
                                     seed);
}

ErrorEstimate task_error(const Task& task, const Predictor& predictor,
                         LossId loss, int mc_samples, std::uint64_t seed) {
  const bool squared = loss == LossId::Squared;
  require(squared ? task.label_space() == LabelSpace::UnitInterval
                  : task.label_space() == LabelSpace::Sign,
          "loss does not match the task's label space");
  auto point_loss = [&](const Eigen::VectorXd& x, double y) {
    const double p = predictor(x);
    if (squared) {
      const double r = p - y;
      return r * r;
    }
    const double sign = p >= 0.0 ? 1.0 : -1.0;
    return sign == y ? 0.0 : 1.0;
  };
  if (task.kind() != Task::Kind::SharedFeatureGenerative) {
    double total = 0.0;
    for (const auto& a : task.support()) total += a.p * point_loss(a.x, a.y);
    return {total, 0.0};
  }
  require(mc_samples >= 2, "need at least two Monte Carlo samples");
  SplitRng root(seed);
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < mc_samples; ++i) {
    SplitRng er = root.child(i);
    const auto [x, y] = task.sample(er);
    const double v = point_loss(x, y);
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / mc_samples;
  const double var =
      std::max(0.0, (sum2 - mc_samples * mean * mean) / (mc_samples - 1));
  return {mean, std::sqrt(var / mc_samples)};
}

}  // namespace biaslearn::env
