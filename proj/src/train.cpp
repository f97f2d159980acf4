#include "biaslearn/train.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "biaslearn/format.hpp"

namespace biaslearn::train {
namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

constexpr double kMinStep = 1e-18;

// Generic descent driver over a flattened parameter vector. `eval_loss` is
// the cheap forward pass used by the line search, `eval_both` also returns
// the gradient, `project` clips into the feasible box.
template <typename EvalLoss, typename EvalBoth, typename Project>
TrainTrace descend(Eigen::VectorXd& params, const EvalLoss& eval_loss,
                   const EvalBoth& eval_both, const Project& project,
                   const TrainConfig& cfg) {
  cfg.validate();
  TrainTrace trace;
  params = project(params);
  auto [loss, grad] = eval_both(params);
  if (!std::isfinite(loss)) throw NumericalFailure("non-finite initial loss", 0);
  trace.losses.push_back(loss);
  double step = cfg.initial_step;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    double candidate_loss = 0.0;
    Eigen::VectorXd candidate;
    bool accepted = false;
    while (step >= kMinStep) {
      candidate = project(params - step * grad);
      candidate_loss = eval_loss(candidate);
      if (!std::isfinite(candidate_loss))
        throw NumericalFailure("non-finite loss in line search", epoch);
      if (candidate_loss < loss) {
        accepted = true;
        break;
      }
      step *= cfg.backtrack;
    }
    if (!accepted) {
      trace.reason = StopReason::Converged;  // no descent step exists
      break;
    }
    const double decrease = loss - candidate_loss;
    params = std::move(candidate);
    loss = candidate_loss;
    grad = eval_both(params).second;
    trace.losses.push_back(loss);
    trace.steps.push_back(step);
    trace.epochs = epoch;
    if (decrease < cfg.tolerance) {
      trace.reason = StopReason::Converged;
      break;
    }
    step /= cfg.backtrack;  // let the accepted step grow back
  }
  trace.final_loss = trace.losses.back();
  return trace;
}

}  // namespace

void TrainConfig::validate() const {
  if (max_epochs < 0) throw std::invalid_argument("max_epochs must be >= 0");
  if (initial_step <= 0.0)
    throw std::invalid_argument("initial_step must be positive");
  if (backtrack <= 0.0 || backtrack >= 1.0)
    throw std::invalid_argument("backtracking factor must lie in (0,1)");
  if (tolerance < 0.0) throw std::invalid_argument("tolerance must be >= 0");
  if (init_scale < 0.0) throw std::invalid_argument("init_scale must be >= 0");
}

std::string TrainTrace::to_csv() const {
  std::ostringstream out;
  out << "epoch,loss,step_size\n";
  for (std::size_t i = 0; i < losses.size(); ++i) {
    out << i << ',' << fmt_double(losses[i]) << ','
        << (i == 0 ? std::string("0") : fmt_double(steps[i - 1])) << '\n';
  }
  return out.str();
}

std::pair<net::MultiTaskNet, TrainTrace> train_multitask(
    const NMSample& sample, const net::Arch& arch, const TrainConfig& cfg) {
  sample.validate();
  require(sample.input_dim() == arch.d, "sample dimension must match arch");
  net::MultiTaskNet start =
      net::init_net(arch, sample.n, cfg.init_scale, SplitRng(cfg.seed));
  const double bw = start.features.weight_bound;
  const double ba = start.heads.front().head_bound;

  Eigen::VectorXd params = net::flatten(start);
  auto eval_loss = [&](const Eigen::VectorXd& p) {
    return net::empirical_loss(net::unflatten(arch, sample.n, p, bw, ba),
                               sample);
  };
  auto eval_both = [&](const Eigen::VectorXd& p) {
    const auto lg =
        net::loss_and_grad(net::unflatten(arch, sample.n, p, bw, ba), sample);
    return std::make_pair(lg.loss, lg.grad);
  };
  auto project = [&](const Eigen::VectorXd& p) {
    return net::flatten(
        net::clip_weights(net::unflatten(arch, sample.n, p, bw, ba)));
  };
  TrainTrace trace = descend(params, eval_loss, eval_both, project, cfg);
  return {net::unflatten(arch, sample.n, params, bw, ba), std::move(trace)};
}

std::pair<net::OutputHead, TrainTrace> train_head_frozen(
    const net::FeatureWeights& features, const TrainingSet& z,
    const TrainConfig& cfg) {
  require(!z.empty(), "training set must be nonempty");
  for (const auto& [x, y] : z) {
    (void)x;
    require(y >= 0.0 && y <= 1.0, "labels must lie in [0,1]");
  }
  net::OutputHead head;
  head.alpha.resize(features.k() + 1);
  SplitRng hr = SplitRng(cfg.seed).child(100);
  for (int j = 0; j <= features.k(); ++j)
    head.alpha(j) = hr.uniform(-cfg.init_scale, cfg.init_scale);
  const double ba = head.head_bound;

  // Feature outputs are fixed, so precompute them once.
  const int k = features.k();
  const int m = static_cast<int>(z.size());
  Eigen::MatrixXd phia(k + 1, m);
  Eigen::RowVectorXd y(m);
  for (int j = 0; j < m; ++j) {
    phia.col(j).head(k) = net::feature_forward(features, z[j].first);
    phia(k, j) = 1.0;
    y(j) = z[j].second;
  }
  Eigen::VectorXd params = head.alpha;
  auto eval_both = [&](const Eigen::VectorXd& p) {
    const Eigen::RowVectorXd o =
        (p.transpose() * phia)
            .unaryExpr([](double v) { return net::sigmoid(v); });
    const Eigen::RowVectorXd r = o - y;
    const double loss = r.squaredNorm() / m;
    const Eigen::RowVectorXd dc =
        (2.0 / m) *
        r.cwiseProduct(o).cwiseProduct((1.0 - o.array()).matrix());
    return std::make_pair(loss, (phia * dc.transpose()).eval());
  };
  auto eval_loss = [&](const Eigen::VectorXd& p) { return eval_both(p).first; };
  auto project = [&](const Eigen::VectorXd& p) {
    return p.cwiseMax(-ba).cwiseMin(ba).eval();
  };
  TrainTrace trace = descend(params, eval_loss, eval_both, project, cfg);
  head.alpha = params;
  return {std::move(head), std::move(trace)};
}

std::pair<net::MultiTaskNet, TrainTrace> train_multitask_restarts(
    const NMSample& sample, const net::Arch& arch, const TrainConfig& cfg,
    int restarts) {
  require(restarts >= 1, "restarts must be >= 1");
  std::optional<std::pair<net::MultiTaskNet, TrainTrace>> best;
  for (int r = 0; r < restarts; ++r) {
    TrainConfig c = cfg;
    c.seed = SplitRng(cfg.seed).child(9000).child(r).next_u64();
    auto result = train_multitask(sample, arch, c);
    // Strict < keeps the lowest restart index on ties.
    if (!best || result.second.final_loss < best->second.final_loss)
      best = std::move(result);
  }
  return std::move(*best);
}

double family_empirical_loss(const NMSample& sample, const net::Arch& arch,
                             const TrainConfig& cfg, int restarts) {
  return train_multitask_restarts(sample, arch, cfg, restarts)
      .second.final_loss;
}

TransferResult evaluate_transfer(const env::Environment& e,
                                 const net::FeatureWeights& features,
                                 int m_novel, int trials,
                                 const TrainConfig& cfg, std::uint64_t seed,
                                 int mc_samples) {
  require(trials >= 1, "trials must be >= 1");
  require(m_novel >= 1, "m_novel must be >= 1");
  TransferResult out;
  SplitRng root(seed);
  for (int t = 0; t < trials; ++t) {
    SplitRng trial = root.child(t);
    const env::Task task = env::sample_task(e, trial.child(1).next_u64());
    const TrainingSet z =
        env::sample_training_set(task, m_novel, trial.child(2).next_u64());
    TrainConfig c = cfg;
    c.seed = trial.child(3).next_u64();
    const auto [head, trace] = train_head_frozen(features, z, c);
    const auto err = env::task_error(
        task,
        [&](const Eigen::VectorXd& x) {
          return net::head_forward(features, head, x);
        },
        env::LossId::Squared, mc_samples, trial.child(4).next_u64());
    out.per_trial.push_back(err.value);
  }
  double sum = 0.0, sum2 = 0.0;
  for (double v : out.per_trial) {
    sum += v;
    sum2 += v * v;
  }
  out.mean_error = sum / trials;
  if (trials > 1) {
    const double var =
        std::max(0.0, (sum2 - trials * out.mean_error * out.mean_error) /
                          (trials - 1));
    out.std_error = std::sqrt(var / trials);
  }
  return out;
}

}  // namespace biaslearn::train
