#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "biaslearn/env.hpp"
#include "biaslearn/net.hpp"
#include "biaslearn/sample.hpp"

namespace biaslearn::train {

struct TrainConfig {
  int max_epochs = 2000;
  double initial_step = 4.0;
  double backtrack = 0.5;       // step-halving factor, in (0,1)
  double tolerance = 1e-12;     // stop when the per-epoch decrease drops below
  double init_scale = 0.3;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class StopReason { Converged, EpochCap };

struct TrainTrace {
  std::vector<double> losses;  // loss after each accepted step, losses[0] = initial
  std::vector<double> steps;   // accepted step sizes, one per epoch
  double final_loss = 0.0;
  int epochs = 0;
  StopReason reason = StopReason::EpochCap;

  // CSV with columns epoch, loss, step_size.
  std::string to_csv() const;
};

// Thrown when the loss turns non-finite; carries the offending epoch.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& msg, int epoch)
      : std::runtime_error(msg), epoch(epoch) {}
  int epoch;
};

// Joint gradient descent on features and all heads with a backtracking
// (halving) line search; weights clipped after every step, so the loss
// sequence is nonincreasing by construction.
std::pair<net::MultiTaskNet, TrainTrace> train_multitask(
    const NMSample& sample, const net::Arch& arch, const TrainConfig& cfg);

// Fits only the k+1 head parameters on one training set; features untouched.
std::pair<net::OutputHead, TrainTrace> train_head_frozen(
    const net::FeatureWeights& features, const TrainingSet& z,
    const TrainConfig& cfg);

// Best-of-restarts training (seed stream cfg.seed with the restart index
// appended); ties keep the lowest restart index.
std::pair<net::MultiTaskNet, TrainTrace> train_multitask_restarts(
    const NMSample& sample, const net::Arch& arch, const TrainConfig& cfg,
    int restarts);

// Minimum trained loss over independent restarts. An upper bound on the
// empirical-loss infimum, never reported as the infimum itself.
double family_empirical_loss(const NMSample& sample, const net::Arch& arch,
                             const TrainConfig& cfg, int restarts);

struct TransferResult {
  double mean_error = 0.0;
  double std_error = 0.0;
  std::vector<double> per_trial;
};

// Repeatedly: draw a novel task, draw m_novel examples, fit a frozen-feature
// head, and measure the true error on fresh data.
TransferResult evaluate_transfer(const env::Environment& e,
                                 const net::FeatureWeights& features,
                                 int m_novel, int trials,
                                 const TrainConfig& cfg, std::uint64_t seed,
                                 int mc_samples = 4000);

}  // namespace biaslearn::train
