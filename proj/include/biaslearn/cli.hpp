#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "biaslearn/config.hpp"

namespace biaslearn::cli {

// Exit codes of the biaslearn tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitResourceCap = 3;

struct RunOptions {
  int threads = 1;
  std::optional<std::uint64_t> seed_override;
};

// (relative file name, content) pairs produced by one experiment.
using Artifacts = std::vector<std::pair<std::string, std::string>>;

// Run the experiment described by the config. Pure function of
// (config, options): artifacts are byte-identical across reruns and thread
// counts.
Artifacts run_experiment(const Config& cfg, const RunOptions& opts);

Artifacts cmd_curve(const Config& cfg, const RunOptions& opts);
Artifacts cmd_transfer(const Config& cfg, const RunOptions& opts);
Artifacts cmd_bounds(const Config& cfg, const RunOptions& opts);
Artifacts cmd_dim(const Config& cfg, const RunOptions& opts);
Artifacts cmd_hard(const Config& cfg, const RunOptions& opts);

// Full command-line entry (args exclude the program name). Writes artifacts
// to "<prefix>_<name>"; prefix defaults to the config path minus extension.
int run(const std::vector<std::string>& args);

}  // namespace biaslearn::cli
