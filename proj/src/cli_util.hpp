#pragma once

#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "biaslearn/booldim.hpp"
#include "biaslearn/config.hpp"
#include "biaslearn/env.hpp"
#include "biaslearn/net.hpp"
#include "biaslearn/rng.hpp"
#include "biaslearn/train.hpp"

namespace biaslearn::cli {

// Static index partition over [0, count); results must be written to
// pre-sized slots so the schedule never affects output. The first worker
// exception is rethrown on the calling thread.
inline void parallel_for(int count, int threads,
                         const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (int i = t; i < count; i += threads) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

inline std::uint64_t mix_seed(std::uint64_t base,
                              std::initializer_list<std::uint64_t> ids) {
  SplitRng r(base);
  for (auto id : ids) r = r.child(id);
  return r.next_u64();
}

env::Environment environment_from_config(const Config& cfg);
booldim::BooleanFamily family_from_config(const Config& cfg);

inline net::Arch arch_from_config(const Config& cfg) {
  net::Arch a;
  a.d = static_cast<int>(cfg.get_int("architecture", "d"));
  a.l = static_cast<int>(cfg.get_int("architecture", "l"));
  a.k = static_cast<int>(cfg.get_int("architecture", "k"));
  return a;
}

inline train::TrainConfig train_config_from(const Config& cfg) {
  train::TrainConfig t;
  t.max_epochs = static_cast<int>(cfg.get_int("train", "max_epochs", t.max_epochs));
  t.initial_step = cfg.get_double("train", "initial_step", t.initial_step);
  t.backtrack = cfg.get_double("train", "backtrack", t.backtrack);
  t.tolerance = cfg.get_double("train", "tolerance", t.tolerance);
  t.init_scale = cfg.get_double("train", "init_scale", t.init_scale);
  return t;
}

}  // namespace biaslearn::cli
