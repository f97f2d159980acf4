#pragma once

#include <cmath>
#include <cstdint>

namespace biaslearn {

// Counter-based splittable random stream. Every draw is a pure function of
// (key, counter), so streams derived for (task, example) pairs produce the
// same values no matter which order they are consumed in.
class SplitRng {
 public:
  SplitRng() = default;
  explicit SplitRng(std::uint64_t seed) : key_(mix(seed ^ kGolden)) {}

  // Derived stream for a sub-entity (task index, example index, restart, ...).
  [[nodiscard]] SplitRng child(std::uint64_t id) const {
    SplitRng r;
    r.key_ = mix(key_ ^ mix(id + kGolden));
    return r;
  }

  std::uint64_t next_u64() { return mix(key_ ^ mix(counter_++ + kGolden)); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; consumes exactly two counter steps.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  // Uniform integer in [0, bound). Multiply-shift; bias is < bound / 2^64.
  std::uint64_t integer(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

  // splitmix64 finalizer (Stafford mix13).
  static std::uint64_t mix(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace biaslearn
