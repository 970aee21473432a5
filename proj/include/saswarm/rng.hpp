#pragma once

#include "saswarm/geometry.hpp"

#include <cmath>
#include <cstdint>

namespace saswarm {

namespace detail {
// SplitMix64 finalizer. Fixed here so that every stream is reproducible
// across platforms and standard-library versions.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Counter-based, splittable random stream. Children derived via split()
/// are independent of how many values the parent has produced, which keeps
/// draw order deterministic under any evaluation schedule.
class Rng {
 public:
  explicit Rng(std::uint64_t key = 0) : key_(key) {}

  std::uint64_t next_u64() { return detail::mix64(key_ + 0x9E3779B97F4A7C15ull * ++counter_); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller (single branch, no cached spare).
  double normal() {
    double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double normal(double mean, double variance) { return mean + std::sqrt(variance) * normal(); }

  /// Random direction on the unit circle.
  Vec2 unit_vec2() {
    double a = uniform(0.0, 2.0 * M_PI);
    return {std::cos(a), std::sin(a)};
  }

  /// Derive an independent child stream for `tag`. Pure: does not consume
  /// from this stream.
  Rng split(std::uint64_t tag) const { return Rng(detail::mix64(key_ ^ detail::mix64(tag))); }

  Rng split(std::uint64_t a, std::uint64_t b) const { return split(a).split(b); }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace saswarm
