#pragma once

#include <cstdint>

namespace edgecalc {

/// Counter-based deterministic generator. Every draw is a pure hash of
/// (seed, stream, counter), so concurrent sweep workers can pull the same
/// numbers regardless of scheduling order.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : base_(mix(seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1)))) {}

  /// Uniform in [0, 1).
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(mix(base_ + counter * 0xBF58476D1CE4E5B9ULL) >> 11) *
           0x1.0p-53;
  }

  /// Uniform in [-1, 1).
  double symmetric(std::uint64_t counter) const { return 2.0 * uniform(counter) - 1.0; }

  /// Uniform in [lo, hi).
  double range(std::uint64_t counter, double lo, double hi) const {
    return lo + (hi - lo) * uniform(counter);
  }

 private:
  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t base_;
};

}  // namespace edgecalc
