#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace fita {

/// Deterministic random helpers on top of std::mt19937_64. The standard
/// distribution classes are implementation-defined, so sampling is done by
/// hand here to keep artifacts byte-identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform integer in [0, bound) via rejection sampling. bound > 0.
  std::uint64_t uniform_below(std::uint64_t bound);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  /// Standard normal via Box-Muller (one draw per call, no caching, so the
  /// stream does not depend on call parity).
  double normal();

  /// Normal with the given mean / standard deviation.
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// k distinct indices from [0, n), in ascending order. Partial
  /// Fisher-Yates on an index vector. Requires 0 <= k <= n.
  std::vector<std::int64_t> sample_without_replacement(std::int64_t n, std::int64_t k);

 private:
  std::mt19937_64 engine_;
};

}  // namespace fita
