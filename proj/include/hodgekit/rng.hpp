#pragma once

#include <cstdint>

#include "hodgekit/types.hpp"

namespace hodge {

/// Counter-based SplitMix64. Draw i of stream s under seed k is
/// mix64(k + (s * 2^32 + i + 1) * 0x9E3779B97F4A7C15), so any draw can be
/// recomputed from (seed, stream, index) alone.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), counter_(stream << 32) {}

  static std::uint64_t mix64(std::uint64_t z);

  std::uint64_t next_u64();
  /// Uniform on (0, 1].
  double uniform();
  /// Standard normal (Box-Muller, cosine branch).
  double normal();
  /// Standard complex normal: re, im independent N(0, 1/2).
  cplx complex_normal();

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_;
};

}  // namespace hodge
