#pragma once

#include <cstdint>

namespace scorematch {

/// Counter-based pseudo-random generator: the SplitMix64 finalizer applied
/// to seed + (index+1) * golden-gamma. Every draw is a pure function of
/// (seed, index), so streams can be split and trials can derive independent
/// sub-seeds deterministically regardless of evaluation order. Normal
/// variates use the Box-Muller cosine branch on two counter values.
/// Determinism is promised within one build, not across libm versions.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t bits(std::uint64_t index) const;

  /// Uniform in the open interval (0,1).
  double uniform(std::uint64_t index) const;

  double normal(std::uint64_t index) const;

  /// Independent generator for sub-stream k (trials, replications, ...).
  CounterRng split(std::uint64_t stream) const;

 private:
  std::uint64_t seed_ = 0;
};

}  // namespace scorematch
