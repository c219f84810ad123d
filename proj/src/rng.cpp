#include "scorematch/rng.hpp"

#include <cmath>
#include <numbers>

namespace scorematch {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kSplitSalt = 0x6A09E667F3BCC909ULL;

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t CounterRng::bits(std::uint64_t index) const {
  return mix(seed_ + (index + 1) * kGamma);
}

double CounterRng::uniform(std::uint64_t index) const {
  // 53 high bits, offset by half an ulp so the value stays in (0,1).
  return (static_cast<double>(bits(index) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t index) const {
  const double u1 = uniform(2 * index);
  const double u2 = uniform(2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

CounterRng CounterRng::split(std::uint64_t stream) const {
  return CounterRng(mix(seed_ ^ kSplitSalt) ^ bits(stream));
}

}  // namespace scorematch
