#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace ctmap {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: every (seed, stream, index) triple maps to a fixed
/// 64-bit value, so per-pixel draws do not depend on visiting order or on the
/// platform's <random> distributions.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t bits(std::uint64_t stream, std::uint64_t index) const noexcept {
    return mix64(mix64(seed_ ^ mix64(stream)) + index);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform(std::uint64_t stream, std::uint64_t index) const noexcept {
    return static_cast<double>(bits(stream, index) >> 11) * 0x1.0p-53;
  }

  /// Standard normal by Box-Muller over two sub-streams.
  double normal(std::uint64_t stream, std::uint64_t index) const noexcept {
    const double u1 = 1.0 - uniform(2 * stream, index);  // (0, 1]
    const double u2 = uniform(2 * stream + 1, index);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Uniform integer in [0, n) by multiply-shift.
  std::uint64_t below(std::uint64_t stream, std::uint64_t index, std::uint64_t n) const noexcept {
    __extension__ using Wide = unsigned __int128;
    return static_cast<std::uint64_t>((static_cast<Wide>(bits(stream, index)) * n) >> 64);
  }

 private:
  std::uint64_t seed_;
};

/// Sequential stream on top of CounterRng, for generators that draw in order.
class SequentialRng {
 public:
  explicit SequentialRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept : rng_(seed), stream_(stream) {}

  double uniform() noexcept { return rng_.uniform(stream_, next_++); }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi) noexcept {  // inclusive
    return lo + static_cast<int>(rng_.below(stream_, next_++, static_cast<std::uint64_t>(hi - lo + 1)));
  }

 private:
  CounterRng rng_;
  std::uint64_t stream_;
  std::uint64_t next_ = 0;
};

}  // namespace ctmap
