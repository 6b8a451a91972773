#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>

namespace expcorr {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent 64-bit seed from a base seed and a tuple of counters.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> counters) noexcept {
  std::uint64_t key = mix64(seed ^ 0x5851f42d4c957f2dULL);
  for (std::uint64_t c : counters) key = mix64(key ^ mix64(c));
  return key;
}

/// Random stream keyed by a seed and a tuple of counters.
///
/// Two streams with the same (seed, counters) produce identical sequences,
/// independent of which thread creates them or in what order, which is what
/// makes parallel resampling reproducible. The generator is xoshiro256**;
/// uniform and Gaussian variates are produced by portable code paths so
/// output does not depend on the standard library implementation.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::initializer_list<std::uint64_t> counters);

  std::uint64_t next_u64() noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept;

  /// Uniform integer in [0, bound) without modulo bias; bound > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;

  /// Standard normal deviate (Marsaglia polar method).
  double normal() noexcept;

  double normal(double mean, double sd) noexcept { return mean + sd * normal(); }

  /// Shuffles the first `count` positions of `values` into a uniformly random
  /// draw without replacement (partial Fisher-Yates).
  template <class T>
  void partial_shuffle(std::span<T> values, std::size_t count) noexcept {
    const std::size_t n = values.size();
    if (count > n) count = n;
    for (std::size_t i = 0; i < count && i + 1 < n; ++i) {
      const auto j = i + static_cast<std::size_t>(below(n - i));
      using std::swap;
      swap(values[i], values[j]);
    }
  }

 private:
  std::uint64_t state_[4];
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace expcorr
