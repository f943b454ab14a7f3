#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace ifsq {

/// Seeded 64-bit Mersenne Twister with one independent stream per
/// (seed, stream id). Both std::mt19937_64 and std::seed_seq are specified
/// bit-exactly by the standard, and the double conversion below avoids the
/// implementation-defined std distributions, so sequences are identical
/// across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32), 0x1f5a3cu};
    engine_.seed(seq);
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Index drawn from a cumulative distribution whose last entry is the total.
  std::size_t categorical(std::span<const double> cumulative) {
    const double u = uniform() * cumulative.back();
    std::size_t lo = 0;
    std::size_t hi = cumulative.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (u < cumulative[mid]) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    return lo;
  }

 private:
  std::mt19937_64 engine_;
};

inline std::vector<double> cumulative_sums(std::span<const double> weights) {
  std::vector<double> out(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    out[i] = acc;
  }
  return out;
}

}  // namespace ifsq
