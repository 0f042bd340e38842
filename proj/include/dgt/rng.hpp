#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace dgt {

// SplitMix64 step. Used for seeding and for deriving independent substream
// seeds from a base seed and a stream index.
std::uint64_t splitmix64(std::uint64_t& state);

// Derives a seed for substream `stream` of `base`. Pure function.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// xoshiro256** 1.0 (Blackman & Vigna), seeded from a single 64-bit value via
// SplitMix64. All distributions below are implemented here rather than with
// <random> distributions so that streams are identical across standard
// library implementations.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() { return next(); }
  result_type next();

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t uniform_below(std::uint64_t bound);

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  // Standard normal via the Marsaglia polar method.
  double normal();

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::array<std::uint64_t, 4> s_{};
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dgt
