#pragma once

#include <array>
#include <cstdint>

namespace ppdiag {

// Seedable random source with a fixed, documented algorithm so that a given
// seed produces the same stream on every platform and build.
//
// Engine: xoshiro256** (Blackman & Vigna), state initialized from the seed by
// four steps of splitmix64. Derived streams for parallel work come from
// split(key): stream seed = splitmix64(seed + (key + 1) * 0x9E3779B97F4A7C15),
// which depends only on (seed, key), never on draw order.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();

  // Uniform on the open interval (0, 1); never returns 0 or 1, so logs of
  // draws are always finite.
  double uniform01();

  // Exponential with the given rate; strictly positive.
  double exponential(double rate);

  // Standard normal via Box-Muller (one value per call, two uniforms).
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }

  bool bernoulli(double p) { return uniform01() < p; }

  // Independent stream determined by (seed, key) alone.
  RandomSource split(std::uint64_t key) const;

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_;
};

}  // namespace ppdiag
