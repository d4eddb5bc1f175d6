#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace hpmg {

// Deterministic random stream based on splitmix64. We roll our own instead of
// using <random> distributions because their output is implementation-defined
// and every experiment here must be replayable bit-for-bit from its seed.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  // Derives an independent substream from a seed and a list of integer tags
  // (level, trial index, replication index, ...).
  static RngStream derive(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t h = mix(seed);
    for (std::uint64_t t : tags) h = mix(h ^ t);
    return RngStream(h);
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Lemire's multiply-shift with rejection.
  std::uint64_t next_below(std::uint64_t n) {
    while (true) {
      std::uint64_t x = next_u64();
      __uint128_t m = static_cast<__uint128_t>(x) * n;
      std::uint64_t lo = static_cast<std::uint64_t>(m);
      if (lo >= n || lo >= (0ULL - n) % n) return static_cast<std::uint64_t>(m >> 64);
    }
  }

  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Knuth's product-of-uniforms sampler; fine for the contact means used here
  // (lambda up to ~30; exp(-lambda) stays well above double underflow).
  int next_poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    const double limit = std::exp(-lambda);
    int k = 0;
    double prod = next_double();
    while (prod > limit) {
      ++k;
      prod *= next_double();
    }
    return k;
  }

 private:
  std::uint64_t state_;
};

}  // namespace hpmg
