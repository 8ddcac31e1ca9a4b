#pragma once

#include <cmath>
#include <cstdint>

namespace ucr {

// Counter-based SplitMix64 stream. The n-th draw depends only on (seed, n),
// so fixtures regenerate identically on any platform; the algorithm is the
// standard SplitMix64 finalizer over an incrementing Weyl state.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Poisson by CDF inversion of a single uniform draw; exact and portable
  // for the small means used here.
  int poisson(double mean) {
    double u = uniform();
    double p = std::exp(-mean);
    double cdf = p;
    int k = 0;
    while (u > cdf && k < 1000) {
      ++k;
      p *= mean / k;
      cdf += p;
    }
    return k;
  }

 private:
  std::uint64_t state_;
};

}  // namespace ucr
