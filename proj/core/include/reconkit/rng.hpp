#pragma once

#include <cmath>
#include <cstdint>

namespace reconkit {

/* Counter-based deterministic RNG. splitmix64 of (seed, counter) gives the same
   stream on every platform, unlike <random> distributions whose output is
   implementation-defined. Gaussians come from an explicit Box-Muller transform. */
class DetRng {
 public:
  explicit DetRng(uint64_t seed) : seed_(seed) {}

  uint64_t next_u64() { return mix(seed_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  /* Uniform in [0, 1). 53 mantissa bits. */
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /* Uniform in [a, b). */
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /* Standard normal via Box-Muller; one value per call, pair cached. */
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double phi = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(phi);
    have_spare_ = true;
    return r * std::cos(phi);
  }

  /* Uniform integer in [0, n). */
  uint64_t index(uint64_t n) { return next_u64() % n; }

 private:
  static uint64_t mix(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  uint64_t seed_;
  uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace reconkit
