#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace pma {

/// Uniform double in [0, 1) from the raw 64-bit stream. The mt19937_64
/// output sequence is fixed by the standard, so results are identical
/// across standard libraries, unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1.0p-53;
}

/// Box-Muller standard normal sampler on top of uniform01, again to keep
/// sequences portable across standard libraries.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = (double((rng_() >> 11)) + 0.5) * 0x1.0p-53;  // (0, 1)
    const double u2 = uniform01(rng_);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace pma
