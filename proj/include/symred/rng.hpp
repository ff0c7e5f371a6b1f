#pragma once

#include <cmath>
#include <cstdint>

#include "symred/common.hpp"

namespace symred {

// SplitMix64 (Steele/Lea/Flood). Chosen because it is trivially portable:
// batch instances can be regenerated from the seed in any language. The exact
// derivations below (uniform, integer range, Box-Muller normals) are part of
// the reproducibility contract and are documented in the README.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0,1): top 53 bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [lo, hi], by modulo (bias irrelevant at these ranges).
  long long uniform_int(long long lo, long long hi) {
    return lo + static_cast<long long>(next() % static_cast<uint64_t>(hi - lo + 1));
  }

  // Standard normal via Box-Muller; the cosine branch only.
  double normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * M_PI * u2);
  }

  complexd complex_normal() {
    double re = normal();
    double im = normal();
    return complexd(re, im) / std::sqrt(2.0);
  }

 private:
  uint64_t state_;
};

}  // namespace symred
