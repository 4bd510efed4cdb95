// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace rhsradar {

// Deterministic substream RNG. Every trial / purpose gets its own engine
// seeded from (base seed, tag, index) so draws are reproducible no matter
// how the surrounding loops are scheduled. Normals are generated by
// Box-Muller with a fixed cost of two engine words per draw; no state is
// cached between calls, so the g-th sample of a stream always consumes
// words [2g, 2g+2) and prefixes of a stream are stable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(mix(seed)) {}

  Rng(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0)
      : eng_(mix(mix(seed ^ fnv1a(tag)) ^ (0x9e3779b97f4a7c15ULL * (index + 1)))) {}

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  // standard normal, two engine words per call
  double normal() {
    double u1 = static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    double u2 = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // circularly-symmetric complex normal with E|z|^2 = var
  std::complex<double> cnormal(double var) {
    double s = std::sqrt(var / 2.0);
    double re = normal();
    double im = normal();
    return {s * re, s * im};
  }

  std::uint64_t word() { return eng_(); }

 private:
  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ULL;
    }
    return h;
  }

  // splitmix64 finalizer, decorrelates nearby seeds
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::mt19937_64 eng_;
};

}  // namespace rhsradar
