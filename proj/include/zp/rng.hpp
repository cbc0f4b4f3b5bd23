/* Copyright 2026 The ZeroProver Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef ZP_RNG_HPP
#define ZP_RNG_HPP

#include <cmath>
#include <cstdint>
#include <string_view>

namespace zp {

// Deterministic, platform-independent RNG (splitmix64). All randomness in the
// project flows through this type so that runs are reproducible bit-for-bit
// regardless of standard library or thread count.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, n). n must be > 0.
  uint64_t next_below(uint64_t n) { return next_u64() % n; }

  // Uniform integer in [lo, hi] inclusive.
  int next_int(int lo, int hi) {
    return lo + static_cast<int>(next_below(static_cast<uint64_t>(hi - lo + 1)));
  }

  // Box-Muller; one fresh draw per call, no cached second value.
  double next_normal(double mean, double stddev) {
    double u1 = next_double();
    double u2 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    return mean + stddev * z;
  }

  // exp(N(0,1)).
  double next_lognormal() { return std::exp(next_normal(0.0, 1.0)); }

 private:
  uint64_t state_;
};

inline uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline uint64_t hash_tag(std::string_view tag) {
  uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Derives an independent substream seed from a root seed, a purpose tag and up
// to two indices. Used as Rng(mix_seed(seed, "round", r, goal)).
inline uint64_t mix_seed(uint64_t seed, std::string_view tag, uint64_t a = 0,
                         uint64_t b = 0) {
  uint64_t h = mix64(seed ^ 0x6a09e667f3bcc909ULL);
  h = mix64(h ^ hash_tag(tag));
  h = mix64(h ^ (a + 0x9e3779b97f4a7c15ULL));
  h = mix64(h ^ (b + 0x3c6ef372fe94f82aULL));
  return h;
}

}  // namespace zp

#endif  // ZP_RNG_HPP
