/* Copyright 2026 The BECR Authors. All Rights Reserved.

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

#ifndef BECR_RNG_HPP_
#define BECR_RNG_HPP_

#include <cmath>
#include <cstdint>

namespace becr {

// SplitMix64 (the 64-bit finalizer-based generator from Steele, Lea & Flood's
// "Fast splittable pseudorandom number generators"). Counter-based under the
// hood: output i of seed s is mix(s + (i+1)*golden), so streams are cheap to
// derive and results depend only on (seed, call index). Used everywhere a
// seeded, reproducible stream is needed (k-means++ seeding, synthetic batches).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1), 53 mantissa bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound) via Lemire's multiply-shift. bound > 0.
  std::uint64_t next_below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  // Standard normal via Box-Muller. One value per call; deterministic.
  double next_gaussian() {
    const double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Independent child stream.
  SplitMix64 split() { return SplitMix64(next() ^ 0x5851F42D4C957F2DULL); }

 private:
  std::uint64_t state_;
};

}  // namespace becr

#endif  // BECR_RNG_HPP_
