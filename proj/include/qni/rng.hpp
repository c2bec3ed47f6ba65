// Copyright 2026 The qni Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace qni {

// All randomness in the library flows from a single 64-bit master seed.
// Child streams are derived with the splitmix64 finalizer below, so runs
// are bit-reproducible across platforms: std::mt19937_64 has a fully
// specified algorithm, and uniform doubles are built from the top 53 bits
// of the raw engine output rather than std::uniform_real_distribution
// (whose mapping is implementation-defined).

inline constexpr std::uint64_t kSeedGolden = 0x9e3779b97f4a7c15ULL;

/// splitmix64 finalizer (Steele, Lea, Flood 2014). Bijective 64-bit mix.
inline std::uint64_t mix64(std::uint64_t z) {
  z += kSeedGolden;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent child seed for stream index `stream`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ mix64(stream));
}

/// Derives a child seed along a path of stream indices, e.g.
/// {restart, step, angle}. Order-sensitive.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = seed;
  for (std::uint64_t p : path) s = derive_seed(s, p);
  return s;
}

/// Seedable generator with a platform-stable uniform mapping.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Rejection-free modulo is fine here; bias is < 2^-53 relative for the
    // small n used (shuffles, index picks) and keeps the draw count fixed.
    return engine_() % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qni
