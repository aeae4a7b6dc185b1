// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace blurf {

/// Counter-based deterministic RNG (splitmix64 core). Streams are derived by
/// hashing arbitrary key tuples, so any (seed, frame, row, col, ...) tuple
/// names a reproducible sequence independent of call order elsewhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed * 0x9E3779B97F4A7C15ull + 0x5851F42D4C957F2Dull) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi) {
    if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
    return lo + int(next_u64() % std::uint64_t(hi - lo + 1));
  }

  /// Standard normal via Box-Muller (one value per call; stateless pairing).
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t hash_mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
  h *= 0xFF51AFD7ED558CCDull;
  h ^= h >> 33;
  return h;
}

template <class... Keys>
std::uint64_t hash_keys(std::uint64_t seed, Keys... ks) {
  std::uint64_t h = seed ^ 0xC2B2AE3D27D4EB4Full;
  ((h = hash_mix(h, std::uint64_t(ks))), ...);
  return h;
}

/// RNG whose stream is named by a key tuple.
template <class... Keys>
Rng keyed_rng(std::uint64_t seed, Keys... ks) {
  return Rng(hash_keys(seed, ks...));
}

/// Stable 64-bit FNV-1a over bytes; used for config hashes in run records.
std::uint64_t fnv1a(const std::string& bytes);

}  // namespace blurf
