// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0
//
// Seeded randomness with transforms pinned in this file. std::mt19937_64 is
// bit-exact by the standard, but the standard *distributions* are not, so the
// uniform / gaussian / integer / shuffle transforms are hand-rolled here and
// never change. Every random artifact in the project flows through this type,
// which is what makes byte-identical replay possible.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "ttrec/error.hpp"

namespace ttrec {

// splitmix64; used to derive independent subordinate seeds from one base seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Subordinate seed for a named stream. Streams are small documented constants;
// the same (base, stream) pair always yields the same seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(base ^ (stream * 0x9E3779B97F4A7C15ull));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1): top 53 bits of the generator scaled by 2^-53.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Standard normal via Box-Muller, cosine branch. One normal per two
  // uniforms; the spare sine value is intentionally not cached so the
  // generator state after n draws does not depend on call parity.
  double gaussian() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();  // log(0) guard; probability 2^-53
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    return r * std::cos(kTwoPi * u2);
  }

  // Uniform integer in [0, n), unbiased via rejection sampling.
  std::uint64_t uniform_u64_below(std::uint64_t n) {
    require(n > 0, Errc::invalid_argument, "uniform_u64_below: n must be positive");
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t x = gen_();
      if (x >= threshold) return x % n;
    }
  }

  // Fisher-Yates with the pinned integer draw above.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_u64_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace ttrec
