// Copyright 2026  dsaug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef DSAUG_RNG_HPP
#define DSAUG_RNG_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace dsaug {

// Deterministic 64-bit stream (splitmix64). Unlike the std distributions,
// every draw here is fully specified, so outputs are identical across
// platforms and standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound), bound > 0. Rejection sampling, no modulo bias.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t(0) - ~std::uint64_t(0) % bound;
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % bound;
  }

  // Uniform in [0, 1).
  double next_real() {
    return double(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller.
  double next_normal();

  bool next_bernoulli(double p) { return next_real() < p; }

  // `count` distinct values from {0,...,n-1}, ascending order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                      std::size_t count);

 private:
  std::uint64_t state_;
};

inline double Rng::next_normal() {
  double u1, u2;
  do {
    u1 = next_real();
  } while (u1 <= 0.0);
  u2 = next_real();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
}

inline std::vector<std::size_t> Rng::sample_without_replacement(
    std::size_t n, std::size_t count) {
  // Reservoir sampling keeps the draw count proportional to n, which stays
  // cheap at the grid sizes used here.
  std::vector<std::size_t> sample;
  sample.reserve(count);
  for (std::size_t i = 0; i < count; ++i) sample.push_back(i);
  for (std::size_t i = count; i < n; ++i) {
    std::size_t j = std::size_t(next_below(i + 1));
    if (j < count) sample[j] = i;
  }
  std::sort(sample.begin(), sample.end());
  return sample;
}

// Stable FNV-1a over the concatenated byte images of the parts. Used to
// derive per-utterance streams so batch output is order-independent.
inline std::uint64_t stable_hash(std::uint64_t seed, std::string_view text,
                                 std::uint64_t index) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint8_t byte) {
    h ^= byte;
    h *= 0x100000001b3ULL;
  };
  for (int i = 0; i < 8; ++i) mix(std::uint8_t(seed >> (8 * i)));
  for (char c : text) mix(std::uint8_t(c));
  for (int i = 0; i < 8; ++i) mix(std::uint8_t(index >> (8 * i)));
  return h;
}

}  // namespace dsaug

#endif  // DSAUG_RNG_HPP
