// Copyright (c) enfkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace enf::rng {

// All randomness in the library flows through the helpers below. The
// mt19937_64 engine output is fully specified by the standard, and the
// variate transforms here are hand-rolled, so a given seed produces the
// same stream on every platform and standard library.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stream derivation for (master_seed, stream ids...). Collision-free in
// practice and independent of evaluation order, so trials and grid points
// can run on any number of workers with identical results.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = master;
  std::uint64_t h = splitmix64(s);
  s ^= a;
  h ^= splitmix64(s);
  s ^= b + 0x165667b19e3779f9ULL;
  h ^= splitmix64(s);
  s ^= c + 0x27d4eb2f165667c5ULL;
  h ^= splitmix64(s);
  return h;
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Unbiased uniform integer in [0, n), rejection sampled.
inline std::uint64_t uniform_below(std::mt19937_64& eng, std::uint64_t n) {
  if (n == 0) return 0;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = eng();
  } while (x >= limit);
  return x % n;
}

// Standard normal via Box-Muller (cosine branch). Two engine draws per
// variate, no cached state, so the stream position after k calls is 2k.
inline double standard_normal(std::mt19937_64& eng) {
  const double u1 = 1.0 - uniform_unit(eng);  // (0, 1], keeps log finite
  const double u2 = uniform_unit(eng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace enf::rng
