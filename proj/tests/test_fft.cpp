// Copyright (c) enfkit authors
// SPDX-License-Identifier: Apache-2.0

#include "enf/fft.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "enf/common.hpp"

using namespace enf;

namespace {

// Quadratic-cost DFT used as the transform oracle.
std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
      const double ang = -kTwoPi * static_cast<double>(k * j) / static_cast<double>(n);
      acc += x[j] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

}  // namespace

TEST_CASE("fft matches the naive DFT") {
  std::mt19937_64 eng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t n : {2u, 8u, 64u, 256u}) {
    std::vector<std::complex<double>> x(n);
    for (auto& v : x) v = {u(eng), u(eng)};
    std::vector<std::complex<double>> got = x;
    Fft(n).forward(got);
    const std::vector<std::complex<double>> want = naive_dft(x);
    for (std::size_t k = 0; k < n; ++k) {
      CHECK(std::abs(got[k] - want[k]) < 1e-9);
    }
  }
}

TEST_CASE("fft inverse round trip") {
  std::mt19937_64 eng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::complex<double>> x(1024);
  for (auto& v : x) v = {u(eng), u(eng)};
  std::vector<std::complex<double>> y = x;
  Fft fft(x.size());
  fft.forward(y);
  fft.inverse(y);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(y[i] - x[i]) < 1e-12);
}

TEST_CASE("fft size must be a power of two") {
  CHECK_THROWS_AS(Fft(0), ValidationError);
  CHECK_THROWS_AS(Fft(48), ValidationError);
}

TEST_CASE("sliding dot: fft path equals the direct path") {
  std::mt19937_64 eng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t nb = 50 + static_cast<std::size_t>(eng() % 500);
    const std::size_t np = 1 + static_cast<std::size_t>(eng() % nb);
    std::vector<double> base(nb);
    std::vector<double> probe(np);
    for (auto& v : base) v = u(eng);
    for (auto& v : probe) v = u(eng);
    const std::vector<double> direct = sliding_dot_direct(probe, base);
    const std::vector<double> fast = sliding_dot_fft(probe, base);
    REQUIRE(direct.size() == fast.size());
    for (std::size_t k = 0; k < direct.size(); ++k) {
      CHECK(std::fabs(direct[k] - fast[k]) < 1e-9 * std::max(1.0, std::fabs(direct[k])));
    }
  }
}

TEST_CASE("sliding dot rejects bad shapes") {
  CHECK_THROWS_AS(sliding_dot_direct({}, {1.0}), ValidationError);
  CHECK_THROWS_AS(sliding_dot_fft({1.0, 2.0}, {1.0}), ValidationError);
}
