// Copyright (c) enfkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace enf {

// Thrown when operation inputs violate a documented precondition or
// parameter invariant. CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Thrown on malformed files, store inconsistencies, or uncovered data
// ranges. CLI maps this to exit code 3.
class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

inline constexpr double kInfDb = std::numeric_limits<double>::infinity();

// Power-ratio dB convention: -25 dB -> 3.1623e-3.
inline double snr_db_to_linear(double snr_db) {
  return std::pow(10.0, snr_db / 10.0);
}

inline double snr_linear_to_db(double snr_linear) {
  return 10.0 * std::log10(snr_linear);
}

inline bool nearly_equal(double a, double b, double rel_tol = 1e-9) {
  return std::fabs(a - b) <= rel_tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace enf
