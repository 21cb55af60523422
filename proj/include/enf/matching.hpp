// Copyright (c) enfkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "enf/model.hpp"

namespace enf {

enum class MetricKind { Mse, Cc };

// Direct evaluates every offset with plain per-window loops; Fft uses the
// cross-correlation fast path plus exact re-evaluation around the optimum.
// Auto picks by problem size. Both routes agree to tight tolerance and are
// cross-checked in the test suite.
enum class MatchMethod { Auto, Direct, Fft };

struct MatchOutcome {
  std::size_t k_hat = 0;
  MetricKind metric_kind = MetricKind::Mse;
  double best_value = 0.0;
  std::vector<double> trace;  // per offset; NaN marks undefined CC offsets
  std::size_t num_offsets = 0;
  double resolution_spp = 1.0;
};

struct MatchConfig {
  int epsilon_samples = 10;
  std::optional<std::int64_t> ground_truth_k0;
};

struct MatchDecision {
  bool success = false;
  std::uint64_t abs_error_samples = 0;
  double error_seconds = 0.0;
};

struct CensusConfig {
  std::vector<double> thresholds{0.8, 0.9, 0.99};
};

// Histogram bins span [-1, 1] at width 0.1; the top bin includes CC = 1.
struct CensusResult {
  std::vector<std::size_t> counts;  // offsets with CC >= thresholds[i]
  std::array<std::size_t, 20> histogram{};
  std::size_t num_valid_offsets = 0;
  std::size_t num_offsets = 0;
};

// Slides test across reference and minimizes sum_n (t[n] - r[n+k])^2 over
// k in [0, len(ref)-len(test)]. Ties resolve to the smallest offset.
MatchOutcome match_mse(const EnfSeries& test, const EnfSeries& reference,
                       MatchMethod method = MatchMethod::Auto);

// Maximizes the per-offset Pearson correlation. Zero-variance reference
// windows are marked NaN and excluded; a zero-variance test is an error.
MatchOutcome match_cc(const EnfSeries& test, const EnfSeries& reference,
                      MatchMethod method = MatchMethod::Auto);

// Success iff |k_hat - k0| < epsilon (strict).
MatchDecision decide(const MatchOutcome& outcome, const MatchConfig& cfg);

// Threshold counts and histogram computed from an existing CC outcome.
CensusResult census_from_trace(const MatchOutcome& cc_outcome, const CensusConfig& cfg);

// match_cc followed by census_from_trace.
CensusResult census_similar(const EnfSeries& test, const EnfSeries& reference,
                            const CensusConfig& cfg, MatchMethod method = MatchMethod::Auto);

}  // namespace enf
