// Copyright (c) enfkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "enf/estimation.hpp"
#include "enf/matching.hpp"
#include "enf/model.hpp"

namespace enf {

// Synthetic: reference ENF drawn from the AR(1) model and perturbed
// directly in the time-frequency domain. Waveform: full pipeline with the
// STFT estimator in the loop. WhiteGaussian: i.i.d. benchmark series.
enum class Scheme { Synthetic, Waveform, WhiteGaussian };

// One reliability trial's factor assignment. snr_db may be +infinity for
// the noise-free case.
struct ExperimentSpec {
  Scheme scheme = Scheme::Synthetic;
  double l_t_s = 300.0;     // test length, seconds
  double l_r_s = 604800.0;  // reference length (match scope), seconds
  double delta_spp = 1.0;
  double snr_db = -25.0;
  int epsilon_samples = 10;
  double epsilon_s = 0.0;  // when > 0, overrides epsilon_samples as round(epsilon_s/delta)
  MetricKind metric = MetricKind::Cc;
  int trials = 100;
  std::uint64_t master_seed = 1;
  Ar1Params model{};            // WhiteGaussian draws sigma = model.sigma_x
  EstimatorConfig estimator{};  // Waveform only; step/band come from delta/nominal
  double sample_rate_hz = 400.0;
  double nominal_hz = 50.0;
  int crlb_frame_len = 6400;    // N_F of the TFD noise model
  std::string reference_file;   // Waveform: optional ENFT/WAV backing
  int threads = 0;              // 0 = hardware concurrency
};

struct TrialResult {
  int trial_index = 0;
  std::int64_t k0 = 0;
  std::int64_t k_hat = 0;
  std::uint64_t abs_error_samples = 0;
  bool success = false;
  double best_metric_value = 0.0;
};

struct CensusSummary {
  std::vector<double> thresholds;
  std::vector<double> mean_counts;  // averaged over trials
};

struct GridPointReport {
  double l_t_s = 0.0;
  double l_r_s = 0.0;
  double delta_spp = 1.0;
  double snr_db = 0.0;
  bool valid = true;
  std::string error;
  std::string backing;
  int trials = 0;
  double accuracy = 0.0;
  double mean_abs_error_s = 0.0;
  double mean_best_metric = 0.0;
  CensusSummary census;
  std::vector<TrialResult> trial_results;
};

struct AccuracyReport {
  Scheme scheme = Scheme::Synthetic;
  std::vector<GridPointReport> points;
};

// Factor grid; an empty dimension falls back to the base spec's value.
struct FactorGrid {
  std::vector<double> l_t_s;
  std::vector<double> l_r_s;
  std::vector<double> delta_spp;
  std::vector<double> snr_db;
};

// Throws ValidationError if the spec violates any invariant (L_T > L_R,
// 1/delta > f_S, non-positive factors, waveform geometry, ...).
void validate_spec(const ExperimentSpec& spec);

// Per-trial: synthesize the AR(1) reference, slice a random test segment,
// record k0, perturb the test via the CRLB noise model, match, decide.
// Every trial derives its own RNG streams from (master_seed, grid point,
// trial index), so results are independent of worker count.
std::vector<TrialResult> run_scheme1(const ExperimentSpec& spec);

// Same protocol with the reference i.i.d. Gaussian instead of AR(1).
std::vector<TrialResult> run_white_benchmark(const ExperimentSpec& spec);

// Waveform-level protocol: the reference is a TAD signal (loaded from
// reference_file or synthesized), the test is a random TAD slice with AWGN,
// and both sides pass through the STFT estimator before matching. The
// reference is prepared once; trials vary the slice and the noise.
std::vector<TrialResult> run_scheme2(const ExperimentSpec& spec);

// Runs the base spec's scheme at every grid point with per-point derived
// seeds. Invalid points are reported with their error, not dropped. Grid
// iteration order does not affect any result.
AccuracyReport sweep(const FactorGrid& grid, const ExperimentSpec& base);

// Tolerance in samples actually applied: epsilon_samples, or
// max(1, round(epsilon_s / delta_spp)) when epsilon_s is set.
int effective_epsilon(const ExperimentSpec& spec);

// Success probability of a uniformly random matched offset under the
// |k_hat - k0| < epsilon rule: (2*epsilon - 1) / num_offsets.
double chance_floor(const ExperimentSpec& spec);

// Decimates fine synthetic ENF (1 spp) by each factor and refits the AR(1)
// coefficient; returns (factor, mean fitted a) averaged over repeats.
std::vector<std::pair<int, double>> ar_coefficient_vs_decimation(
    const Ar1Params& model, const std::vector<int>& factors, std::size_t fine_length,
    int repeats, std::uint64_t seed);

}  // namespace enf
