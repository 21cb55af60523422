// Copyright (c) enfkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "enf/model.hpp"

namespace enf {

// Time-amplitude-domain waveform sampled at sample_rate_hz.
struct TadSignal {
  std::vector<double> samples;
  double sample_rate_hz = 400.0;

  std::size_t size() const { return samples.size(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

struct TadSynthesisParams {
  double amplitude = 1.0;                  // used when amplitude_profile is empty
  std::vector<double> amplitude_profile;   // optional per-sample A[n] > 0
  double initial_phase_rad = 0.0;
  double sample_rate_hz = 400.0;
};

// Parameters of the direct time-frequency-domain noise model. The
// perturbation variance is the Cramer-Rao bound of a single-tone frequency
// estimate over a frame of frame_len_samples at the given SNR.
struct TfdNoiseParams {
  double snr_linear = 1.0;
  int frame_len_samples = 6400;  // N_F
  double sample_rate_hz = 400.0;
};

// Contiguous waveform sub-range [start, start+count).
TadSignal slice(const TadSignal& signal, std::size_t start, std::size_t count);

// Cosine carrier with instantaneous frequency given per output sample:
// s[n] = A[n] * cos(2*pi*T*sum_{i<=n} f[i] + phi). The phase is accumulated
// incrementally and wrapped, so cost is linear in the sample count. The ENF
// resolution must equal one output sample period; use upsample_enf first
// for coarser series.
TadSignal synthesize_tad(const EnfSeries& enf, const TadSynthesisParams& params);

// Zero-order-hold expansion to target_rate_hz: each ENF value is repeated
// for its delta-second interval. Non-integer ratios distribute counts so
// per-interval lengths differ by at most one sample.
EnfSeries upsample_enf(const EnfSeries& enf, double target_rate_hz);

// Adds white Gaussian noise with variance sum(s^2)/(N*snr_linear), so the
// expected realized energy ratio equals snr_linear. snr_linear may be
// +infinity (returns the signal unchanged).
TadSignal add_awgn(const TadSignal& signal, double snr_linear, std::uint64_t seed);

// 12 / (SNR * N_F * (N_F^2 - 1)) * (f_S / 2*pi)^2, in Hz^2.
double crlb_frequency_variance(const TfdNoiseParams& p);

// Direct noisy-ENF synthesis: f[n] + e[n] with e ~ N(0, CRLB variance).
// Skips waveform synthesis and estimation entirely.
EnfSeries synthesize_noisy_enf_tfd(const EnfSeries& enf, const TfdNoiseParams& p,
                                   std::uint64_t seed);

}  // namespace enf
