// Copyright (c) enfkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace enf {

// A uniformly sampled instantaneous-frequency sequence. resolution_spp is
// the temporal resolution delta in seconds per point; the implied sampling
// rate of the series is 1/resolution_spp Hz. start_offset_s positions the
// first sample relative to the reference origin.
struct EnfSeries {
  std::vector<double> samples;  // Hz
  double resolution_spp = 1.0;
  double nominal_hz = 50.0;
  double start_offset_s = 0.0;

  std::size_t size() const { return samples.size(); }
  double duration_s() const { return static_cast<double>(samples.size()) * resolution_spp; }
};

// First-order autoregressive model f[n] = a*f[n-1] + x[n], with innovation
// x[n] ~ N(0, sigma_x^2). Stable for |a| < 1.
struct Ar1Params {
  double a = 0.99;
  double sigma_x = 3e-3;  // Hz

  // Standard deviation of the stationary process, sigma_x / sqrt(1 - a^2).
  double stationary_sigma() const;
};

struct SpectrumEstimate {
  std::vector<double> frequencies;  // Hz, 0 .. 1/(2*delta)
  std::vector<double> energy_db;    // dB relative to the peak bin
  double peak_power = 0.0;          // linear one-sided periodogram peak
};

// Contiguous sub-series [start, start+count); start_offset_s advances by
// start * resolution_spp.
EnfSeries slice(const EnfSeries& enf, std::size_t start, std::size_t count);

// Generates length samples of the AR(1) process around nominal_hz, with
// f[-1] = 0 before the nominal is added back. Reproducible per seed.
EnfSeries synthesize_ar1(std::size_t length, const Ar1Params& params, double resolution_spp,
                         double nominal_hz, std::uint64_t seed);

// Order-1 Yule-Walker fit on the mean-removed series using biased sample
// autocorrelations: a = r[1]/r[0], sigma_x = sqrt(r[0]*(1 - a^2)). The
// biased estimator keeps |a| <= 1. Throws on (near-)constant input.
Ar1Params fit_ar1(const EnfSeries& enf);

// Rectangular-window periodogram of the mean-removed series, one-sided,
// normalized so the peak bin is 0 dB. fft_length must be >= the series
// length and is rounded up to the next power of two.
SpectrumEstimate energy_density_spectrum(const EnfSeries& enf, std::size_t fft_length);

}  // namespace enf
