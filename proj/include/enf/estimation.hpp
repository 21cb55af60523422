// Copyright (c) enfkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "enf/model.hpp"
#include "enf/synthesis.hpp"

namespace enf {

enum class Window { Hann, Hamming, Rectangular };

// STFT single-tone estimator settings. step_s is the hop and becomes the
// temporal resolution delta of the extracted series.
struct EstimatorConfig {
  double frame_len_s = 16.0;
  double step_s = 1.0;
  double band_center_hz = 50.0;
  double band_halfwidth_hz = 1.0;
  int fft_zero_pad_factor = 4;
  Window window = Window::Hann;
};

struct FrameIndex {
  std::size_t offset;     // first sample of the frame
  std::size_t length;     // samples per frame
  double center_time_s;   // frame start + frame_len/2, in signal time
};

struct FrameEstimate {
  double frequency_hz = 0.0;
  bool interpolated = true;  // false when the peak sat on a band edge
};

// Overlapping frame layout: length round(frame_len_s*f_S) at hop
// round(step_s*f_S), trailing partial frame discarded. Throws when the
// signal is shorter than one frame.
std::vector<FrameIndex> frame_signal(const TadSignal& signal, const EstimatorConfig& cfg);

// Windowed, zero-padded FFT peak within the configured band, refined by
// parabolic interpolation over log magnitudes of the peak and neighbors.
FrameEstimate estimate_frame_frequency(std::span<const double> frame,
                                       const EstimatorConfig& cfg, double sample_rate_hz);

// Runs the per-frame estimator over the whole signal. The result has
// resolution_spp = step_s, nominal_hz = band_center_hz, and start_offset_s
// at the first frame center.
EnfSeries estimate_if(const TadSignal& signal, const EstimatorConfig& cfg);

}  // namespace enf
