// Copyright (c) enfkit authors
// SPDX-License-Identifier: Apache-2.0

#include "enf/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "enf/common.hpp"
#include "enf/fft.hpp"

namespace enf {

namespace {

struct FrameGeometry {
  std::size_t frame_len;
  std::size_t hop;
};

FrameGeometry geometry(const EstimatorConfig& cfg, double sample_rate_hz) {
  if (!(sample_rate_hz > 0.0)) throw ValidationError("estimator: sample rate must be positive");
  if (!(cfg.step_s > 0.0)) throw ValidationError("estimator: step must be positive");
  if (cfg.frame_len_s < cfg.step_s) {
    throw ValidationError("estimator: frame length must be >= step");
  }
  if (!(cfg.band_halfwidth_hz > 0.0) || cfg.band_center_hz - cfg.band_halfwidth_hz <= 0.0) {
    throw ValidationError("estimator: band must be positive and sit above 0 Hz");
  }
  if (cfg.fft_zero_pad_factor < 1) throw ValidationError("estimator: pad factor must be >= 1");

  FrameGeometry g;
  g.frame_len = static_cast<std::size_t>(std::llround(cfg.frame_len_s * sample_rate_hz));
  g.hop = static_cast<std::size_t>(std::llround(cfg.step_s * sample_rate_hz));
  if (g.frame_len < 4) throw ValidationError("estimator: frame shorter than 4 samples");
  if (g.hop < 1) throw ValidationError("estimator: step below one sample period (1/delta > f_S)");
  return g;
}

std::vector<double> make_window(Window w, std::size_t n) {
  std::vector<double> out(n, 1.0);
  switch (w) {
    case Window::Rectangular:
      break;
    case Window::Hann:
      for (std::size_t i = 0; i < n; ++i) {
        out[i] = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n));
      }
      break;
    case Window::Hamming:
      for (std::size_t i = 0; i < n; ++i) {
        out[i] = 0.54 - 0.46 * std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n));
      }
      break;
  }
  return out;
}

// Shared per-frame machinery so estimate_if builds the window and FFT plan
// once for thousands of frames.
class FrameEstimator {
public:
  FrameEstimator(const EstimatorConfig& cfg, double sample_rate_hz, std::size_t frame_len)
      : cfg_(cfg),
        rate_(sample_rate_hz),
        window_(make_window(cfg.window, frame_len)),
        nfft_(Fft::next_pow2(frame_len * static_cast<std::size_t>(cfg.fft_zero_pad_factor))),
        fft_(nfft_),
        buf_(nfft_) {
    const double bin_hz = rate_ / static_cast<double>(nfft_);
    const double lo_hz = cfg_.band_center_hz - cfg_.band_halfwidth_hz;
    const double hi_hz = cfg_.band_center_hz + cfg_.band_halfwidth_hz;
    lo_ = static_cast<std::size_t>(std::max(0.0, std::ceil(lo_hz / bin_hz - 1e-9)));
    hi_ = static_cast<std::size_t>(std::floor(hi_hz / bin_hz + 1e-9));
    hi_ = std::min(hi_, nfft_ / 2);
    if (lo_ > hi_) throw ValidationError("estimator: band contains no FFT bin");
  }

  FrameEstimate estimate(std::span<const double> frame) {
    if (frame.size() != window_.size()) throw ValidationError("estimator: frame length mismatch");
    bool any_nonzero = false;
    for (std::size_t i = 0; i < frame.size(); ++i) {
      if (frame[i] != 0.0) any_nonzero = true;
      buf_[i] = {frame[i] * window_[i], 0.0};
    }
    if (!any_nonzero) throw ValidationError("estimator: all-zero frame");
    std::fill(buf_.begin() + static_cast<std::ptrdiff_t>(frame.size()), buf_.end(),
              std::complex<double>{0.0, 0.0});
    fft_.forward(buf_);

    std::size_t peak = lo_;
    double peak_mag = -1.0;
    for (std::size_t k = lo_; k <= hi_; ++k) {
      const double m = std::norm(buf_[k]);
      if (m > peak_mag) {
        peak_mag = m;
        peak = k;
      }
    }
    if (!(peak_mag > 0.0)) throw ValidationError("estimator: no energy inside the band");

    const double bin_hz = rate_ / static_cast<double>(nfft_);
    FrameEstimate out;
    if (peak > lo_ && peak < hi_) {
      const double ma = std::norm(buf_[peak - 1]);
      const double mc = std::norm(buf_[peak + 1]);
      if (ma > 0.0 && mc > 0.0) {
        const double alpha = std::log(ma);
        const double beta = std::log(peak_mag);
        const double gamma = std::log(mc);
        const double denom = alpha - 2.0 * beta + gamma;
        const double offset = (denom != 0.0) ? 0.5 * (alpha - gamma) / denom : 0.0;
        if (std::isfinite(offset) && std::fabs(offset) <= 1.0) {
          out.frequency_hz = (static_cast<double>(peak) + offset) * bin_hz;
          out.interpolated = true;
          return out;
        }
      }
    }
    out.frequency_hz = static_cast<double>(peak) * bin_hz;
    out.interpolated = false;
    return out;
  }

private:
  EstimatorConfig cfg_;
  double rate_;
  std::vector<double> window_;
  std::size_t nfft_;
  Fft fft_;
  std::vector<std::complex<double>> buf_;
  std::size_t lo_ = 0;
  std::size_t hi_ = 0;
};

}  // namespace

std::vector<FrameIndex> frame_signal(const TadSignal& signal, const EstimatorConfig& cfg) {
  const FrameGeometry g = geometry(cfg, signal.sample_rate_hz);
  if (signal.samples.size() < g.frame_len) {
    throw ValidationError("frame_signal: signal shorter than one frame");
  }
  const std::size_t count = (signal.samples.size() - g.frame_len) / g.hop + 1;
  std::vector<FrameIndex> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    FrameIndex fi;
    fi.offset = i * g.hop;
    fi.length = g.frame_len;
    fi.center_time_s =
        static_cast<double>(fi.offset) / signal.sample_rate_hz + cfg.frame_len_s / 2.0;
    out.push_back(fi);
  }
  return out;
}

FrameEstimate estimate_frame_frequency(std::span<const double> frame,
                                       const EstimatorConfig& cfg, double sample_rate_hz) {
  geometry(cfg, sample_rate_hz);  // validates config
  FrameEstimator est(cfg, sample_rate_hz, frame.size());
  return est.estimate(frame);
}

EnfSeries estimate_if(const TadSignal& signal, const EstimatorConfig& cfg) {
  const std::vector<FrameIndex> frames = frame_signal(signal, cfg);
  FrameEstimator est(cfg, signal.sample_rate_hz, frames.front().length);

  EnfSeries out;
  out.resolution_spp = cfg.step_s;
  out.nominal_hz = cfg.band_center_hz;
  out.start_offset_s = frames.front().center_time_s;
  out.samples.reserve(frames.size());
  for (const FrameIndex& fi : frames) {
    const std::span<const double> frame(signal.samples.data() + fi.offset, fi.length);
    out.samples.push_back(est.estimate(frame).frequency_hz);
  }
  return out;
}

}  // namespace enf
