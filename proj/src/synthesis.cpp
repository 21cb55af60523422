// Copyright (c) enfkit authors
// SPDX-License-Identifier: Apache-2.0

#include "enf/synthesis.hpp"

#include <cmath>

#include "enf/common.hpp"
#include "enf/rng.hpp"

namespace enf {

TadSignal slice(const TadSignal& signal, std::size_t start, std::size_t count) {
  if (count == 0 || start + count > signal.samples.size()) {
    throw ValidationError("slice: range out of bounds");
  }
  TadSignal out;
  out.sample_rate_hz = signal.sample_rate_hz;
  out.samples.assign(signal.samples.begin() + static_cast<std::ptrdiff_t>(start),
                     signal.samples.begin() + static_cast<std::ptrdiff_t>(start + count));
  return out;
}

TadSignal synthesize_tad(const EnfSeries& enf, const TadSynthesisParams& params) {
  if (enf.samples.empty()) throw ValidationError("synthesize_tad: empty ENF");
  if (!(params.sample_rate_hz > 0.0)) throw ValidationError("synthesize_tad: sample rate must be positive");
  const double period = 1.0 / params.sample_rate_hz;
  if (!nearly_equal(enf.resolution_spp, period)) {
    throw ValidationError(
        "synthesize_tad: ENF resolution must equal one sample period; upsample_enf first");
  }
  const bool per_sample = !params.amplitude_profile.empty();
  if (per_sample && params.amplitude_profile.size() != enf.samples.size()) {
    throw ValidationError("synthesize_tad: amplitude profile length must match ENF length");
  }
  if (per_sample) {
    for (double a : params.amplitude_profile) {
      if (!(a > 0.0)) throw ValidationError("synthesize_tad: amplitude must be > 0 everywhere");
    }
  } else if (!(params.amplitude > 0.0)) {
    throw ValidationError("synthesize_tad: amplitude must be > 0");
  }

  TadSignal out;
  out.sample_rate_hz = params.sample_rate_hz;
  out.samples.resize(enf.samples.size());
  const double two_pi_t = kTwoPi * period;
  double phase = params.initial_phase_rad;
  for (std::size_t n = 0; n < enf.samples.size(); ++n) {
    phase += two_pi_t * enf.samples[n];
    while (phase >= kTwoPi) phase -= kTwoPi;
    while (phase < 0.0) phase += kTwoPi;
    const double a = per_sample ? params.amplitude_profile[n] : params.amplitude;
    out.samples[n] = a * std::cos(phase);
  }
  return out;
}

EnfSeries upsample_enf(const EnfSeries& enf, double target_rate_hz) {
  if (enf.samples.empty()) throw ValidationError("upsample_enf: empty ENF");
  if (!(target_rate_hz > 0.0)) throw ValidationError("upsample_enf: target rate must be positive");
  const double ratio = enf.resolution_spp * target_rate_hz;
  if (ratio < 1.0 - 1e-9) {
    throw ValidationError("upsample_enf: target rate below the ENF sampling rate");
  }

  EnfSeries out;
  out.resolution_spp = 1.0 / target_rate_hz;
  out.nominal_hz = enf.nominal_hz;
  out.start_offset_s = enf.start_offset_s;
  const std::size_t n_in = enf.samples.size();
  const std::size_t total =
      static_cast<std::size_t>(std::ceil(static_cast<double>(n_in) * ratio - 1e-9));
  out.samples.reserve(total);
  std::size_t emitted = 0;
  for (std::size_t i = 0; i < n_in; ++i) {
    const std::size_t upto = (i + 1 == n_in)
        ? total
        : static_cast<std::size_t>(std::ceil(static_cast<double>(i + 1) * ratio - 1e-9));
    for (; emitted < upto; ++emitted) out.samples.push_back(enf.samples[i]);
  }
  return out;
}

TadSignal add_awgn(const TadSignal& signal, double snr_linear, std::uint64_t seed) {
  if (signal.samples.empty()) throw ValidationError("add_awgn: empty signal");
  if (!(snr_linear > 0.0)) throw ValidationError("add_awgn: snr must be > 0");
  if (std::isinf(snr_linear)) return signal;

  double energy = 0.0;
  for (double s : signal.samples) energy += s * s;
  if (!(energy > 0.0)) throw ValidationError("add_awgn: zero-energy signal, SNR undefined");

  const double sigma =
      std::sqrt(energy / (static_cast<double>(signal.samples.size()) * snr_linear));
  std::mt19937_64 eng(seed);
  TadSignal out = signal;
  for (double& s : out.samples) s += sigma * rng::standard_normal(eng);
  return out;
}

double crlb_frequency_variance(const TfdNoiseParams& p) {
  if (p.frame_len_samples < 2) throw ValidationError("crlb: frame length must be >= 2");
  if (!(p.snr_linear > 0.0)) throw ValidationError("crlb: snr must be > 0");
  if (!(p.sample_rate_hz > 0.0)) throw ValidationError("crlb: sample rate must be positive");
  const double nf = static_cast<double>(p.frame_len_samples);
  const double scale = p.sample_rate_hz / kTwoPi;
  return 12.0 / (p.snr_linear * nf * (nf * nf - 1.0)) * scale * scale;
}

EnfSeries synthesize_noisy_enf_tfd(const EnfSeries& enf, const TfdNoiseParams& p,
                                   std::uint64_t seed) {
  if (enf.samples.empty()) throw ValidationError("synthesize_noisy_enf_tfd: empty ENF");
  const double sigma = std::sqrt(crlb_frequency_variance(p));
  EnfSeries out = enf;
  if (sigma == 0.0) return out;
  std::mt19937_64 eng(seed);
  for (double& f : out.samples) f += sigma * rng::standard_normal(eng);
  return out;
}

}  // namespace enf
