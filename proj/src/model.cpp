// Copyright (c) enfkit authors
// SPDX-License-Identifier: Apache-2.0

#include "enf/model.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include "enf/common.hpp"
#include "enf/fft.hpp"
#include "enf/rng.hpp"

namespace enf {

namespace {

void require_valid(const Ar1Params& p) {
  if (!std::isfinite(p.a) || std::fabs(p.a) >= 1.0) {
    throw ValidationError("ar1: |a| must be < 1 and finite");
  }
  if (!std::isfinite(p.sigma_x) || p.sigma_x < 0.0) {
    throw ValidationError("ar1: sigma_x must be finite and non-negative");
  }
}

}  // namespace

double Ar1Params::stationary_sigma() const {
  return sigma_x / std::sqrt(1.0 - a * a);
}

EnfSeries slice(const EnfSeries& enf, std::size_t start, std::size_t count) {
  if (count == 0 || start + count > enf.samples.size()) {
    throw ValidationError("slice: range out of bounds");
  }
  EnfSeries out;
  out.samples.assign(enf.samples.begin() + static_cast<std::ptrdiff_t>(start),
                     enf.samples.begin() + static_cast<std::ptrdiff_t>(start + count));
  out.resolution_spp = enf.resolution_spp;
  out.nominal_hz = enf.nominal_hz;
  out.start_offset_s = enf.start_offset_s + static_cast<double>(start) * enf.resolution_spp;
  return out;
}

EnfSeries synthesize_ar1(std::size_t length, const Ar1Params& params, double resolution_spp,
                         double nominal_hz, std::uint64_t seed) {
  require_valid(params);
  if (length < 1) throw ValidationError("synthesize_ar1: length must be >= 1");
  if (!(resolution_spp > 0.0) || !std::isfinite(resolution_spp)) {
    throw ValidationError("synthesize_ar1: resolution_spp must be positive");
  }
  if (!std::isfinite(nominal_hz)) throw ValidationError("synthesize_ar1: nominal_hz must be finite");

  std::mt19937_64 eng(seed);
  EnfSeries out;
  out.samples.resize(length);
  out.resolution_spp = resolution_spp;
  out.nominal_hz = nominal_hz;
  double f = 0.0;
  for (std::size_t n = 0; n < length; ++n) {
    f = params.a * f + params.sigma_x * rng::standard_normal(eng);
    out.samples[n] = f + nominal_hz;
  }
  return out;
}

Ar1Params fit_ar1(const EnfSeries& enf) {
  const std::size_t n = enf.samples.size();
  if (n < 3) throw ValidationError("fit_ar1: need at least 3 samples");

  double mean = 0.0;
  for (double v : enf.samples) mean += v;
  mean /= static_cast<double>(n);

  double r0 = 0.0;
  double r1 = 0.0;
  double prev = enf.samples[0] - mean;
  r0 += prev * prev;
  for (std::size_t i = 1; i < n; ++i) {
    const double cur = enf.samples[i] - mean;
    r0 += cur * cur;
    r1 += prev * cur;
    prev = cur;
  }
  r0 /= static_cast<double>(n);
  r1 /= static_cast<double>(n);

  const double eps = std::numeric_limits<double>::epsilon();
  if (r0 <= 64.0 * eps * eps * (mean * mean + 1.0)) {
    throw ValidationError("fit_ar1: degenerate input (zero variance after mean removal)");
  }

  Ar1Params p;
  p.a = r1 / r0;
  p.sigma_x = std::sqrt(std::max(0.0, r0 * (1.0 - p.a * p.a)));
  return p;
}

SpectrumEstimate energy_density_spectrum(const EnfSeries& enf, std::size_t fft_length) {
  const std::size_t n = enf.samples.size();
  if (n == 0) throw ValidationError("energy_density_spectrum: empty input");
  if (fft_length < n) throw ValidationError("energy_density_spectrum: fft_length must be >= series length");

  double mean = 0.0;
  for (double v : enf.samples) mean += v;
  mean /= static_cast<double>(n);

  const std::size_t nfft = Fft::next_pow2(fft_length);
  std::vector<std::complex<double>> buf(nfft, {0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) buf[i] = {enf.samples[i] - mean, 0.0};
  Fft fft(nfft);
  fft.forward(buf);

  SpectrumEstimate out;
  const std::size_t half = nfft / 2;
  out.frequencies.resize(half + 1);
  out.energy_db.resize(half + 1);
  std::vector<double> power(half + 1);
  double peak = 0.0;
  for (std::size_t k = 0; k <= half; ++k) {
    const double mag2 = std::norm(buf[k]);
    const double one_sided = (k == 0 || k == half) ? 1.0 : 2.0;
    power[k] = one_sided * mag2 / static_cast<double>(nfft);
    peak = std::max(peak, power[k]);
    out.frequencies[k] =
        static_cast<double>(k) / (static_cast<double>(nfft) * enf.resolution_spp);
  }
  if (peak <= 0.0) {
    throw ValidationError("energy_density_spectrum: degenerate input (zero energy after mean removal)");
  }
  for (std::size_t k = 0; k <= half; ++k) {
    out.energy_db[k] = 10.0 * std::log10(power[k] / peak);
  }
  out.peak_power = peak;
  return out;
}

}  // namespace enf
