// Copyright (c) enfkit authors
// SPDX-License-Identifier: Apache-2.0

#include "enf/fft.hpp"

#include <cmath>
#include <stdexcept>

#include "enf/common.hpp"

namespace enf {

std::size_t Fft::next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

Fft::Fft(std::size_t n) : n_(n) {
  if (n == 0 || (n & (n - 1)) != 0) {
    throw ValidationError("fft size must be a nonzero power of two");
  }
  int log2n = 0;
  while ((std::size_t{1} << log2n) < n) ++log2n;

  bitrev_.resize(n);
  bitrev_[0] = 0;
  for (std::size_t i = 1; i < n; ++i) {
    bitrev_[i] = static_cast<std::uint32_t>((bitrev_[i >> 1] >> 1) | ((i & 1) << (log2n - 1)));
  }

  twiddle_.resize(n / 2);
  for (std::size_t j = 0; j < n / 2; ++j) {
    const double ang = -kTwoPi * static_cast<double>(j) / static_cast<double>(n);
    twiddle_[j] = {std::cos(ang), std::sin(ang)};
  }
}

void Fft::transform(std::complex<double>* a, bool inverse) const {
  const std::size_t n = n_;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = bitrev_[i];
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len >> 1;
    const std::size_t stride = n / len;
    for (std::size_t blk = 0; blk < n; blk += len) {
      for (std::size_t j = 0; j < half; ++j) {
        std::complex<double> w = twiddle_[j * stride];
        if (inverse) w = std::conj(w);
        const std::complex<double> u = a[blk + j];
        const std::complex<double> v = a[blk + j + half] * w;
        a[blk + j] = u + v;
        a[blk + j + half] = u - v;
      }
    }
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) a[i] *= scale;
  }
}

void Fft::forward(std::vector<std::complex<double>>& data) const {
  if (data.size() != n_) throw ValidationError("fft buffer size mismatch");
  transform(data.data(), false);
}

void Fft::inverse(std::vector<std::complex<double>>& data) const {
  if (data.size() != n_) throw ValidationError("fft buffer size mismatch");
  transform(data.data(), true);
}

std::vector<double> sliding_dot_direct(const std::vector<double>& probe,
                                       const std::vector<double>& base) {
  if (probe.empty() || probe.size() > base.size()) {
    throw ValidationError("sliding_dot: probe must be non-empty and no longer than base");
  }
  const std::size_t n_off = base.size() - probe.size() + 1;
  std::vector<double> out(n_off);
  for (std::size_t k = 0; k < n_off; ++k) {
    double acc = 0.0;
    const double* b = base.data() + k;
    for (std::size_t n = 0; n < probe.size(); ++n) acc += probe[n] * b[n];
    out[k] = acc;
  }
  return out;
}

std::vector<double> sliding_dot_fft(const std::vector<double>& probe,
                                    const std::vector<double>& base) {
  if (probe.empty() || probe.size() > base.size()) {
    throw ValidationError("sliding_dot: probe must be non-empty and no longer than base");
  }
  // Circular correlation needs N >= base length; indices k <= |base|-|probe|
  // never wrap. base and probe ride in the real/imag lanes of one complex
  // transform.
  const std::size_t n = Fft::next_pow2(base.size());
  Fft fft(n);
  std::vector<std::complex<double>> z(n, {0.0, 0.0});
  for (std::size_t i = 0; i < base.size(); ++i) z[i] = {base[i], 0.0};
  for (std::size_t i = 0; i < probe.size(); ++i) z[i].imag(probe[i]);
  fft.forward(z);

  // Unpack spectra of the two real sequences and form Base[k]*conj(Probe[k]).
  std::vector<std::complex<double>> prod(n);
  const std::complex<double> half_i(0.0, -0.5);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    const std::size_t kr = (n - k) & (n - 1);
    const std::complex<double> zk = z[k];
    const std::complex<double> zr = std::conj(z[kr]);
    const std::complex<double> bk = 0.5 * (zk + zr);
    const std::complex<double> pk = half_i * (zk - zr);
    prod[k] = bk * std::conj(pk);
    if (kr != k) prod[kr] = std::conj(prod[k]);
  }
  fft.inverse(prod);

  const std::size_t n_off = base.size() - probe.size() + 1;
  std::vector<double> out(n_off);
  for (std::size_t k = 0; k < n_off; ++k) out[k] = prod[k].real();
  return out;
}

}  // namespace enf
