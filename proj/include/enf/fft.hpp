// Copyright (c) enfkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace enf {

// Iterative radix-2 FFT with precomputed twiddle and bit-reversal tables.
// Sizes are powers of two; callers zero-pad. Kept in-house so results are
// bit-reproducible across runs and platforms.
class Fft {
public:
  explicit Fft(std::size_t n);

  std::size_t size() const { return n_; }

  void forward(std::complex<double>* data) const { transform(data, false); }
  void inverse(std::complex<double>* data) const { transform(data, true); }

  void forward(std::vector<std::complex<double>>& data) const;
  void inverse(std::vector<std::complex<double>>& data) const;

  static std::size_t next_pow2(std::size_t n);

private:
  void transform(std::complex<double>* data, bool inverse) const;

  std::size_t n_;
  std::vector<std::uint32_t> bitrev_;
  std::vector<std::complex<double>> twiddle_;  // exp(-2*pi*i*j/n), j < n/2
};

// Sliding dot products c[k] = sum_n probe[n] * base[n + k] for
// k = 0 .. base.size() - probe.size(). Requires probe non-empty and no
// longer than base.
std::vector<double> sliding_dot_direct(const std::vector<double>& probe,
                                       const std::vector<double>& base);

// Same values via one packed complex FFT and one inverse transform.
std::vector<double> sliding_dot_fft(const std::vector<double>& probe,
                                    const std::vector<double>& base);

}  // namespace enf
