// Copyright (c) enfkit authors
// SPDX-License-Identifier: Apache-2.0

#include "enf/synthesis.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

#include "enf/common.hpp"
#include "oracles.hpp"

using namespace enf;

namespace {

EnfSeries constant_enf(std::size_t n, double hz, double rate) {
  EnfSeries s;
  s.samples.assign(n, hz);
  s.resolution_spp = 1.0 / rate;
  s.nominal_hz = hz;
  return s;
}

}  // namespace

TEST_CASE("constant-frequency waveform matches the closed form") {
  const double rate = 400.0;
  const EnfSeries enf = constant_enf(4000, 50.0, rate);
  TadSynthesisParams p;
  p.sample_rate_hz = rate;
  const TadSignal s = synthesize_tad(enf, p);
  REQUIRE(s.samples.size() == 4000);
  for (std::size_t n = 0; n < s.samples.size(); ++n) {
    const double want = std::cos(kTwoPi * 50.0 * static_cast<double>(n + 1) / rate);
    CHECK(s.samples[n] == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("initial phase shifts the waveform") {
  const double rate = 400.0;
  const EnfSeries enf = constant_enf(64, 50.0, rate);
  TadSynthesisParams p;
  p.sample_rate_hz = rate;
  p.initial_phase_rad = 1.25;
  const TadSignal s = synthesize_tad(enf, p);
  for (std::size_t n = 0; n < s.samples.size(); ++n) {
    const double want = std::cos(kTwoPi * 50.0 * static_cast<double>(n + 1) / rate + 1.25);
    CHECK(s.samples[n] == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("synthesize_tad rejects bad inputs") {
  const EnfSeries enf = constant_enf(100, 50.0, 400.0);
  TadSynthesisParams p;
  p.sample_rate_hz = 400.0;

  TadSynthesisParams zero_amp = p;
  zero_amp.amplitude = 0.0;
  CHECK_THROWS_AS(synthesize_tad(enf, zero_amp), ValidationError);

  TadSynthesisParams bad_profile = p;
  bad_profile.amplitude_profile.assign(100, 1.0);
  bad_profile.amplitude_profile[42] = 0.0;
  CHECK_THROWS_AS(synthesize_tad(enf, bad_profile), ValidationError);

  TadSynthesisParams short_profile = p;
  short_profile.amplitude_profile.assign(99, 1.0);
  CHECK_THROWS_AS(synthesize_tad(enf, short_profile), ValidationError);

  // delta-resolution ENF must go through upsample_enf first
  EnfSeries coarse = enf;
  coarse.resolution_spp = 1.0;
  CHECK_THROWS_AS(synthesize_tad(coarse, p), ValidationError);

  EnfSeries empty;
  empty.resolution_spp = 1.0 / 400.0;
  CHECK_THROWS_AS(synthesize_tad(empty, p), ValidationError);
}

TEST_CASE("per-sample amplitude profile is applied") {
  const double rate = 400.0;
  EnfSeries enf = constant_enf(16, 50.0, rate);
  TadSynthesisParams p;
  p.sample_rate_hz = rate;
  const TadSignal flat = synthesize_tad(enf, p);
  p.amplitude_profile.assign(16, 2.5);
  const TadSignal scaled = synthesize_tad(enf, p);
  for (std::size_t n = 0; n < 16; ++n) {
    CHECK(scaled.samples[n] == doctest::Approx(2.5 * flat.samples[n]).epsilon(1e-12));
  }
}

TEST_CASE("upsample_enf hold semantics") {
  EnfSeries s;
  s.samples = {50.0, 50.1};
  s.resolution_spp = 1.0;
  const EnfSeries up = upsample_enf(s, 400.0);
  REQUIRE(up.samples.size() == 800);
  for (std::size_t i = 0; i < 400; ++i) CHECK(up.samples[i] == 50.0);
  for (std::size_t i = 400; i < 800; ++i) CHECK(up.samples[i] == 50.1);
  CHECK(up.resolution_spp == doctest::Approx(1.0 / 400.0).epsilon(1e-15));
}

TEST_CASE("upsample_enf identity at the same rate") {
  EnfSeries s;
  s.samples = {50.0, 50.2, 49.9};
  s.resolution_spp = 0.5;
  const EnfSeries up = upsample_enf(s, 2.0);
  CHECK(up.samples == s.samples);
}

TEST_CASE("upsample_enf with a non-integer ratio") {
  EnfSeries s;
  s.resolution_spp = 1.0;
  for (int i = 0; i < 101; ++i) s.samples.push_back(50.0 + i);
  const EnfSeries up = upsample_enf(s, 2.5);
  // total duration preserved within one output sample
  CHECK(std::fabs(static_cast<double>(up.samples.size()) / 2.5 - 101.0) <= 1.0 / 2.5);
  // per-interval counts differ by at most one
  std::size_t idx = 0;
  std::size_t lo = 1000, hi = 0;
  for (int i = 0; i < 101; ++i) {
    std::size_t count = 0;
    while (idx < up.samples.size() && up.samples[idx] == 50.0 + i) {
      ++count;
      ++idx;
    }
    lo = std::min(lo, count);
    hi = std::max(hi, count);
  }
  CHECK(idx == up.samples.size());
  CHECK(hi - lo <= 1);
  CHECK(hi <= 3);
  CHECK(lo >= 2);
}

TEST_CASE("upsample_enf rejects downsampling") {
  EnfSeries s;
  s.samples = {50.0, 50.1};
  s.resolution_spp = 1.0;
  CHECK_THROWS_AS(upsample_enf(s, 0.5), ValidationError);
}

TEST_CASE("add_awgn calibrates to the requested SNR") {
  TadSignal s;
  s.sample_rate_hz = 400.0;
  s.samples.assign(1000000, 0.0);
  for (std::size_t n = 0; n < s.samples.size(); ++n) {
    s.samples[n] = std::cos(kTwoPi * 0.125 * static_cast<double>(n));
  }
  const TadSignal noisy = add_awgn(s, 1.0, 404);
  double se = 0.0, ve = 0.0;
  for (std::size_t n = 0; n < s.samples.size(); ++n) {
    se += s.samples[n] * s.samples[n];
    const double v = noisy.samples[n] - s.samples[n];
    ve += v * v;
  }
  CHECK(se / ve == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("add_awgn edge cases") {
  TadSignal s;
  s.samples = {1.0, -1.0, 1.0, -1.0};
  const TadSignal nearly_clean = add_awgn(s, 1e12, 5);
  for (std::size_t n = 0; n < s.samples.size(); ++n) {
    CHECK(std::fabs(nearly_clean.samples[n] - s.samples[n]) < 1e-4);
  }
  CHECK(add_awgn(s, kInfDb, 5).samples == s.samples);
  CHECK_THROWS_AS(add_awgn(s, 0.0, 5), ValidationError);
  CHECK_THROWS_AS(add_awgn(s, -2.0, 5), ValidationError);
  TadSignal zero;
  zero.samples.assign(16, 0.0);
  CHECK_THROWS_AS(add_awgn(zero, 1.0, 5), ValidationError);
}

TEST_CASE("CRLB formula value and scaling") {
  TfdNoiseParams p{1.0, 400, 400.0};
  CHECK(std::fabs(crlb_frequency_variance(p) - 7.599e-4) < 1e-7);

  TfdNoiseParams twice = p;
  twice.snr_linear = 2.0;
  CHECK(crlb_frequency_variance(twice) ==
        doctest::Approx(crlb_frequency_variance(p) / 2.0).epsilon(1e-12));

  TfdNoiseParams bad = p;
  bad.frame_len_samples = 1;
  CHECK_THROWS_AS(crlb_frequency_variance(bad), ValidationError);
  bad.frame_len_samples = 400;
  bad.snr_linear = 0.0;
  CHECK_THROWS_AS(crlb_frequency_variance(bad), ValidationError);
}

TEST_CASE("snr dB conversion") {
  CHECK(snr_db_to_linear(-25.0) == doctest::Approx(3.1623e-3).epsilon(1e-4));
  CHECK(snr_db_to_linear(0.0) == 1.0);
  CHECK(snr_linear_to_db(100.0) == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("TFD noise matches the CRLB calibration") {
  EnfSeries enf;
  enf.samples.assign(1000000, 50.0);
  enf.resolution_spp = 1.0;
  const TfdNoiseParams p{1.0, 400, 400.0};
  const EnfSeries noisy = synthesize_noisy_enf_tfd(enf, p, 777);
  std::vector<double> diff(enf.samples.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = noisy.samples[i] - enf.samples[i];
  const double want_var = crlb_frequency_variance(p);
  CHECK(oracle::variance(diff) == doctest::Approx(want_var).epsilon(0.02));
  const double se = std::sqrt(want_var / static_cast<double>(diff.size()));
  CHECK(std::fabs(oracle::mean(diff)) < 3.0 * se);
}

TEST_CASE("TFD noise at extreme SNR is negligible") {
  EnfSeries enf;
  enf.samples.assign(10000, 50.0);
  enf.resolution_spp = 1.0;
  const EnfSeries noisy = synthesize_noisy_enf_tfd(enf, {1e12, 400, 400.0}, 3);
  for (std::size_t i = 0; i < enf.samples.size(); ++i) {
    CHECK(std::fabs(noisy.samples[i] - enf.samples[i]) < 1e-6);
  }
  CHECK(noisy.resolution_spp == enf.resolution_spp);
}

TEST_CASE("tad slice bounds") {
  TadSignal s;
  s.samples = {1.0, 2.0, 3.0, 4.0};
  const TadSignal cut = slice(s, 1, 2);
  CHECK(cut.samples == std::vector<double>{2.0, 3.0});
  CHECK_THROWS_AS(slice(s, 3, 2), ValidationError);
}
