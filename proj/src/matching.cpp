// Copyright (c) enfkit authors
// SPDX-License-Identifier: Apache-2.0

#include "enf/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "enf/common.hpp"
#include "enf/fft.hpp"

namespace enf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_compatible(const EnfSeries& test, const EnfSeries& reference) {
  if (test.samples.empty()) throw ValidationError("match: empty test series");
  if (test.samples.size() > reference.samples.size()) {
    throw ValidationError("match: test longer than reference");
  }
  if (!nearly_equal(test.resolution_spp, reference.resolution_spp)) {
    throw ValidationError("match: temporal resolution mismatch");
  }
  if (!nearly_equal(test.nominal_hz, reference.nominal_hz)) {
    throw ValidationError("match: nominal frequency mismatch");
  }
}

bool is_constant(const double* v, std::size_t n) {
  for (std::size_t i = 1; i < n; ++i) {
    if (v[i] != v[0]) return false;
  }
  return true;
}

double mse_at(const std::vector<double>& t, const std::vector<double>& r, std::size_t k) {
  double acc = 0.0;
  const double* w = r.data() + k;
  for (std::size_t n = 0; n < t.size(); ++n) {
    const double d = t[n] - w[n];
    acc += d * d;
  }
  return acc;
}

// Pearson correlation at one offset on raw data; NaN for a constant window.
double cc_at(const std::vector<double>& t, const std::vector<double>& r, std::size_t k,
             double mu_t, double st2) {
  const std::size_t len = t.size();
  const double* w = r.data() + k;
  if (is_constant(w, len)) return kNaN;
  double mu_r = 0.0;
  for (std::size_t n = 0; n < len; ++n) mu_r += w[n];
  mu_r /= static_cast<double>(len);
  double num = 0.0;
  double den2 = 0.0;
  for (std::size_t n = 0; n < len; ++n) {
    const double dr = w[n] - mu_r;
    num += (t[n] - mu_t) * dr;
    den2 += dr * dr;
  }
  const double cc = num / std::sqrt(st2 * den2);
  return std::clamp(cc, -1.0, 1.0);
}

// Prefix sums with an extended-precision accumulator; out[k] holds the sum
// of the first k entries (optionally squared).
std::vector<double> prefix_sums(const std::vector<double>& v, bool squared) {
  std::vector<double> out(v.size() + 1);
  long double acc = 0.0L;
  out[0] = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const long double x = v[i];
    acc += squared ? x * x : x;
    out[i + 1] = static_cast<double>(acc);
  }
  return out;
}

bool use_direct(MatchMethod method, std::size_t n_ref, std::size_t n_test) {
  if (method == MatchMethod::Direct) return true;
  if (method == MatchMethod::Fft) return false;
  return n_ref <= 4096 || n_ref * n_test <= (std::size_t{1} << 22);
}

// Smallest-index arg-optimum with NaN entries skipped.
std::size_t arg_best(const std::vector<double>& trace, MetricKind metric) {
  std::size_t best = trace.size();
  double best_v = 0.0;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const double v = trace[k];
    if (std::isnan(v)) continue;
    if (best == trace.size() || (metric == MetricKind::Mse ? v < best_v : v > best_v)) {
      best = k;
      best_v = v;
    }
  }
  if (best == trace.size()) {
    throw ValidationError("match: no valid offsets (all reference windows degenerate)");
  }
  return best;
}

// Fast-path traces carry FFT rounding, so the raw arg-optimum may not be the
// true one when values sit closer than that noise. Re-evaluate every offset
// within a small margin of the current optimum exactly, then re-scan, until
// the winner is an exactly-computed value. Noise-free embedded segments end
// up with best MSE exactly 0 this way.
template <typename ExactFn>
void refine_optimum(std::vector<double>& trace, MetricKind metric, double margin,
                    ExactFn&& exact) {
  std::vector<char> refined(trace.size(), 0);
  for (std::size_t round = 0; round <= trace.size(); ++round) {
    const std::size_t kbest = arg_best(trace, metric);
    if (refined[kbest]) return;
    const double pivot = trace[kbest];
    for (std::size_t k = 0; k < trace.size(); ++k) {
      if (refined[k] || std::isnan(trace[k])) continue;
      const bool candidate = metric == MetricKind::Mse ? trace[k] <= pivot + margin
                                                       : trace[k] >= pivot - margin;
      if (candidate) {
        trace[k] = exact(k);
        refined[k] = 1;
      }
    }
  }
}

}  // namespace

MatchOutcome match_mse(const EnfSeries& test, const EnfSeries& reference, MatchMethod method) {
  check_compatible(test, reference);
  const std::vector<double>& t = test.samples;
  const std::vector<double>& r = reference.samples;
  const std::size_t n_off = r.size() - t.size() + 1;

  MatchOutcome out;
  out.metric_kind = MetricKind::Mse;
  out.num_offsets = n_off;
  out.resolution_spp = reference.resolution_spp;
  out.trace.resize(n_off);

  if (use_direct(method, r.size(), t.size())) {
    for (std::size_t k = 0; k < n_off; ++k) out.trace[k] = mse_at(t, r, k);
  } else {
    // sum (t-c)^2 + sum (r-c)^2 - 2 sum (t-c)(r-c), shifted by the global
    // reference mean so the cross term carries no nominal-offset bulk.
    double c = 0.0;
    for (double v : r) c += v;
    c /= static_cast<double>(r.size());
    std::vector<double> ts(t.size());
    std::vector<double> rs(r.size());
    for (std::size_t i = 0; i < t.size(); ++i) ts[i] = t[i] - c;
    for (std::size_t i = 0; i < r.size(); ++i) rs[i] = r[i] - c;

    double tt = 0.0;
    for (double v : ts) tt += v * v;
    const std::vector<double> p2 = prefix_sums(rs, true);
    const std::vector<double> cross = sliding_dot_fft(ts, rs);
    double scale = 1.0;
    for (std::size_t k = 0; k < n_off; ++k) {
      out.trace[k] = tt + (p2[k + t.size()] - p2[k]) - 2.0 * cross[k];
      scale = std::max(scale, std::fabs(out.trace[k]));
    }
    refine_optimum(out.trace, MetricKind::Mse, 1e-9 * scale,
                   [&](std::size_t k) { return mse_at(t, r, k); });
  }

  out.k_hat = arg_best(out.trace, MetricKind::Mse);
  out.best_value = out.trace[out.k_hat];
  return out;
}

MatchOutcome match_cc(const EnfSeries& test, const EnfSeries& reference, MatchMethod method) {
  check_compatible(test, reference);
  const std::vector<double>& t = test.samples;
  const std::vector<double>& r = reference.samples;
  const std::size_t len = t.size();
  const std::size_t n_off = r.size() - len + 1;

  if (is_constant(t.data(), len)) {
    throw ValidationError("match_cc: test series has zero variance");
  }
  double mu_t = 0.0;
  for (double v : t) mu_t += v;
  mu_t /= static_cast<double>(len);
  double st2 = 0.0;
  for (double v : t) st2 += (v - mu_t) * (v - mu_t);
  if (!(st2 > 0.0)) throw ValidationError("match_cc: test series has zero variance");

  MatchOutcome out;
  out.metric_kind = MetricKind::Cc;
  out.num_offsets = n_off;
  out.resolution_spp = reference.resolution_spp;
  out.trace.resize(n_off);

  if (use_direct(method, r.size(), len)) {
    for (std::size_t k = 0; k < n_off; ++k) out.trace[k] = cc_at(t, r, k, mu_t, st2);
  } else {
    double c = 0.0;
    for (double v : r) c += v;
    c /= static_cast<double>(r.size());
    std::vector<double> rs(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) rs[i] = r[i] - c;
    std::vector<double> td(len);
    const double mu_ts = mu_t - c;
    for (std::size_t i = 0; i < len; ++i) td[i] = (t[i] - c) - mu_ts;
    double ct = 0.0;  // residual of the mean removal, kept as a correction
    double st2s = 0.0;
    for (double v : td) {
      ct += v;
      st2s += v * v;
    }

    const std::vector<double> p1 = prefix_sums(rs, false);
    const std::vector<double> p2 = prefix_sums(rs, true);
    const std::vector<double> cross = sliding_dot_fft(td, rs);
    const double flen = static_cast<double>(len);
    for (std::size_t k = 0; k < n_off; ++k) {
      const double w1 = p1[k + len] - p1[k];
      const double w2 = p2[k + len] - p2[k];
      const double mu_r = w1 / flen;
      const double den2 = w2 - w1 * mu_r;
      if (!(den2 > 1e-10 * (w2 + 1e-300))) {
        out.trace[k] = kNaN;
        continue;
      }
      const double num = cross[k] - mu_r * ct;
      const double cc = num / std::sqrt(st2s * den2);
      out.trace[k] = (cc >= -1.0000001 && cc <= 1.0000001) ? std::clamp(cc, -1.0, 1.0) : kNaN;
    }
    refine_optimum(out.trace, MetricKind::Cc, 1e-9,
                   [&](std::size_t k) { return cc_at(t, r, k, mu_t, st2); });
  }

  out.k_hat = arg_best(out.trace, MetricKind::Cc);
  out.best_value = out.trace[out.k_hat];
  return out;
}

MatchDecision decide(const MatchOutcome& outcome, const MatchConfig& cfg) {
  if (cfg.epsilon_samples < 1) throw ValidationError("decide: epsilon must be >= 1");
  if (!cfg.ground_truth_k0.has_value()) throw ValidationError("decide: ground-truth k0 missing");
  const std::int64_t k0 = *cfg.ground_truth_k0;
  const std::int64_t khat = static_cast<std::int64_t>(outcome.k_hat);
  MatchDecision d;
  d.abs_error_samples = static_cast<std::uint64_t>(std::llabs(khat - k0));
  d.success = d.abs_error_samples < static_cast<std::uint64_t>(cfg.epsilon_samples);
  d.error_seconds = static_cast<double>(d.abs_error_samples) * outcome.resolution_spp;
  return d;
}

CensusResult census_from_trace(const MatchOutcome& cc_outcome, const CensusConfig& cfg) {
  if (cc_outcome.metric_kind != MetricKind::Cc) {
    throw ValidationError("census: requires a CC match outcome");
  }
  if (cfg.thresholds.empty()) throw ValidationError("census: thresholds must be non-empty");
  for (std::size_t i = 0; i < cfg.thresholds.size(); ++i) {
    if (cfg.thresholds[i] <= -1.0 || cfg.thresholds[i] > 1.0) {
      throw ValidationError("census: thresholds must lie in (-1, 1]");
    }
    if (i > 0 && cfg.thresholds[i] <= cfg.thresholds[i - 1]) {
      throw ValidationError("census: thresholds must be strictly increasing");
    }
  }

  CensusResult res;
  res.num_offsets = cc_outcome.num_offsets;
  res.counts.assign(cfg.thresholds.size(), 0);
  for (double v : cc_outcome.trace) {
    if (std::isnan(v)) continue;
    ++res.num_valid_offsets;
    for (std::size_t i = 0; i < cfg.thresholds.size(); ++i) {
      if (v >= cfg.thresholds[i]) ++res.counts[i];
    }
    int bin = static_cast<int>(std::floor((v + 1.0) / 0.1));
    bin = std::clamp(bin, 0, 19);  // CC = 1 lands in the top bin
    ++res.histogram[static_cast<std::size_t>(bin)];
  }
  return res;
}

CensusResult census_similar(const EnfSeries& test, const EnfSeries& reference,
                            const CensusConfig& cfg, MatchMethod method) {
  return census_from_trace(match_cc(test, reference, method), cfg);
}

}  // namespace enf
