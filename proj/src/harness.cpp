// Copyright (c) enfkit authors
// SPDX-License-Identifier: Apache-2.0

#include "enf/harness.hpp"

#include <cmath>
#include <cstring>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include "enf/common.hpp"
#include "enf/io.hpp"
#include "enf/rng.hpp"
#include "enf/synthesis.hpp"

namespace enf {

namespace {

// RNG stream purposes within one trial.
constexpr std::uint64_t kStreamReference = 1;
constexpr std::uint64_t kStreamOffset = 2;
constexpr std::uint64_t kStreamNoise = 3;
constexpr std::uint64_t kStreamPhase = 4;

std::uint64_t double_bits(double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, 8);
  return u;
}

// Grid-point id from the factor values themselves, so seeds do not depend
// on grid iteration order.
std::uint64_t grid_point_id(const ExperimentSpec& s) {
  std::uint64_t h = rng::derive_seed(0x656e666b69742e31ULL, double_bits(s.l_t_s),
                                     double_bits(s.l_r_s), double_bits(s.delta_spp));
  return rng::derive_seed(h, double_bits(s.snr_db), static_cast<std::uint64_t>(s.scheme));
}

std::uint64_t trial_seed(const ExperimentSpec& s, int trial, std::uint64_t stream) {
  return rng::derive_seed(s.master_seed, grid_point_id(s),
                          static_cast<std::uint64_t>(trial), stream);
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  unsigned workers = threads > 0 ? static_cast<unsigned>(threads)
                                 : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, n == 0 ? 1 : static_cast<unsigned>(n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::size_t enf_samples(double seconds, double delta) {
  return static_cast<std::size_t>(std::llround(seconds / delta));
}

MatchOutcome run_match(const ExperimentSpec& spec, const EnfSeries& test,
                       const EnfSeries& reference) {
  return spec.metric == MetricKind::Mse ? match_mse(test, reference)
                                        : match_cc(test, reference);
}

TrialResult make_result(const ExperimentSpec& spec, int trial, std::int64_t k0,
                        const MatchOutcome& outcome) {
  MatchConfig mc;
  mc.epsilon_samples = effective_epsilon(spec);
  mc.ground_truth_k0 = k0;
  const MatchDecision d = decide(outcome, mc);
  TrialResult r;
  r.trial_index = trial;
  r.k0 = k0;
  r.k_hat = static_cast<std::int64_t>(outcome.k_hat);
  r.abs_error_samples = d.abs_error_samples;
  r.success = d.success;
  r.best_metric_value = outcome.best_value;
  return r;
}

// Per-trial census counts are collected from the CC trace the match already
// produced; rows land in trial order so aggregation is deterministic.
class CensusCollector {
public:
  CensusCollector(MetricKind metric, std::size_t trials)
      : active_(metric == MetricKind::Cc), rows_(active_ ? trials : 0) {}

  void record(std::size_t trial, const MatchOutcome& outcome) {
    if (!active_) return;
    rows_[trial] = census_from_trace(outcome, cfg_).counts;
  }

  CensusSummary summarize() const {
    CensusSummary s;
    if (!active_ || rows_.empty()) return s;
    s.thresholds = cfg_.thresholds;
    s.mean_counts.assign(cfg_.thresholds.size(), 0.0);
    for (const std::vector<std::size_t>& row : rows_) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        s.mean_counts[i] += static_cast<double>(row[i]);
      }
    }
    for (double& v : s.mean_counts) v /= static_cast<double>(rows_.size());
    return s;
  }

private:
  bool active_;
  CensusConfig cfg_;
  std::vector<std::vector<std::size_t>> rows_;
};

std::vector<TrialResult> run_tfd_scheme(const ExperimentSpec& spec, bool white,
                                        CensusSummary* census) {
  validate_spec(spec);
  const std::size_t n_ref = enf_samples(spec.l_r_s, spec.delta_spp);
  const std::size_t n_test = enf_samples(spec.l_t_s, spec.delta_spp);
  const std::size_t n_offsets = n_ref - n_test + 1;
  const bool noisy = std::isfinite(spec.snr_db);
  TfdNoiseParams noise;
  if (noisy) {
    noise.snr_linear = snr_db_to_linear(spec.snr_db);
    noise.frame_len_samples = spec.crlb_frame_len;
    noise.sample_rate_hz = spec.sample_rate_hz;
    crlb_frequency_variance(noise);  // fail fast before any trial runs
  }
  // An i.i.d. sequence is the a = 0 corner of the same generator.
  const Ar1Params ref_model = white ? Ar1Params{0.0, spec.model.sigma_x} : spec.model;

  std::vector<TrialResult> results(static_cast<std::size_t>(spec.trials));
  CensusCollector collector(census ? spec.metric : MetricKind::Mse, results.size());
  parallel_for(results.size(), spec.threads, [&](std::size_t i) {
    const int trial = static_cast<int>(i);
    const EnfSeries ref =
        synthesize_ar1(n_ref, ref_model, spec.delta_spp, spec.nominal_hz,
                       trial_seed(spec, trial, kStreamReference));
    std::mt19937_64 offset_rng(trial_seed(spec, trial, kStreamOffset));
    const auto k0 = static_cast<std::int64_t>(rng::uniform_below(offset_rng, n_offsets));
    EnfSeries test = slice(ref, static_cast<std::size_t>(k0), n_test);
    if (noisy) {
      test = synthesize_noisy_enf_tfd(test, noise, trial_seed(spec, trial, kStreamNoise));
    }
    const MatchOutcome outcome = run_match(spec, test, ref);
    collector.record(i, outcome);
    results[i] = make_result(spec, trial, k0, outcome);
  });
  if (census) *census = collector.summarize();
  return results;
}

}  // namespace

void validate_spec(const ExperimentSpec& spec) {
  if (!(spec.l_t_s > 0.0) || !(spec.l_r_s > 0.0)) {
    throw ValidationError("spec: lengths must be positive");
  }
  if (spec.l_t_s > spec.l_r_s) throw ValidationError("spec: L_T must not exceed L_R");
  if (!(spec.delta_spp > 0.0)) throw ValidationError("spec: delta must be positive");
  if (1.0 / spec.delta_spp > spec.sample_rate_hz * (1.0 + 1e-9)) {
    throw ValidationError("spec: 1/delta must not exceed the TAD sample rate");
  }
  if (spec.trials < 1) throw ValidationError("spec: trials must be >= 1");
  if (effective_epsilon(spec) < 1) throw ValidationError("spec: epsilon must be >= 1");
  if (enf_samples(spec.l_t_s, spec.delta_spp) < 1) {
    throw ValidationError("spec: test shorter than one ENF sample");
  }
  if (std::isfinite(spec.snr_db) && spec.scheme != Scheme::Waveform &&
      spec.crlb_frame_len < 2) {
    throw ValidationError("spec: CRLB frame length must be >= 2");
  }
  if (std::fabs(spec.model.a) >= 1.0 || !(spec.model.sigma_x >= 0.0)) {
    throw ValidationError("spec: AR(1) model must be stable with sigma_x >= 0");
  }
  if (spec.scheme == Scheme::Waveform) {
    const double hop_d = spec.delta_spp * spec.sample_rate_hz;
    const auto hop = std::llround(hop_d);
    if (hop < 1 || std::fabs(hop_d - static_cast<double>(hop)) > 1e-6) {
      throw ValidationError("spec: delta * f_S must be a positive integer hop");
    }
    if (spec.l_t_s < spec.estimator.frame_len_s) {
      throw ValidationError("spec: test shorter than one estimator frame");
    }
  }
}

std::vector<TrialResult> run_scheme1(const ExperimentSpec& spec) {
  if (spec.scheme != Scheme::Synthetic) throw ValidationError("run_scheme1: wrong scheme");
  return run_tfd_scheme(spec, false, nullptr);
}

std::vector<TrialResult> run_white_benchmark(const ExperimentSpec& spec) {
  if (spec.scheme != Scheme::WhiteGaussian) {
    throw ValidationError("run_white_benchmark: wrong scheme");
  }
  return run_tfd_scheme(spec, true, nullptr);
}

namespace {

std::vector<TrialResult> run_scheme2_impl(const ExperimentSpec& spec, CensusSummary* census) {
  validate_spec(spec);

  const auto hop = static_cast<std::size_t>(std::llround(spec.delta_spp * spec.sample_rate_hz));
  const auto n_tad_ref = static_cast<std::size_t>(std::llround(spec.l_r_s * spec.sample_rate_hz));
  const auto n_tad_test = static_cast<std::size_t>(std::llround(spec.l_t_s * spec.sample_rate_hz));

  EstimatorConfig cfg = spec.estimator;
  cfg.step_s = spec.delta_spp;
  cfg.band_center_hz = spec.nominal_hz;

  // The reference is fixed for the whole grid point, like a database
  // segment; trials randomize the slice position and the test noise.
  TadSignal ref_tad;
  if (!spec.reference_file.empty()) {
    ref_tad = read_tad_auto(spec.reference_file);
    if (!nearly_equal(ref_tad.sample_rate_hz, spec.sample_rate_hz)) {
      throw ValidationError("scheme2: reference file sample rate differs from spec");
    }
    if (ref_tad.samples.size() < n_tad_ref) {
      throw ValidationError("scheme2: reference file shorter than L_R");
    }
    ref_tad.samples.resize(n_tad_ref);
  } else {
    // The reference stream hangs off the grid point, not a trial index.
    const auto n_fine = static_cast<std::size_t>(std::llround(spec.l_r_s));
    const EnfSeries fine =
        synthesize_ar1(n_fine, spec.model, 1.0, spec.nominal_hz,
                       rng::derive_seed(spec.master_seed, grid_point_id(spec), 0,
                                        kStreamReference));
    std::mt19937_64 phase_rng(
        rng::derive_seed(spec.master_seed, grid_point_id(spec), 0, kStreamPhase));
    TadSynthesisParams tp;
    tp.sample_rate_hz = spec.sample_rate_hz;
    tp.initial_phase_rad = kTwoPi * rng::uniform_unit(phase_rng);
    ref_tad = synthesize_tad(upsample_enf(fine, spec.sample_rate_hz), tp);
    if (ref_tad.samples.size() != n_tad_ref) {
      throw ValidationError("scheme2: reference length mismatch after synthesis");
    }
  }

  const EnfSeries ref_enf = estimate_if(ref_tad, cfg);
  TadSignal probe = slice(ref_tad, 0, n_tad_test);
  const std::size_t n_test_enf = frame_signal(probe, cfg).size();
  if (n_test_enf > ref_enf.samples.size()) {
    throw ValidationError("scheme2: test produces more ENF samples than the reference");
  }
  const std::size_t n_offsets = (n_tad_ref - n_tad_test) / hop + 1;
  const bool noisy = std::isfinite(spec.snr_db);
  const double snr_linear = noisy ? snr_db_to_linear(spec.snr_db) : kInfDb;

  std::vector<TrialResult> results(static_cast<std::size_t>(spec.trials));
  CensusCollector collector(census ? spec.metric : MetricKind::Mse, results.size());
  parallel_for(results.size(), spec.threads, [&](std::size_t i) {
    const int trial = static_cast<int>(i);
    std::mt19937_64 offset_rng(trial_seed(spec, trial, kStreamOffset));
    const auto k0 = static_cast<std::int64_t>(rng::uniform_below(offset_rng, n_offsets));
    TadSignal test_tad =
        slice(ref_tad, static_cast<std::size_t>(k0) * hop, n_tad_test);
    if (noisy) {
      test_tad = add_awgn(test_tad, snr_linear, trial_seed(spec, trial, kStreamNoise));
    }
    const EnfSeries test_enf = estimate_if(test_tad, cfg);
    const MatchOutcome outcome = run_match(spec, test_enf, ref_enf);
    collector.record(i, outcome);
    results[i] = make_result(spec, trial, k0, outcome);
  });
  if (census) *census = collector.summarize();
  return results;
}

}  // namespace

std::vector<TrialResult> run_scheme2(const ExperimentSpec& spec) {
  if (spec.scheme != Scheme::Waveform) throw ValidationError("run_scheme2: wrong scheme");
  return run_scheme2_impl(spec, nullptr);
}

int effective_epsilon(const ExperimentSpec& spec) {
  if (spec.epsilon_s > 0.0) {
    return static_cast<int>(std::max<std::int64_t>(1, std::llround(spec.epsilon_s / spec.delta_spp)));
  }
  return spec.epsilon_samples;
}

double chance_floor(const ExperimentSpec& spec) {
  const std::size_t n_ref = enf_samples(spec.l_r_s, spec.delta_spp);
  const std::size_t n_test = enf_samples(spec.l_t_s, spec.delta_spp);
  const double n_offsets = static_cast<double>(n_ref - n_test + 1);
  return std::min(1.0, (2.0 * effective_epsilon(spec) - 1.0) / n_offsets);
}

namespace {

GridPointReport aggregate(const ExperimentSpec& spec, std::vector<TrialResult> trials,
                          std::string backing) {
  GridPointReport rep;
  rep.l_t_s = spec.l_t_s;
  rep.l_r_s = spec.l_r_s;
  rep.delta_spp = spec.delta_spp;
  rep.snr_db = spec.snr_db;
  rep.backing = std::move(backing);
  rep.trials = static_cast<int>(trials.size());
  std::size_t successes = 0;
  double err_sum = 0.0;
  double best_sum = 0.0;
  for (const TrialResult& t : trials) {
    successes += t.success ? 1 : 0;
    err_sum += static_cast<double>(t.abs_error_samples) * spec.delta_spp;
    best_sum += t.best_metric_value;
  }
  rep.accuracy = static_cast<double>(successes) / static_cast<double>(trials.size());
  rep.mean_abs_error_s = err_sum / static_cast<double>(trials.size());
  rep.mean_best_metric = best_sum / static_cast<double>(trials.size());
  rep.trial_results = std::move(trials);
  return rep;
}

}  // namespace

AccuracyReport sweep(const FactorGrid& grid, const ExperimentSpec& base) {
  const std::vector<double> lts = grid.l_t_s.empty() ? std::vector<double>{base.l_t_s}
                                                     : grid.l_t_s;
  const std::vector<double> lrs = grid.l_r_s.empty() ? std::vector<double>{base.l_r_s}
                                                     : grid.l_r_s;
  const std::vector<double> deltas =
      grid.delta_spp.empty() ? std::vector<double>{base.delta_spp} : grid.delta_spp;
  const std::vector<double> snrs = grid.snr_db.empty() ? std::vector<double>{base.snr_db}
                                                       : grid.snr_db;

  AccuracyReport report;
  report.scheme = base.scheme;
  for (double lt : lts) {
    for (double lr : lrs) {
      for (double delta : deltas) {
        for (double snr : snrs) {
          ExperimentSpec spec = base;
          spec.l_t_s = lt;
          spec.l_r_s = lr;
          spec.delta_spp = delta;
          spec.snr_db = snr;
          GridPointReport rep;
          try {
            validate_spec(spec);
            std::vector<TrialResult> trials;
            std::string backing;
            CensusSummary census;
            switch (spec.scheme) {
              case Scheme::Synthetic:
                trials = run_tfd_scheme(spec, false, &census);
                backing = "tfd-synthetic";
                break;
              case Scheme::WhiteGaussian:
                trials = run_tfd_scheme(spec, true, &census);
                backing = "white-gaussian";
                break;
              case Scheme::Waveform:
                trials = run_scheme2_impl(spec, &census);
                backing = spec.reference_file.empty() ? "waveform-synthetic"
                                                      : "file:" + spec.reference_file;
                break;
            }
            rep = aggregate(spec, std::move(trials), std::move(backing));
            rep.census = std::move(census);
          } catch (const std::exception& e) {
            rep.l_t_s = lt;
            rep.l_r_s = lr;
            rep.delta_spp = delta;
            rep.snr_db = snr;
            rep.valid = false;
            rep.error = e.what();
          }
          report.points.push_back(std::move(rep));
        }
      }
    }
  }
  return report;
}

std::vector<std::pair<int, double>> ar_coefficient_vs_decimation(
    const Ar1Params& model, const std::vector<int>& factors, std::size_t fine_length,
    int repeats, std::uint64_t seed) {
  if (factors.empty() || repeats < 1) {
    throw ValidationError("ar_coefficient_vs_decimation: empty study");
  }
  std::vector<double> sums(factors.size(), 0.0);
  for (int rep = 0; rep < repeats; ++rep) {
    const EnfSeries fine = synthesize_ar1(fine_length, model, 1.0, 50.0,
                                          rng::derive_seed(seed, static_cast<std::uint64_t>(rep)));
    for (std::size_t fi = 0; fi < factors.size(); ++fi) {
      const int d = factors[fi];
      if (d < 1) throw ValidationError("ar_coefficient_vs_decimation: factor must be >= 1");
      EnfSeries dec;
      dec.resolution_spp = static_cast<double>(d);
      dec.nominal_hz = fine.nominal_hz;
      for (std::size_t i = 0; i < fine.samples.size(); i += static_cast<std::size_t>(d)) {
        dec.samples.push_back(fine.samples[i]);
      }
      sums[fi] += fit_ar1(dec).a;
    }
  }
  std::vector<std::pair<int, double>> out;
  out.reserve(factors.size());
  for (std::size_t fi = 0; fi < factors.size(); ++fi) {
    out.emplace_back(factors[fi], sums[fi] / repeats);
  }
  return out;
}

}  // namespace enf
