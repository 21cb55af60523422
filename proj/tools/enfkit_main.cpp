// Copyright (c) enfkit authors
// SPDX-License-Identifier: Apache-2.0
//
// enfkit command line: ENF synthesis, estimation, matching, reliability
// sweeps, and the flat-file reference store.
//
// Exit codes: 0 success, 2 validation/config error, 3 data error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "enf/common.hpp"
#include "enf/estimation.hpp"
#include "enf/harness.hpp"
#include "enf/io.hpp"
#include "enf/matching.hpp"
#include "enf/model.hpp"
#include "enf/synthesis.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 1;
  double nominal_hz = 50.0;
  std::string out;
};

enf::Window parse_window(const std::string& name) {
  if (name == "hann") return enf::Window::Hann;
  if (name == "hamming") return enf::Window::Hamming;
  if (name == "rect" || name == "rectangular") return enf::Window::Rectangular;
  throw enf::ValidationError("unknown window: " + name);
}

std::string snr_to_string(double snr_db) {
  if (std::isinf(snr_db)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", snr_db);
  return buf;
}

// ---------------------------------------------------------------- sweep config

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      throw enf::ValidationError("config: unknown key '" + item.key() + "' in " + where);
    }
  }
}

double parse_snr_value(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_null()) return enf::kInfDb;
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "noise-free") return enf::kInfDb;
  }
  throw enf::ValidationError("config: snr_db entries must be numbers or \"inf\"");
}

struct SweepConfig {
  enf::ExperimentSpec base;
  enf::FactorGrid grid;
};

SweepConfig load_sweep_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw enf::DataError("cannot open config: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw enf::DataError("config parse error: " + std::string(e.what()));
  }

  reject_unknown_keys(j, {"scheme", "trials", "master_seed", "metric", "nominal_hz",
                          "sample_rate_hz", "epsilon_s", "epsilon_samples", "model",
                          "crlb_frame_len", "estimator", "reference_file", "threads",
                          "grid"},
                      "top level");

  SweepConfig cfg;
  enf::ExperimentSpec& s = cfg.base;

  const std::string scheme = j.value("scheme", "synthetic");
  if (scheme == "synthetic") {
    s.scheme = enf::Scheme::Synthetic;
  } else if (scheme == "waveform") {
    s.scheme = enf::Scheme::Waveform;
  } else if (scheme == "white") {
    s.scheme = enf::Scheme::WhiteGaussian;
  } else {
    throw enf::ValidationError("config: scheme must be synthetic|waveform|white");
  }

  s.trials = j.value("trials", 100);
  s.master_seed = j.value("master_seed", std::uint64_t{1});
  const std::string metric = j.value("metric", "cc");
  if (metric == "cc") {
    s.metric = enf::MetricKind::Cc;
  } else if (metric == "mse") {
    s.metric = enf::MetricKind::Mse;
  } else {
    throw enf::ValidationError("config: metric must be cc|mse");
  }
  s.nominal_hz = j.value("nominal_hz", 50.0);
  s.sample_rate_hz = j.value("sample_rate_hz", 400.0);
  s.epsilon_s = j.value("epsilon_s", j.contains("epsilon_samples") ? 0.0 : 10.0);
  s.epsilon_samples = j.value("epsilon_samples", 10);
  s.crlb_frame_len = j.value("crlb_frame_len", 6400);
  s.reference_file = j.value("reference_file", std::string{});
  s.threads = j.value("threads", 0);

  if (j.contains("model")) {
    reject_unknown_keys(j["model"], {"a", "sigma_x"}, "model");
    s.model.a = j["model"].value("a", s.model.a);
    s.model.sigma_x = j["model"].value("sigma_x", s.model.sigma_x);
  }
  if (s.scheme == enf::Scheme::WhiteGaussian && !j.contains("model")) {
    s.model.sigma_x = enf::Ar1Params{}.stationary_sigma();
  }
  if (j.contains("estimator")) {
    reject_unknown_keys(j["estimator"],
                        {"frame_len_s", "pad_factor", "band_halfwidth_hz", "window"},
                        "estimator");
    s.estimator.frame_len_s = j["estimator"].value("frame_len_s", 16.0);
    s.estimator.fft_zero_pad_factor = j["estimator"].value("pad_factor", 4);
    s.estimator.band_halfwidth_hz = j["estimator"].value("band_halfwidth_hz", 1.0);
    s.estimator.window = parse_window(j["estimator"].value("window", "hann"));
  }

  if (!j.contains("grid")) throw enf::ValidationError("config: missing grid");
  reject_unknown_keys(j["grid"], {"l_t_s", "l_r_s", "delta_spp", "snr_db"}, "grid");
  const json& g = j["grid"];
  if (g.contains("l_t_s")) cfg.grid.l_t_s = g["l_t_s"].get<std::vector<double>>();
  if (g.contains("l_r_s")) cfg.grid.l_r_s = g["l_r_s"].get<std::vector<double>>();
  if (g.contains("delta_spp")) cfg.grid.delta_spp = g["delta_spp"].get<std::vector<double>>();
  if (g.contains("snr_db")) {
    for (const json& v : g["snr_db"]) cfg.grid.snr_db.push_back(parse_snr_value(v));
  }
  const std::size_t points = std::max<std::size_t>(1, cfg.grid.l_t_s.size()) *
                             std::max<std::size_t>(1, cfg.grid.l_r_s.size()) *
                             std::max<std::size_t>(1, cfg.grid.delta_spp.size()) *
                             std::max<std::size_t>(1, cfg.grid.snr_db.size());
  if (points == 0) throw enf::ValidationError("config: empty grid");
  return cfg;
}

json normalized_config(const SweepConfig& cfg) {
  const enf::ExperimentSpec& s = cfg.base;
  json grid;
  grid["l_t_s"] = cfg.grid.l_t_s.empty() ? std::vector<double>{s.l_t_s} : cfg.grid.l_t_s;
  grid["l_r_s"] = cfg.grid.l_r_s.empty() ? std::vector<double>{s.l_r_s} : cfg.grid.l_r_s;
  grid["delta_spp"] =
      cfg.grid.delta_spp.empty() ? std::vector<double>{s.delta_spp} : cfg.grid.delta_spp;
  json snrs = json::array();
  if (cfg.grid.snr_db.empty()) {
    snrs.push_back(snr_to_string(s.snr_db));
  } else {
    for (double v : cfg.grid.snr_db) {
      if (std::isinf(v)) {
        snrs.push_back("inf");
      } else {
        snrs.push_back(v);
      }
    }
  }
  grid["snr_db"] = snrs;
  return json{
      {"scheme", s.scheme == enf::Scheme::Synthetic
                     ? "synthetic"
                     : (s.scheme == enf::Scheme::Waveform ? "waveform" : "white")},
      {"trials", s.trials},
      {"master_seed", s.master_seed},
      {"metric", s.metric == enf::MetricKind::Cc ? "cc" : "mse"},
      {"nominal_hz", s.nominal_hz},
      {"sample_rate_hz", s.sample_rate_hz},
      {"epsilon_s", s.epsilon_s},
      {"epsilon_samples", s.epsilon_samples},
      {"model", {{"a", s.model.a}, {"sigma_x", s.model.sigma_x}}},
      {"crlb_frame_len", s.crlb_frame_len},
      {"estimator",
       {{"frame_len_s", s.estimator.frame_len_s},
        {"pad_factor", s.estimator.fft_zero_pad_factor},
        {"band_halfwidth_hz", s.estimator.band_halfwidth_hz}}},
      {"reference_file", s.reference_file},
      {"threads", s.threads},
      {"grid", grid},
  };
}

// ---------------------------------------------------------------- sweep output

void write_report_csv(const enf::AccuracyReport& rep, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw enf::DataError("cannot write " + path.string());
  std::vector<double> thresholds;
  for (const enf::GridPointReport& p : rep.points) {
    if (!p.census.thresholds.empty()) {
      thresholds = p.census.thresholds;
      break;
    }
  }
  out << "l_t_s,l_r_s,delta_spp,snr_db,valid,backing,trials,accuracy,"
         "mean_abs_error_s,mean_best_metric";
  for (double t : thresholds) out << ",census_ge_" << t;
  out << ",error\n";
  char buf[256];
  for (const enf::GridPointReport& p : rep.points) {
    std::snprintf(buf, sizeof(buf), "%g,%g,%g,%s,%d,%s,%d,%.6g,%.6g,%.9g", p.l_t_s,
                  p.l_r_s, p.delta_spp, snr_to_string(p.snr_db).c_str(), p.valid ? 1 : 0,
                  p.backing.c_str(), p.trials, p.accuracy, p.mean_abs_error_s,
                  p.mean_best_metric);
    out << buf;
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
      if (i < p.census.mean_counts.size()) {
        out << ',' << p.census.mean_counts[i];
      } else {
        out << ',';
      }
    }
    out << ',' << p.error << "\n";
  }
}

void write_trials_csv(const enf::AccuracyReport& rep, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw enf::DataError("cannot write " + path.string());
  out << "l_t_s,l_r_s,delta_spp,snr_db,trial,k0,k_hat,abs_error_samples,success,"
         "best_metric_value\n";
  char buf[256];
  for (const enf::GridPointReport& p : rep.points) {
    for (const enf::TrialResult& t : p.trial_results) {
      std::snprintf(buf, sizeof(buf), "%g,%g,%g,%s,%d,%lld,%lld,%llu,%d,%.9g\n", p.l_t_s,
                    p.l_r_s, p.delta_spp, snr_to_string(p.snr_db).c_str(), t.trial_index,
                    static_cast<long long>(t.k0), static_cast<long long>(t.k_hat),
                    static_cast<unsigned long long>(t.abs_error_samples),
                    t.success ? 1 : 0, t.best_metric_value);
      out << buf;
    }
  }
}

// One gnuplot-ready columnar file per swept factor: column 1 is the factor,
// remaining columns are accuracies for each combination of the others.
void write_plot_files(const enf::AccuracyReport& rep, const fs::path& dir) {
  struct Axis {
    const char* name;
    double enf::GridPointReport::*field;
  };
  const std::vector<Axis> axes = {{"l_t_s", &enf::GridPointReport::l_t_s},
                                  {"l_r_s", &enf::GridPointReport::l_r_s},
                                  {"delta_spp", &enf::GridPointReport::delta_spp},
                                  {"snr_db", &enf::GridPointReport::snr_db}};
  for (const Axis& axis : axes) {
    std::set<double> values;
    for (const enf::GridPointReport& p : rep.points) {
      if (p.valid) values.insert(p.*(axis.field));
    }
    if (values.size() < 2) continue;

    // key = the remaining factors, one plot column per distinct key
    const auto key_of = [&](const enf::GridPointReport& p) {
      std::string key;
      char buf[128];
      for (const Axis& other : axes) {
        if (other.name == axis.name) continue;
        std::snprintf(buf, sizeof(buf), "%s=%s ", other.name,
                      snr_to_string(p.*(other.field)).c_str());
        key += buf;
      }
      return key;
    };
    std::set<std::string> keys;
    std::map<std::pair<std::string, double>, double> acc;
    for (const enf::GridPointReport& p : rep.points) {
      if (!p.valid) continue;
      keys.insert(key_of(p));
      acc[{key_of(p), p.*(axis.field)}] = p.accuracy;
    }

    std::ofstream out(dir / (std::string("plot_") + axis.name + ".dat"));
    out << "# accuracy vs " << axis.name << "\n# columns:";
    for (const std::string& k : keys) out << " [" << (k.empty() ? "all" : k) << "]";
    out << "\n";
    for (double v : values) {
      out << v;
      for (const std::string& k : keys) {
        const auto it = acc.find({k, v});
        if (it == acc.end()) {
          out << "\tnan";
        } else {
          out << '\t' << it->second;
        }
      }
      out << "\n";
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ENF modeling, synthesis, estimation, and time-stamp matching"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "master RNG seed")->capture_default_str();
  app.add_option("--nominal-hz", g.nominal_hz, "nominal mains frequency (50 or 60)")
      ->capture_default_str();
  app.add_option("--out", g.out, "output path (per-command meaning)");

  // ------------------------------------------------ synthesize
  auto* synth = app.add_subcommand("synthesize", "generate ENF series or waveforms");
  double sy_length_s = 3600.0;
  double sy_delta = 1.0;
  double sy_a = 0.99;
  double sy_sigma = 3e-3;
  double sy_tfd_snr = enf::kInfDb;
  int sy_nf = 6400;
  double sy_rate = 400.0;
  bool sy_tad = false;
  double sy_phase = 0.0;
  double sy_awgn = enf::kInfDb;
  synth->add_option("--length-s", sy_length_s, "series duration in seconds")
      ->capture_default_str();
  synth->add_option("--delta", sy_delta, "temporal resolution, seconds per point")
      ->capture_default_str();
  synth->add_option("--a", sy_a, "AR(1) coefficient")->capture_default_str();
  synth->add_option("--sigma-x", sy_sigma, "innovation std dev, Hz")->capture_default_str();
  synth->add_option("--tfd-snr-db", sy_tfd_snr, "add CRLB-calibrated TFD noise at this SNR");
  synth->add_option("--crlb-frame-len", sy_nf, "N_F for the TFD noise model")
      ->capture_default_str();
  synth->add_flag("--tad", sy_tad, "emit a waveform instead of an ENF series");
  synth->add_option("--sample-rate", sy_rate, "waveform sample rate, Hz")
      ->capture_default_str();
  synth->add_option("--phase", sy_phase, "waveform initial phase, rad")->capture_default_str();
  synth->add_option("--awgn-snr-db", sy_awgn, "add AWGN to the waveform at this SNR");

  // ------------------------------------------------ estimate
  auto* est = app.add_subcommand("estimate", "extract an ENF series from a waveform");
  std::string es_in;
  double es_frame = 16.0;
  double es_step = 1.0;
  double es_center = 0.0;
  double es_halfwidth = 1.0;
  int es_pad = 4;
  std::string es_window = "hann";
  est->add_option("--in", es_in, "input waveform (.wav or .enft)")->required();
  est->add_option("--band-center", es_center, "search band center, Hz (default: nominal)");
  est->add_option("--frame-len-s", es_frame, "frame length, s")->capture_default_str();
  est->add_option("--step-s", es_step, "hop / temporal resolution delta, s")
      ->capture_default_str();
  est->add_option("--band-halfwidth", es_halfwidth, "search halfwidth around nominal, Hz")
      ->capture_default_str();
  est->add_option("--pad-factor", es_pad, "FFT zero-padding factor")->capture_default_str();
  est->add_option("--window", es_window, "hann|hamming|rect")->capture_default_str();

  // ------------------------------------------------ match
  auto* match = app.add_subcommand("match", "slide a test series over a reference");
  std::string ma_test, ma_ref, ma_trace, ma_ref_start;
  std::string ma_metric = "cc";
  int ma_epsilon = 10;
  double ma_epsilon_s = 0.0;
  std::int64_t ma_k0 = -1;
  bool ma_have_k0 = false;
  match->add_option("--test", ma_test, "test ENF CSV")->required();
  match->add_option("--ref", ma_ref, "reference ENF CSV")->required();
  match->add_option("--metric", ma_metric, "cc|mse")->capture_default_str();
  match->add_option("--epsilon", ma_epsilon, "tolerance in samples")->capture_default_str();
  match->add_option("--epsilon-s", ma_epsilon_s, "tolerance in seconds (overrides --epsilon)");
  match->add_option("--k0", ma_k0, "ground-truth offset for the decision")
      ->each([&](const std::string&) { ma_have_k0 = true; });
  match->add_option("--trace", ma_trace, "write the full per-offset trace CSV here");
  match->add_option("--ref-start-utc", ma_ref_start,
                    "reference start time; adds matched_utc to the summary");

  // ------------------------------------------------ census
  auto* census = app.add_subcommand("census", "count similar matches above CC thresholds");
  std::string ce_test, ce_ref, ce_hist;
  std::vector<double> ce_thresholds{0.8, 0.9, 0.99};
  census->add_option("--test", ce_test, "test ENF CSV")->required();
  census->add_option("--ref", ce_ref, "reference ENF CSV")->required();
  census->add_option("--thresholds", ce_thresholds, "CC thresholds")
      ->delimiter(',')
      ->capture_default_str();
  census->add_option("--hist", ce_hist, "write the CC histogram CSV here");

  // ------------------------------------------------ sweep + check-config
  auto* sweep_cmd = app.add_subcommand("sweep", "run a Monte Carlo factor sweep");
  std::string sw_config, sw_outdir = "sweep-out";
  int sw_threads = -1;
  sweep_cmd->add_option("--config", sw_config, "JSON sweep configuration")->required();
  sweep_cmd->add_option("--out-dir", sw_outdir, "output directory")->capture_default_str();
  sweep_cmd->add_option("--threads", sw_threads, "worker threads (0 = auto)");

  auto* check = app.add_subcommand("check-config", "validate a sweep configuration");
  std::string ck_config;
  check->add_option("--config", ck_config, "JSON sweep configuration")->required();

  // ------------------------------------------------ ingest + fetch
  auto* ingest = app.add_subcommand("ingest", "add a segment to a reference store");
  std::string in_store, in_file, in_kind, in_grid, in_start;
  ingest->add_option("--store", in_store, "store root directory")->required();
  ingest->add_option("--file", in_file, "segment file to ingest")->required();
  ingest->add_option("--kind", in_kind, "enf_csv|wav|enft")->required();
  ingest->add_option("--grid", in_grid, "grid label")->required();
  ingest->add_option("--start-utc", in_start, "segment start (ISO-8601 Z or seconds)")
      ->required();

  auto* fetch = app.add_subcommand("fetch", "extract a time range from a reference store");
  std::string fe_store, fe_grid, fe_t0, fe_t1;
  fetch->add_option("--store", fe_store, "store root directory")->required();
  fetch->add_option("--grid", fe_grid, "grid label")->required();
  fetch->add_option("--t0", fe_t0, "range start (ISO-8601 Z or seconds)")->required();
  fetch->add_option("--t1", fe_t1, "range end, exclusive")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      const auto n = static_cast<std::size_t>(std::llround(sy_length_s / sy_delta));
      enf::EnfSeries series =
          enf::synthesize_ar1(n, {sy_a, sy_sigma}, sy_delta, g.nominal_hz, g.seed);
      if (std::isfinite(sy_tfd_snr)) {
        series = enf::synthesize_noisy_enf_tfd(
            series, {enf::snr_db_to_linear(sy_tfd_snr), sy_nf, sy_rate}, g.seed + 1);
      }
      if (!sy_tad) {
        if (g.out.empty()) throw enf::ValidationError("synthesize: --out is required");
        enf::write_enf_csv(series, g.out);
        std::printf("wrote %zu ENF samples to %s\n", series.samples.size(), g.out.c_str());
      } else {
        enf::TadSynthesisParams tp;
        tp.sample_rate_hz = sy_rate;
        tp.initial_phase_rad = sy_phase;
        enf::TadSignal tad = enf::synthesize_tad(enf::upsample_enf(series, sy_rate), tp);
        if (std::isfinite(sy_awgn)) {
          tad = enf::add_awgn(tad, enf::snr_db_to_linear(sy_awgn), g.seed + 2);
        }
        if (g.out.empty()) throw enf::ValidationError("synthesize: --out is required");
        if (fs::path(g.out).extension() == ".wav") {
          enf::write_wav16(tad, g.out);
        } else {
          enf::write_enft(tad, g.out);
        }
        std::printf("wrote %zu waveform samples to %s\n", tad.samples.size(), g.out.c_str());
      }
    } else if (est->parsed()) {
      const enf::TadSignal sig = enf::read_tad_auto(es_in);
      enf::EstimatorConfig cfg;
      cfg.frame_len_s = es_frame;
      cfg.step_s = es_step;
      cfg.band_center_hz = es_center > 0.0 ? es_center : g.nominal_hz;
      cfg.band_halfwidth_hz = es_halfwidth;
      cfg.fft_zero_pad_factor = es_pad;
      cfg.window = parse_window(es_window);
      const enf::EnfSeries series = enf::estimate_if(sig, cfg);
      if (g.out.empty()) throw enf::ValidationError("estimate: --out is required");
      enf::write_enf_csv(series, g.out);
      std::printf("wrote %zu ENF samples to %s\n", series.samples.size(), g.out.c_str());
    } else if (match->parsed()) {
      const enf::EnfSeries test = enf::read_enf_csv(ma_test, g.nominal_hz);
      const enf::EnfSeries ref = enf::read_enf_csv(ma_ref, g.nominal_hz);
      const enf::MatchOutcome outcome = ma_metric == "mse" ? enf::match_mse(test, ref)
                                                           : enf::match_cc(test, ref);
      json summary = {
          {"metric", ma_metric},
          {"k_hat", outcome.k_hat},
          {"best_value", outcome.best_value},
          {"num_offsets", outcome.num_offsets},
          {"offset_seconds", static_cast<double>(outcome.k_hat) * outcome.resolution_spp},
      };
      if (ma_have_k0) {
        enf::MatchConfig mc;
        mc.epsilon_samples = ma_epsilon_s > 0.0
                                 ? std::max(1, static_cast<int>(std::llround(
                                                   ma_epsilon_s / outcome.resolution_spp)))
                                 : ma_epsilon;
        mc.ground_truth_k0 = ma_k0;
        const enf::MatchDecision d = enf::decide(outcome, mc);
        summary["success"] = d.success;
        summary["abs_error_samples"] = d.abs_error_samples;
        summary["error_seconds"] = d.error_seconds;
      }
      if (!ma_ref_start.empty()) {
        const double t0 = static_cast<double>(enf::parse_utc(ma_ref_start));
        summary["matched_utc"] = enf::format_utc(
            enf::ReferenceStore::offset_to_utc(t0, outcome.k_hat, outcome.resolution_spp));
      }
      if (!ma_trace.empty()) {
        std::ofstream out(ma_trace);
        if (!out) throw enf::DataError("cannot write " + ma_trace);
        out << "offset_samples,value\n";
        for (std::size_t k = 0; k < outcome.trace.size(); ++k) {
          char buf[64];
          std::snprintf(buf, sizeof(buf), "%zu,%.9g\n", k, outcome.trace[k]);
          out << buf;
        }
      }
      const std::string line = summary.dump();
      std::printf("%s\n", line.c_str());
      if (!g.out.empty()) {
        std::ofstream out(g.out);
        out << line << "\n";
      }
    } else if (census->parsed()) {
      const enf::EnfSeries test = enf::read_enf_csv(ce_test, g.nominal_hz);
      const enf::EnfSeries ref = enf::read_enf_csv(ce_ref, g.nominal_hz);
      enf::CensusConfig cfg;
      cfg.thresholds = ce_thresholds;
      const enf::CensusResult res = enf::census_similar(test, ref, cfg);
      json summary = {{"thresholds", cfg.thresholds},
                      {"counts", res.counts},
                      {"num_offsets", res.num_offsets},
                      {"num_valid_offsets", res.num_valid_offsets}};
      if (!ce_hist.empty()) {
        std::ofstream out(ce_hist);
        if (!out) throw enf::DataError("cannot write " + ce_hist);
        out << "cc_bin_lo,cc_bin_hi,count\n";
        for (std::size_t b = 0; b < res.histogram.size(); ++b) {
          char buf[64];
          std::snprintf(buf, sizeof(buf), "%.1f,%.1f,%zu\n", -1.0 + 0.1 * b,
                        -0.9 + 0.1 * b, res.histogram[b]);
          out << buf;
        }
      }
      const std::string line = summary.dump();
      std::printf("%s\n", line.c_str());
      if (!g.out.empty()) {
        std::ofstream out(g.out);
        out << line << "\n";
      }
    } else if (sweep_cmd->parsed()) {
      SweepConfig cfg = load_sweep_config(sw_config);
      if (sw_threads >= 0) cfg.base.threads = sw_threads;
      const enf::AccuracyReport rep = enf::sweep(cfg.grid, cfg.base);
      fs::create_directories(sw_outdir);
      write_report_csv(rep, fs::path(sw_outdir) / "report.csv");
      write_trials_csv(rep, fs::path(sw_outdir) / "trials.csv");
      write_plot_files(rep, sw_outdir);
      int invalid = 0;
      for (const enf::GridPointReport& p : rep.points) invalid += p.valid ? 0 : 1;
      std::printf("swept %zu grid points (%d invalid) -> %s\n", rep.points.size(), invalid,
                  sw_outdir.c_str());
      for (const enf::GridPointReport& p : rep.points) {
        if (!p.valid) {
          std::printf("  skipped l_t=%g l_r=%g delta=%g snr=%s: %s\n", p.l_t_s, p.l_r_s,
                      p.delta_spp, snr_to_string(p.snr_db).c_str(), p.error.c_str());
        }
      }
    } else if (check->parsed()) {
      const SweepConfig cfg = load_sweep_config(ck_config);
      std::printf("%s\n", normalized_config(cfg).dump(2).c_str());
    } else if (ingest->parsed()) {
      enf::ReferenceStore store{fs::path(in_store)};
      const enf::SegmentInfo info = store.ingest(
          in_file, enf::segment_kind_from_string(in_kind), in_grid, enf::parse_utc(in_start));
      std::printf("ingested %s: %llu samples, [%s, %s)\n", info.file.c_str(),
                  static_cast<unsigned long long>(info.samples),
                  enf::format_utc(static_cast<double>(info.start_utc)).c_str(),
                  enf::format_utc(static_cast<double>(info.start_utc) + info.duration_s)
                      .c_str());
    } else if (fetch->parsed()) {
      enf::ReferenceStore store{fs::path(fe_store)};
      const auto result =
          store.fetch(fe_grid, enf::parse_utc(fe_t0), enf::parse_utc(fe_t1));
      if (g.out.empty()) throw enf::ValidationError("fetch: --out is required");
      if (std::holds_alternative<enf::EnfSeries>(result)) {
        enf::write_enf_csv(std::get<enf::EnfSeries>(result), g.out);
        std::printf("wrote %zu ENF samples to %s\n",
                    std::get<enf::EnfSeries>(result).samples.size(), g.out.c_str());
      } else {
        const enf::TadSignal& tad = std::get<enf::TadSignal>(result);
        if (fs::path(g.out).extension() == ".wav") {
          enf::write_wav16(tad, g.out);
        } else {
          enf::write_enft(tad, g.out);
        }
        std::printf("wrote %zu waveform samples to %s\n", tad.samples.size(), g.out.c_str());
      }
    }
  } catch (const enf::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const enf::DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
