// Copyright (c) enfkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "enf/model.hpp"
#include "enf/synthesis.hpp"

namespace enf {

// EnfSeries CSV: header "offset_s,frequency_hz", one row per sample,
// offsets uniformly spaced by delta. Frequencies round-trip losslessly.
// The parser rejects spacing deviations beyond 1e-6 s. The format carries
// no nominal column; it is inferred (closer of 50/60 to the sample mean)
// unless an override is given.
void write_enf_csv(const EnfSeries& enf, const std::filesystem::path& path);
EnfSeries read_enf_csv(const std::filesystem::path& path,
                       std::optional<double> nominal_hz = std::nullopt);

// ENFT: 16-byte header (magic "ENFT", u32 version = 1, f64 sample rate,
// little endian) followed by f64 little-endian samples. Lossless.
void write_enft(const TadSignal& signal, const std::filesystem::path& path);
TadSignal read_enft(const std::filesystem::path& path);

// RIFF WAV, 16-bit PCM mono. Doubles decode as v/32768; encoding clamps to
// [-32768, 32767], so decoded data round-trips exactly.
void write_wav16(const TadSignal& signal, const std::filesystem::path& path);
TadSignal read_wav16(const std::filesystem::path& path);

// Dispatch on extension, falling back to magic-byte sniffing.
TadSignal read_tad_auto(const std::filesystem::path& path);

// Accepts "YYYY-MM-DDTHH:MM:SSZ" or a plain integer second count.
std::int64_t parse_utc(const std::string& text);
std::string format_utc(double utc_s);

enum class SegmentKind { EnfCsv, Wav, Enft };

SegmentKind segment_kind_from_string(const std::string& s);
std::string to_string(SegmentKind kind);

struct SegmentInfo {
  std::string grid_label;
  std::int64_t start_utc = 0;
  double duration_s = 0.0;
  SegmentKind kind = SegmentKind::EnfCsv;
  std::string file;  // relative to the store root
  std::uint64_t samples = 0;
  double rate_or_delta = 0.0;  // delta_spp for ENF, sample rate for TAD
};

// Flat-file reference store: one directory per grid label plus a JSON
// index. Single writer, readers see the index snapshot they load.
class ReferenceStore {
public:
  explicit ReferenceStore(std::filesystem::path root);

  const std::vector<SegmentInfo>& segments() const { return segments_; }

  // Parses and validates the file, rejects overlap with existing segments
  // of the same grid label, copies a canonical version into the store, and
  // updates the index.
  SegmentInfo ingest(const std::filesystem::path& file, SegmentKind kind,
                     const std::string& grid_label, std::int64_t start_utc);

  // Exact sub-range extraction over [t0, t1). Contiguous segments are
  // joined; a coverage gap is reported as an error, never bridged.
  std::variant<EnfSeries, TadSignal> fetch(const std::string& grid_label, std::int64_t t0_utc,
                                           std::int64_t t1_utc) const;

  // UTC position of matched offset k within a fetch that started at t0.
  static double offset_to_utc(double t0_utc, std::size_t k, double delta_spp) {
    return t0_utc + static_cast<double>(k) * delta_spp;
  }

private:
  void load_index();
  void save_index() const;

  std::filesystem::path root_;
  std::vector<SegmentInfo> segments_;
};

}  // namespace enf
