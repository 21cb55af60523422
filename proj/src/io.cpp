// Copyright (c) enfkit authors
// SPDX-License-Identifier: Apache-2.0

#include "enf/io.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "enf/common.hpp"

namespace enf {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u16(std::ostream& out, std::uint16_t v) {
  unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>(v >> 8)};
  out.write(reinterpret_cast<const char*>(b), 2);
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(u >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint16_t get_u16(std::istream& in) {
  unsigned char b[2];
  in.read(reinterpret_cast<char*>(b), 2);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t u = 0;
  for (int i = 7; i >= 0; --i) u = (u << 8) | b[i];
  double v;
  std::memcpy(&v, &u, 8);
  return v;
}

double infer_nominal(const std::vector<double>& samples) {
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(samples.size());
  return std::fabs(mean - 60.0) < std::fabs(mean - 50.0) ? 60.0 : 50.0;
}

}  // namespace

void write_enf_csv(const EnfSeries& enf, const fs::path& path) {
  if (enf.samples.empty()) throw ValidationError("write_enf_csv: empty series");
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << "offset_s,frequency_hz\n";
  char line[80];
  for (std::size_t i = 0; i < enf.samples.size(); ++i) {
    const double off = enf.start_offset_s + static_cast<double>(i) * enf.resolution_spp;
    std::snprintf(line, sizeof(line), "%.9f,%.17g\n", off, enf.samples[i]);
    out << line;
  }
  if (!out) throw DataError("write failed: " + path.string());
}

EnfSeries read_enf_csv(const fs::path& path, std::optional<double> nominal_hz) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path.string());
  std::string header;
  if (!std::getline(in, header)) throw DataError("empty file: " + path.string());
  while (!header.empty() && (header.back() == '\r' || header.back() == '\n')) header.pop_back();
  if (header != "offset_s,frequency_hz") {
    throw DataError("bad CSV header in " + path.string() + " (want offset_s,frequency_hz)");
  }

  std::vector<double> offsets;
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    char* end = nullptr;
    const double off = std::strtod(line.c_str(), &end);
    if (end == line.c_str() || *end != ',') {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": malformed row");
    }
    const char* second = end + 1;
    const double val = std::strtod(second, &end);
    if (end == second) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": malformed row");
    }
    offsets.push_back(off);
    values.push_back(val);
  }
  if (values.size() < 2) throw DataError(path.string() + ": need at least 2 rows");

  const double delta =
      (offsets.back() - offsets.front()) / static_cast<double>(offsets.size() - 1);
  if (!(delta > 0.0)) throw DataError(path.string() + ": offsets must increase");
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    const double expect = offsets.front() + static_cast<double>(i) * delta;
    if (std::fabs(offsets[i] - expect) > 1e-6) {
      throw DataError(path.string() + ":" + std::to_string(i + 2) +
                      ": non-uniform sample spacing (beyond 1e-6 s)");
    }
  }

  EnfSeries out;
  out.samples = std::move(values);
  out.resolution_spp = delta;
  out.start_offset_s = offsets.front();
  out.nominal_hz = nominal_hz.value_or(infer_nominal(out.samples));
  return out;
}

void write_enft(const TadSignal& signal, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out.write("ENFT", 4);
  put_u32(out, 1);
  put_f64(out, signal.sample_rate_hz);
  for (double s : signal.samples) put_f64(out, s);
  if (!out) throw DataError("write failed: " + path.string());
}

TadSignal read_enft(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "ENFT", 4) != 0) {
    throw DataError(path.string() + ": not an ENFT file");
  }
  const std::uint32_t version = get_u32(in);
  if (version != 1) throw DataError(path.string() + ": unsupported ENFT version");
  TadSignal out;
  out.sample_rate_hz = get_f64(in);
  if (!in || !(out.sample_rate_hz > 0.0)) throw DataError(path.string() + ": bad sample rate");
  while (true) {
    const double v = get_f64(in);
    if (!in) break;
    out.samples.push_back(v);
  }
  if (out.samples.empty()) throw DataError(path.string() + ": no samples");
  return out;
}

void write_wav16(const TadSignal& signal, const fs::path& path) {
  const double rate = signal.sample_rate_hz;
  const auto irate = static_cast<std::uint32_t>(std::llround(rate));
  if (std::fabs(rate - static_cast<double>(irate)) > 1e-6 || irate == 0) {
    throw ValidationError("write_wav16: sample rate must be a positive integer");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(signal.samples.size() * 2);
  out.write("RIFF", 4);
  put_u32(out, 36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, irate);
  put_u32(out, irate * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out.write("data", 4);
  put_u32(out, data_bytes);
  for (double s : signal.samples) {
    const double scaled = std::round(s * 32768.0);
    const auto q = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
    put_u16(out, static_cast<std::uint16_t>(q));
  }
  if (!out) throw DataError("write failed: " + path.string());
}

TadSignal read_wav16(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path.string());
  char tag[4];
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "RIFF", 4) != 0) throw DataError(path.string() + ": not RIFF");
  get_u32(in);
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "WAVE", 4) != 0) throw DataError(path.string() + ": not WAVE");

  bool have_fmt = false;
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint16_t bits = 0;
  std::uint32_t rate = 0;
  TadSignal out;
  while (in.read(tag, 4)) {
    const std::uint32_t size = get_u32(in);
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      format = get_u16(in);
      channels = get_u16(in);
      rate = get_u32(in);
      get_u32(in);
      get_u16(in);
      bits = get_u16(in);
      if (size > 16) in.seekg(size - 16 + (size & 1), std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      if (!have_fmt) throw DataError(path.string() + ": data chunk before fmt");
      if (format != 1 || bits != 16 || channels != 1) {
        throw DataError(path.string() + ": only 16-bit PCM mono WAV is supported");
      }
      const std::size_t n = size / 2;
      out.samples.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto raw = static_cast<std::int16_t>(get_u16(in));
        out.samples[i] = static_cast<double>(raw) / 32768.0;
      }
      if (!in) throw DataError(path.string() + ": truncated data chunk");
      out.sample_rate_hz = static_cast<double>(rate);
      if (!(out.sample_rate_hz > 0.0) || out.samples.empty()) {
        throw DataError(path.string() + ": bad WAV payload");
      }
      return out;
    } else {
      in.seekg(size + (size & 1), std::ios::cur);
    }
  }
  throw DataError(path.string() + ": no data chunk");
}

TadSignal read_tad_auto(const fs::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".wav" || ext == ".WAV") return read_wav16(path);
  if (ext == ".enft") return read_enft(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path.string());
  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  if (std::memcmp(magic, "RIFF", 4) == 0) return read_wav16(path);
  if (std::memcmp(magic, "ENFT", 4) == 0) return read_enft(path);
  throw DataError(path.string() + ": unrecognized TAD container");
}

namespace {

std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y += m <= 2;
}

}  // namespace

std::int64_t parse_utc(const std::string& text) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (std::sscanf(text.c_str(), "%d-%d-%dT%d:%d:%dZ", &y, &mo, &d, &h, &mi, &s) == 6) {
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59 ||
        s < 0 || s > 60) {
      throw ValidationError("parse_utc: invalid timestamp " + text);
    }
    return days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d)) * 86400 +
           h * 3600 + mi * 60 + s;
  }
  char* end = nullptr;
  const long long v = std::strtoll(text.c_str(), &end, 10);
  if (end == text.c_str() || *end != '\0') {
    throw ValidationError("parse_utc: expected ISO-8601 Z time or integer seconds, got " + text);
  }
  return v;
}

std::string format_utc(double utc_s) {
  const double floor_s = std::floor(utc_s);
  const auto whole = static_cast<std::int64_t>(floor_s);
  const double frac = utc_s - floor_s;
  std::int64_t days = whole / 86400;
  std::int64_t sod = whole % 86400;
  if (sod < 0) {
    sod += 86400;
    --days;
  }
  std::int64_t y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  char buf[64];
  if (frac > 1e-9) {
    std::snprintf(buf, sizeof(buf), "%04" PRId64 "-%02u-%02uT%02" PRId64 ":%02" PRId64
                                    ":%06.3fZ",
                  y, m, d, sod / 3600, (sod % 3600) / 60,
                  static_cast<double>(sod % 60) + frac);
  } else {
    std::snprintf(buf, sizeof(buf), "%04" PRId64 "-%02u-%02uT%02" PRId64 ":%02" PRId64
                                    ":%02" PRId64 "Z",
                  y, m, d, sod / 3600, (sod % 3600) / 60, sod % 60);
  }
  return buf;
}

SegmentKind segment_kind_from_string(const std::string& s) {
  if (s == "enf_csv") return SegmentKind::EnfCsv;
  if (s == "wav") return SegmentKind::Wav;
  if (s == "enft") return SegmentKind::Enft;
  throw ValidationError("unknown segment kind: " + s);
}

std::string to_string(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::EnfCsv: return "enf_csv";
    case SegmentKind::Wav: return "wav";
    case SegmentKind::Enft: return "enft";
  }
  return "?";
}

ReferenceStore::ReferenceStore(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_);
  load_index();
}

void ReferenceStore::load_index() {
  segments_.clear();
  const fs::path index = root_ / "index.json";
  if (!fs::exists(index)) return;
  std::ifstream in(index);
  if (!in) throw DataError("cannot open " + index.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("corrupt store index: " + std::string(e.what()));
  }
  for (const json& seg : j.at("segments")) {
    SegmentInfo info;
    info.grid_label = seg.at("grid").get<std::string>();
    info.start_utc = seg.at("start_utc").get<std::int64_t>();
    info.duration_s = seg.at("duration_s").get<double>();
    info.kind = segment_kind_from_string(seg.at("kind").get<std::string>());
    info.file = seg.at("file").get<std::string>();
    info.samples = seg.at("samples").get<std::uint64_t>();
    info.rate_or_delta = seg.at("rate_or_delta").get<double>();
    segments_.push_back(std::move(info));
  }
}

void ReferenceStore::save_index() const {
  json segs = json::array();
  for (const SegmentInfo& s : segments_) {
    segs.push_back({{"grid", s.grid_label},
                    {"start_utc", s.start_utc},
                    {"duration_s", s.duration_s},
                    {"kind", to_string(s.kind)},
                    {"file", s.file},
                    {"samples", s.samples},
                    {"rate_or_delta", s.rate_or_delta}});
  }
  const json j = {{"version", 1}, {"segments", segs}};
  const fs::path tmp = root_ / "index.json.tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw DataError("cannot write store index");
    out << j.dump(2) << "\n";
  }
  fs::rename(tmp, root_ / "index.json");
}

SegmentInfo ReferenceStore::ingest(const fs::path& file, SegmentKind kind,
                                   const std::string& grid_label, std::int64_t start_utc) {
  if (grid_label.empty()) throw ValidationError("ingest: empty grid label");

  SegmentInfo info;
  info.grid_label = grid_label;
  info.start_utc = start_utc;
  info.kind = kind;

  EnfSeries enf;
  TadSignal tad;
  std::string ext;
  if (kind == SegmentKind::EnfCsv) {
    enf = read_enf_csv(file);
    info.samples = enf.samples.size();
    info.rate_or_delta = enf.resolution_spp;
    info.duration_s = enf.duration_s();
    ext = ".csv";
  } else {
    tad = kind == SegmentKind::Wav ? read_wav16(file) : read_enft(file);
    info.samples = tad.samples.size();
    info.rate_or_delta = tad.sample_rate_hz;
    info.duration_s = tad.duration_s();
    ext = kind == SegmentKind::Wav ? ".wav" : ".enft";
  }

  const double new_end = static_cast<double>(start_utc) + info.duration_s;
  for (const SegmentInfo& seg : segments_) {
    if (seg.grid_label != grid_label) continue;
    const double seg_end = static_cast<double>(seg.start_utc) + seg.duration_s;
    if (static_cast<double>(start_utc) < seg_end &&
        static_cast<double>(seg.start_utc) < new_end) {
      throw DataError("ingest: overlaps existing segment [" + format_utc(seg.start_utc) +
                      ", " + format_utc(seg_end) + ") of grid " + grid_label);
    }
  }

  fs::create_directories(root_ / grid_label);
  const std::string rel = grid_label + "/" + std::to_string(start_utc) + ext;
  const fs::path target = root_ / rel;
  if (kind == SegmentKind::EnfCsv) {
    enf.start_offset_s = 0.0;
    write_enf_csv(enf, target);
  } else if (kind == SegmentKind::Wav) {
    write_wav16(tad, target);
  } else {
    write_enft(tad, target);
  }
  info.file = rel;

  segments_.push_back(info);
  std::sort(segments_.begin(), segments_.end(), [](const SegmentInfo& a, const SegmentInfo& b) {
    return a.grid_label == b.grid_label ? a.start_utc < b.start_utc
                                        : a.grid_label < b.grid_label;
  });
  save_index();
  return info;
}

std::variant<EnfSeries, TadSignal> ReferenceStore::fetch(const std::string& grid_label,
                                                         std::int64_t t0_utc,
                                                         std::int64_t t1_utc) const {
  if (t1_utc <= t0_utc) throw ValidationError("fetch: t1 must be after t0");

  std::vector<const SegmentInfo*> covering;
  for (const SegmentInfo& seg : segments_) {
    if (seg.grid_label != grid_label) continue;
    const double seg_end = static_cast<double>(seg.start_utc) + seg.duration_s;
    if (static_cast<double>(t0_utc) < seg_end && static_cast<double>(seg.start_utc) <
                                                     static_cast<double>(t1_utc)) {
      covering.push_back(&seg);
    }
  }
  if (covering.empty()) {
    throw DataError("fetch: no data for grid " + grid_label + " in [" + format_utc(t0_utc) +
                    ", " + format_utc(t1_utc) + ")");
  }

  double cursor = static_cast<double>(t0_utc);
  for (const SegmentInfo* seg : covering) {
    if (static_cast<double>(seg->start_utc) > cursor + 1e-9) {
      throw DataError("fetch: gap in coverage [" + format_utc(cursor) + ", " +
                      format_utc(seg->start_utc) + ") of grid " + grid_label);
    }
    cursor = static_cast<double>(seg->start_utc) + seg->duration_s;
    if (seg->kind != covering.front()->kind ||
        seg->rate_or_delta != covering.front()->rate_or_delta) {
      throw DataError("fetch: segments in range disagree on format or resolution");
    }
  }
  if (cursor + 1e-9 < static_cast<double>(t1_utc)) {
    throw DataError("fetch: gap in coverage [" + format_utc(cursor) + ", " +
                    format_utc(t1_utc) + ") of grid " + grid_label);
  }

  const bool is_enf = covering.front()->kind == SegmentKind::EnfCsv;
  // samples per second of the stored series
  const double rate = is_enf ? 1.0 / covering.front()->rate_or_delta
                             : covering.front()->rate_or_delta;

  EnfSeries enf_out;
  TadSignal tad_out;
  for (const SegmentInfo* seg : covering) {
    const double lo = std::max(static_cast<double>(t0_utc), static_cast<double>(seg->start_utc));
    const double hi = std::min(static_cast<double>(t1_utc),
                               static_cast<double>(seg->start_utc) + seg->duration_s);
    const double first_d = (lo - static_cast<double>(seg->start_utc)) * rate;
    const double count_d = (hi - lo) * rate;
    const auto first = static_cast<std::size_t>(std::llround(first_d));
    const auto count = static_cast<std::size_t>(std::llround(count_d));
    if (std::fabs(first_d - static_cast<double>(first)) > 1e-6 ||
        std::fabs(count_d - static_cast<double>(count)) > 1e-6) {
      throw DataError("fetch: requested range does not align with the sample grid");
    }
    if (count == 0) continue;
    if (is_enf) {
      EnfSeries part = read_enf_csv(root_ / seg->file);
      if (enf_out.samples.empty()) {
        enf_out = slice(part, first, count);
        enf_out.start_offset_s = 0.0;
      } else {
        const EnfSeries piece = slice(part, first, count);
        enf_out.samples.insert(enf_out.samples.end(), piece.samples.begin(),
                               piece.samples.end());
      }
    } else {
      TadSignal part = seg->kind == SegmentKind::Wav ? read_wav16(root_ / seg->file)
                                                     : read_enft(root_ / seg->file);
      if (first + count > part.samples.size()) {
        throw DataError("fetch: segment " + seg->file + " shorter than indexed");
      }
      tad_out.sample_rate_hz = part.sample_rate_hz;
      tad_out.samples.insert(tad_out.samples.end(),
                             part.samples.begin() + static_cast<std::ptrdiff_t>(first),
                             part.samples.begin() + static_cast<std::ptrdiff_t>(first + count));
    }
  }

  if (is_enf) return enf_out;
  return tad_out;
}

}  // namespace enf
