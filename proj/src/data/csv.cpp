#include "mtad/data/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "mtad/error.hpp"

namespace mtad::data {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    auto field = line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
      field.remove_suffix(1);
    }
    out.push_back(field);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string row_prefix(const std::string& source, std::size_t row) {
  return source + ": row " + std::to_string(row) + ": ";
}

double parse_number(std::string_view text, const std::string& source, std::size_t row, std::string_view column) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw DataError(row_prefix(source, row) + "column " + std::string(column) + ": cannot parse '" +
                    std::string(text) + "' as a number");
  }
  return v;
}

void append_number(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

}  // namespace

Trace read_trace_csv(std::istream& in, const std::string& source, std::optional<double> rate_hz) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": empty file");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_fields(line);

  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::size_t time_col = kNone, label_col = kNone, anomaly_col = kNone;
  std::array<std::size_t, kChannelCount> channel_col;
  channel_col.fill(kNone);
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto name = header[i];
    std::size_t* slot = nullptr;
    if (name == "t") slot = &time_col;
    if (name == "label") slot = &label_col;
    if (name == "anomaly") slot = &anomaly_col;
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      if (name == kChannelNames[c]) slot = &channel_col[c];
    }
    if (!slot) throw DataError(source + ": unexpected column '" + std::string(name) + "'");
    if (*slot != kNone) throw DataError(source + ": duplicate column '" + std::string(name) + "'");
    *slot = i;
  }
  if (time_col == kNone) throw DataError(source + ": missing column 't'");
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    if (channel_col[c] == kNone) throw DataError(source + ": missing column '" + std::string(kChannelNames[c]) + "'");
  }
  if (label_col == kNone) throw DataError(source + ": missing column 'label'");

  Trace trace;
  trace.id = std::filesystem::path(source).stem().string();
  std::vector<double> times;
  std::size_t row = 0;  // data rows, header excluded
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw DataError(row_prefix(source, row) + "expected " + std::to_string(header.size()) + " fields, found " +
                      std::to_string(fields.size()));
    }
    const double t = parse_number(fields[time_col], source, row, "t");
    if (!times.empty() && !(t > times.back())) {
      throw DataError(row_prefix(source, row) + "time " + std::string(fields[time_col]) +
                      " does not increase over the previous row");
    }
    times.push_back(t);
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      trace.channels[c].push_back(parse_number(fields[channel_col[c]], source, row, kChannelNames[c]));
    }
    const auto label = symbol_from_name(fields[label_col]);
    if (!label || !is_maneuver(*label)) {
      throw DataError(row_prefix(source, row) + "unknown label '" + std::string(fields[label_col]) + "'");
    }
    trace.labels.push_back(*label);
    std::uint8_t anomaly = 0;
    if (anomaly_col != kNone) {
      const auto a = fields[anomaly_col];
      if (a == "1" || a == "true") {
        anomaly = 1;
      } else if (!(a == "0" || a == "false" || a.empty())) {
        throw DataError(row_prefix(source, row) + "anomaly flag '" + std::string(a) + "' must be 0 or 1");
      }
    }
    trace.anomaly_mask.push_back(anomaly);
  }

  if (rate_hz) {
    trace.sample_rate_hz = *rate_hz;
  } else {
    if (times.size() < 2) throw DataError(source + ": need two rows to infer the sample rate");
    const double rate = static_cast<double>(times.size() - 1) / (times.back() - times.front());
    // Exported times are i / rate, so the recovered rate is exact up to rounding.
    trace.sample_rate_hz = std::round(rate * 1e6) / 1e6;
  }
  trace.validate();
  return trace;
}

Trace ingest_csv(const std::filesystem::path& path, std::optional<double> rate_hz) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open trace file " + path.string());
  auto trace = read_trace_csv(in, path.string(), rate_hz);
  trace.id = path.stem().string();
  return trace;
}

void write_trace_csv(const Trace& trace, std::ostream& out) {
  trace.validate();
  std::string buf = "t";
  for (auto name : kChannelNames) buf += "," + std::string(name);
  buf += ",label,anomaly\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    append_number(buf, static_cast<double>(i) / trace.sample_rate_hz);
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      buf += ',';
      append_number(buf, trace.channels[c][i]);
    }
    buf += ',';
    buf += symbol_name(trace.labels[i]);
    buf += trace.anomaly_mask[i] ? ",1\n" : ",0\n";
    if (buf.size() > (1u << 16)) {
      out << buf;
      buf.clear();
    }
  }
  out << buf;
}

void export_csv(const Trace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write trace file " + path.string());
  write_trace_csv(trace, out);
  if (!out) throw DataError("failed writing trace file " + path.string());
}

}  // namespace mtad::data
