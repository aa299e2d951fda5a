#include "mtad/data/store.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "mtad/error.hpp"

namespace mtad::data {

namespace {

static_assert(std::endian::native == std::endian::little, "window store assumes a little-endian host");

template <typename T>
void put(std::string& buf, T v) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  buf.append(bytes, sizeof(T));
}

template <typename T>
T take(const char*& p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  p += sizeof(T);
  return v;
}

std::string number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double parse(const std::string& s, const std::filesystem::path& path) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw DataError(path.string() + ": bad number '" + s + "'");
  return v;
}

std::vector<std::vector<std::string>> read_csv_rows(const std::filesystem::path& path, const std::string& header) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != header) throw DataError(path.string() + ": expected header '" + header + "'");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

void write_windows(const std::filesystem::path& path, std::span<const Window> windows) {
  std::size_t steps = 0, channels = kChannelCount, targets = 0;
  if (!windows.empty()) {
    steps = windows.front().input.rows();
    channels = windows.front().input.cols();
    targets = windows.front().targets.size();
  }
  std::string buf = "MTADWIN 1 " + std::to_string(windows.size()) + " " + std::to_string(steps) + " " +
                    std::to_string(channels) + " " + std::to_string(targets) + "\n";
  for (const auto& w : windows) {
    if (w.input.rows() != steps || w.input.cols() != channels || w.targets.size() != targets) {
      throw ShapeError("write_windows: windows differ in shape");
    }
    put<std::uint64_t>(buf, w.id);
    put<std::uint32_t>(buf, w.trace_index);
    put<std::uint64_t>(buf, w.start);
    put<std::uint8_t>(buf, static_cast<std::uint8_t>(index(w.majority_label)));
    put<double>(buf, w.max_speed);
    put<double>(buf, w.anomaly_fraction);
    for (auto s : w.targets) put<std::uint8_t>(buf, static_cast<std::uint8_t>(index(s)));
    for (float v : w.input.values()) put<float>(buf, v);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw DataError("failed writing " + path.string());
}

std::vector<Window> read_windows(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open window file " + path.string());
  std::string header;
  if (!std::getline(in, header)) throw DataError(path.string() + ": empty window file");
  std::istringstream hs(header);
  std::string magic;
  int version = 0;
  std::size_t count = 0, steps = 0, channels = 0, targets = 0;
  if (!(hs >> magic >> version >> count >> steps >> channels >> targets) || magic != "MTADWIN" || version != 1) {
    throw DataError(path.string() + ": not a version 1 window file");
  }
  const std::size_t record = 8 + 4 + 8 + 1 + 8 + 8 + targets + 4 * steps * channels;
  std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (body.size() != record * count) {
    throw DataError(path.string() + ": expected " + std::to_string(record * count) + " payload bytes, found " +
                    std::to_string(body.size()));
  }
  std::vector<Window> out;
  out.reserve(count);
  const char* p = body.data();
  auto symbol = [&](std::uint8_t v) {
    auto s = symbol_from_index(v);
    if (!s) throw DataError(path.string() + ": symbol index out of range");
    return *s;
  };
  for (std::size_t i = 0; i < count; ++i) {
    Window w;
    w.id = take<std::uint64_t>(p);
    w.trace_index = take<std::uint32_t>(p);
    w.start = take<std::uint64_t>(p);
    w.majority_label = symbol(take<std::uint8_t>(p));
    w.max_speed = take<double>(p);
    w.anomaly_fraction = take<double>(p);
    for (std::size_t t = 0; t < targets; ++t) w.targets.push_back(symbol(take<std::uint8_t>(p)));
    std::vector<float> data(steps * channels);
    for (auto& v : data) v = take<float>(p);
    w.input = Array({steps, channels}, std::move(data));
    out.push_back(std::move(w));
  }
  return out;
}

void write_scaler(const std::filesystem::path& path, const ScalerParams& params) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << "channel,min,max\n";
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    out << kChannelNames[c] << ',' << number(params.min[c]) << ',' << number(params.max[c]) << '\n';
  }
}

ScalerParams read_scaler(const std::filesystem::path& path) {
  const auto rows = read_csv_rows(path, "channel,min,max");
  if (rows.size() != kChannelCount) throw DataError(path.string() + ": expected one row per channel");
  ScalerParams p;
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    if (rows[c].size() != 3 || rows[c][0] != kChannelNames[c]) throw DataError(path.string() + ": bad row");
    p.min[c] = parse(rows[c][1], path);
    p.max[c] = parse(rows[c][2], path);
    if (p.max[c] < p.min[c]) throw DataError(path.string() + ": max below min");
  }
  return p;
}

void write_label_stats(const std::filesystem::path& path, const LabelStats& stats) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << "label,count,frequency\n";
  for (std::size_t i = 0; i < kManeuverCount; ++i) {
    out << symbol_name(*symbol_from_index(i)) << ',' << stats.counts[i] << ',' << number(stats.frequency[i]) << '\n';
  }
}

LabelStats read_label_stats(const std::filesystem::path& path) {
  const auto rows = read_csv_rows(path, "label,count,frequency");
  if (rows.size() != kManeuverCount) throw DataError(path.string() + ": expected one row per maneuver");
  LabelStats s;
  for (std::size_t i = 0; i < kManeuverCount; ++i) {
    if (rows[i].size() != 3 || rows[i][0] != symbol_name(*symbol_from_index(i))) {
      throw DataError(path.string() + ": bad row");
    }
    s.counts[i] = static_cast<std::uint64_t>(parse(rows[i][1], path));
    s.frequency[i] = parse(rows[i][2], path);
    s.total += s.counts[i];
  }
  return s;
}

}  // namespace mtad::data
