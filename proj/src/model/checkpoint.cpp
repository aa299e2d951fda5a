#include "mtad/model/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mtad/error.hpp"

namespace mtad::model {

namespace {

using Kind = CheckpointError::Kind;

constexpr const char* kMagic = "MTADCKPT";

std::uint32_t to_little(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    v = ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  }
  return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, std::span<const CheckpointRecord> records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  out << kMagic << ' ' << kCheckpointVersion << '\n';
  for (const auto& r : records) {
    if (r.name.empty() || r.name.find_first_of(" \t\n\r") != std::string::npos) {
      throw Error("checkpoint record name '" + r.name + "' must be non-empty without whitespace");
    }
    out << r.name << '\n';
    for (std::size_t i = 0; i < r.value.rank(); ++i) out << (i ? " " : "") << r.value.shape()[i];
    out << '\n';
    for (float f : r.value.values()) {
      const std::uint32_t bits = to_little(std::bit_cast<std::uint32_t>(f));
      out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
  }
  out << "records " << records.size() << '\n';
  if (!out) throw Error("failed writing checkpoint " + path.string());
}

std::vector<CheckpointRecord> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(Kind::Truncated, "cannot open checkpoint " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw CheckpointError(Kind::Truncated, "checkpoint is empty");
  {
    std::istringstream hs(line);
    std::string magic;
    int version = 0;
    if (!(hs >> magic) || magic != kMagic) throw CheckpointError(Kind::Malformed, "not a checkpoint file");
    if (!(hs >> version)) throw CheckpointError(Kind::Malformed, "checkpoint header lacks a version");
    if (version != kCheckpointVersion) {
      throw CheckpointError(Kind::VersionMismatch, "checkpoint version " + std::to_string(version) +
                                                       " is not supported (expected " +
                                                       std::to_string(kCheckpointVersion) + ")");
    }
  }
  std::vector<CheckpointRecord> records;
  while (true) {
    if (!std::getline(in, line)) throw CheckpointError(Kind::Truncated, "checkpoint ends before its trailer");
    if (line.rfind("records ", 0) == 0) {
      std::istringstream ts(line.substr(8));
      std::size_t count = 0;
      if (!(ts >> count) || count != records.size()) {
        throw CheckpointError(Kind::Malformed, "checkpoint trailer does not match its record count");
      }
      return records;
    }
    CheckpointRecord rec;
    rec.name = line;
    if (!std::getline(in, line)) throw CheckpointError(Kind::Truncated, "record '" + rec.name + "' lacks a shape");
    Shape shape;
    std::istringstream ss(line);
    long long extent = 0;
    while (ss >> extent) {
      if (extent <= 0) throw CheckpointError(Kind::Malformed, "record '" + rec.name + "' has a bad shape");
      shape.push_back(static_cast<std::size_t>(extent));
    }
    if (!ss.eof() || shape.empty()) {
      throw CheckpointError(Kind::Malformed, "record '" + rec.name + "' has a bad shape line");
    }
    std::vector<float> data(shape_size(shape));
    for (auto& f : data) {
      std::uint32_t bits = 0;
      if (!in.read(reinterpret_cast<char*>(&bits), sizeof bits)) {
        throw CheckpointError(Kind::Truncated, "record '" + rec.name + "' is truncated");
      }
      f = std::bit_cast<float>(to_little(bits));
    }
    rec.value = Array(std::move(shape), std::move(data));
    records.push_back(std::move(rec));
  }
}

std::vector<CheckpointRecord> collect_params(const nn::ParamStore<float>& store) {
  std::vector<CheckpointRecord> out;
  for (const auto& p : store) out.push_back({p.name, p.value});
  return out;
}

void assign_params(std::span<const CheckpointRecord> records, nn::ParamStore<float>& store) {
  for (auto& p : store) {
    auto it = std::find_if(records.begin(), records.end(), [&](const auto& r) { return r.name == p.name; });
    if (it == records.end()) throw CheckpointError(Kind::MissingParam, "checkpoint lacks parameter " + p.name);
    if (it->value.shape() != p.value.shape()) {
      throw CheckpointError(Kind::ShapeMismatch, "parameter " + p.name + " has shape " +
                                                     shape_to_string(it->value.shape()) + ", model expects " +
                                                     shape_to_string(p.value.shape()));
    }
  }
  for (auto& p : store) {
    auto it = std::find_if(records.begin(), records.end(), [&](const auto& r) { return r.name == p.name; });
    p.value = it->value;
  }
}

void save_params(const std::filesystem::path& path, const nn::ParamStore<float>& store) {
  save_checkpoint(path, collect_params(store));
}

void load_params(const std::filesystem::path& path, nn::ParamStore<float>& store) {
  assign_params(load_checkpoint(path), store);
}

void save_ensemble(const std::filesystem::path& path, const EnsembleModel& ensemble) {
  std::vector<CheckpointRecord> all;
  for (const auto& m : ensemble.members()) {
    auto part = collect_params(m.model.params());
    all.insert(all.end(), part.begin(), part.end());
  }
  save_checkpoint(path, all);
}

void load_ensemble(const std::filesystem::path& path, EnsembleModel& ensemble) {
  const auto records = load_checkpoint(path);
  for (auto& m : ensemble.members()) assign_params(records, m.model.params());
}

std::vector<Symbol> ensemble_labels(std::span<const CheckpointRecord> records) {
  std::vector<Symbol> labels;
  for (const auto& r : records) {
    if (r.name.rfind("member.", 0) != 0) continue;
    const auto dot = r.name.find('.', 7);
    const auto label = symbol_from_name(r.name.substr(7, dot - 7));
    if (!label) throw CheckpointError(Kind::Malformed, "unknown ensemble member in " + r.name);
    if (std::find(labels.begin(), labels.end(), *label) == labels.end()) labels.push_back(*label);
  }
  return labels;
}

}  // namespace mtad::model
