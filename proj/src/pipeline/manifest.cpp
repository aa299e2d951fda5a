#include "mtad/pipeline/manifest.hpp"

#include <fstream>
#include <iterator>

#include "json.hpp"
#include "mtad/error.hpp"
#include "mtad/scoring/report.hpp"

namespace mtad::pipeline {

using nlohmann::ordered_json;

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[h & 0xf];
    h >>= 4;
  }
  return out;
}

std::uint64_t file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::uint64_t h = kFnvOffset;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    h = fnv1a(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
  }
  return h;
}

namespace {

ordered_json metrics_json(const model::EpochMetrics& m) {
  ordered_json j;
  j["epoch"] = m.epoch;
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
  };
  put("L_O", m.total);
  put("L_A", m.reconstruction);
  put("L_B", m.symbol);
  put("L_R", m.regularization);
  put("symbol_accuracy", m.symbol_accuracy);
  return j;
}

model::EpochMetrics metrics_from_json(const ordered_json& j) {
  model::EpochMetrics m;
  m.epoch = j.at("epoch").get<std::size_t>();
  auto get = [&](const char* key, std::optional<double>& v) {
    if (j.contains(key)) v = j.at(key).get<double>();
  };
  get("L_O", m.total);
  get("L_A", m.reconstruction);
  get("L_B", m.symbol);
  get("L_R", m.regularization);
  get("symbol_accuracy", m.symbol_accuracy);
  return m;
}

ordered_json files_json(const std::vector<FileEntry>& files) {
  ordered_json arr = ordered_json::array();
  for (const auto& f : files) arr.push_back({{"path", f.path}, {"hash", f.hash}});
  return arr;
}

std::vector<FileEntry> files_from_json(const ordered_json& arr) {
  std::vector<FileEntry> out;
  for (const auto& f : arr) out.push_back({f.at("path").get<std::string>(), f.at("hash").get<std::string>()});
  return out;
}

}  // namespace

void write_manifest(const std::filesystem::path& dir, Manifest manifest) {
  for (auto& f : manifest.outputs) f.hash = hash_hex(file_hash(dir / f.path));
  ordered_json j;
  j["run_id"] = manifest.run_id;
  j["command"] = manifest.command;
  j["status"] = manifest.status;
  j["config_hash"] = manifest.config_hash;
  j["store_hash"] = manifest.store_hash;
  j["store_dir"] = manifest.store_dir;
  j["inputs"] = files_json(manifest.inputs);
  j["outputs"] = files_json(manifest.outputs);
  j["checkpoints"] = manifest.checkpoints;
  ordered_json epochs = ordered_json::array();
  for (const auto& m : manifest.epochs) epochs.push_back(metrics_json(m));
  j["epochs"] = std::move(epochs);
  j["summary"] = manifest.summary;
  scoring::write_text_file(dir / "manifest.json", j.dump(2) + "\n");
}

Manifest read_manifest(const std::filesystem::path& dir) {
  const auto path = dir / "manifest.json";
  std::ifstream in(path);
  if (!in) throw DataError("missing manifest " + path.string());
  try {
    const auto j = ordered_json::parse(std::string(std::istreambuf_iterator<char>(in), {}));
    Manifest m;
    m.run_id = j.at("run_id").get<std::string>();
    m.command = j.at("command").get<std::string>();
    m.status = j.at("status").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.store_hash = j.at("store_hash").get<std::string>();
    m.store_dir = j.at("store_dir").get<std::string>();
    m.inputs = files_from_json(j.at("inputs"));
    m.outputs = files_from_json(j.at("outputs"));
    m.checkpoints = j.at("checkpoints").get<std::vector<std::string>>();
    for (const auto& e : j.at("epochs")) m.epochs.push_back(metrics_from_json(e));
    m.summary = j.at("summary").get<std::map<std::string, std::string>>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed manifest " + path.string() + ": " + e.what());
  }
}

}  // namespace mtad::pipeline
