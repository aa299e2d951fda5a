#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mtad/model/trainer.hpp"

namespace mtad::pipeline {

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

/// 64-bit FNV-1a; pass a previous result as `h` to continue a stream.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = kFnvOffset);
/// 16 lowercase hex digits.
std::string hash_hex(std::uint64_t h);
/// Throws DataError when the file cannot be read.
std::uint64_t file_hash(const std::filesystem::path& path);

struct FileEntry {
  std::string path;  // relative to the run directory for outputs
  std::string hash;

  bool operator==(const FileEntry&) const = default;
};

/// Written as manifest.json next to every command's outputs.
struct Manifest {
  std::string command;
  std::string run_id;
  std::string config_hash;
  std::string status = "ok";
  /// Combined hash of the prepared window store this run depends on.
  std::string store_hash;
  std::string store_dir;
  std::vector<FileEntry> inputs;
  std::vector<FileEntry> outputs;
  std::vector<std::string> checkpoints;
  std::vector<model::EpochMetrics> epochs;
  std::map<std::string, std::string> summary;
};

/// Hashes each listed output inside `dir` before writing.
void write_manifest(const std::filesystem::path& dir, Manifest manifest);
/// Throws DataError when manifest.json is missing or malformed.
Manifest read_manifest(const std::filesystem::path& dir);

}  // namespace mtad::pipeline
