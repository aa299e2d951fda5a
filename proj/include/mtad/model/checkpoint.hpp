#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mtad/model/ensemble.hpp"
#include "mtad/nn/param.hpp"
#include "mtad/numeric/array.hpp"

namespace mtad::model {

// File layout:
//   MTADCKPT 1\n
//   per record: <name>\n <extent> <extent> ...\n <little-endian float32 data>
//   records <count>\n

inline constexpr int kCheckpointVersion = 1;

struct CheckpointRecord {
  std::string name;
  Array value;
};

void save_checkpoint(const std::filesystem::path& path, std::span<const CheckpointRecord> records);
/// Throws CheckpointError (Truncated, VersionMismatch or Malformed).
std::vector<CheckpointRecord> load_checkpoint(const std::filesystem::path& path);

std::vector<CheckpointRecord> collect_params(const nn::ParamStore<float>& store);
/// Copies values by name. Throws CheckpointError::ShapeMismatch on a shape
/// difference and MissingParam when the store has a parameter the records lack.
void assign_params(std::span<const CheckpointRecord> records, nn::ParamStore<float>& store);

void save_params(const std::filesystem::path& path, const nn::ParamStore<float>& store);
void load_params(const std::filesystem::path& path, nn::ParamStore<float>& store);

void save_ensemble(const std::filesystem::path& path, const EnsembleModel& ensemble);
void load_ensemble(const std::filesystem::path& path, EnsembleModel& ensemble);
/// Member labels present in an ensemble checkpoint, in file order.
std::vector<Symbol> ensemble_labels(std::span<const CheckpointRecord> records);

}  // namespace mtad::model
