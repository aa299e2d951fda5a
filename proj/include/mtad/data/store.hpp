#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "mtad/data/pipeline.hpp"
#include "mtad/data/trace.hpp"

namespace mtad::data {

// Window files start with "MTADWIN 1 <count> <steps> <channels> <targets>\n"
// followed by fixed-size little-endian records.

void write_windows(const std::filesystem::path& path, std::span<const Window> windows);
/// Throws DataError on a malformed or truncated file.
std::vector<Window> read_windows(const std::filesystem::path& path);

/// channel,min,max
void write_scaler(const std::filesystem::path& path, const ScalerParams& params);
ScalerParams read_scaler(const std::filesystem::path& path);

/// label,count,frequency
void write_label_stats(const std::filesystem::path& path, const LabelStats& stats);
LabelStats read_label_stats(const std::filesystem::path& path);

}  // namespace mtad::data
