#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "mtad/data/trace.hpp"

namespace mtad::data {

// Header: t,steer_angle,steer_speed,speed,yaw,pedal_angle,pedal_pressure,label[,anomaly]
// Columns may appear in any order; extra columns are rejected.

/// The sample rate is inferred from the time column unless given. Errors
/// (DataError) name the offending row: missing column, bad number, unknown
/// label, non-increasing time.
Trace ingest_csv(const std::filesystem::path& path, std::optional<double> rate_hz = std::nullopt);
Trace read_trace_csv(std::istream& in, const std::string& source, std::optional<double> rate_hz = std::nullopt);

/// Writes shortest round-trip decimal values, so ingest(export(t)) == t.
void export_csv(const Trace& trace, const std::filesystem::path& path);
void write_trace_csv(const Trace& trace, std::ostream& out);

}  // namespace mtad::data
