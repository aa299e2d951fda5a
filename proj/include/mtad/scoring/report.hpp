#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mtad/scoring/gaussian.hpp"
#include "mtad/scoring/scores.hpp"

namespace mtad::scoring {

/// Shortest decimal that reads back to the same double; "nan"/"inf" otherwise.
std::string format_number(double v);

/// Header: window_id,modality,raw_score,nll,scaled_score,majority_label,anomaly_fraction
void write_score_report(std::ostream& out, Modality modality, std::span<const ScoredWindow> windows,
                        bool header = true);

/// One named column of detection rows; all columns must share the same rows.
struct DetectionColumn {
  std::string name;
  std::vector<DetectionRow> rows;
};

/// Header "top_fraction,<names...>"; cells like "7.97% (61/765)".
void write_detection_table(std::ostream& out, std::span<const DetectionColumn> columns);

/// Per-modality reconstruction losses for one variant.
struct LossColumn {
  std::string name;
  std::vector<std::pair<Modality, double>> losses;
};

/// Header "feature,<names...>"; one row per modality in column order.
void write_loss_table(std::ostream& out, std::span<const LossColumn> columns);

/// Creates missing parent directories; throws DataError on I/O failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace mtad::scoring
