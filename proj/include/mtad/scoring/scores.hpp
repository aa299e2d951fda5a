#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mtad/data/pipeline.hpp"
#include "mtad/vocab.hpp"

namespace mtad::scoring {

/// -sum log f_s over the maneuvers in `symbols`, with f_s the training
/// frequency. SOS and EOS are skipped. Throws DataError on an empty list.
double sequence_nll(std::span<const Symbol> symbols, const data::LabelStats& stats);

inline constexpr double kDefaultNllFloor = 1e-3;

/// raw / max(nll, floor).
double scaled_score(double raw, double nll, double floor = kDefaultNllFloor);

struct ScoredWindow {
  std::uint64_t window_id = 0;
  double raw_score = 0.0;
  double nll = 0.0;
  double scaled_score = 0.0;
  std::vector<Symbol> predicted;
  Symbol majority_label = Symbol::Background;
  double anomaly_fraction = 0.0;
};

struct RankedItem {
  std::uint64_t id = 0;
  double score = 0.0;
};

/// ceil(n * percentile / 100), guarded against rounding just above an integer.
std::size_t selection_size(std::size_t n, double percentile);

/// Top `percentile` percent of items by descending score, ties by ascending
/// id. Throws DataError on empty input or a NaN score and ConfigError unless
/// 0 < percentile <= 100.
std::vector<RankedItem> rank_and_select(std::vector<RankedItem> items, double percentile);

/// Top fractions of the sorted scores reported in detection tables
/// (0.1 means the top 10%).
inline constexpr std::array<double, 5> kDetectionRows = {0.001, 0.01, 0.1, 0.5, 1.0};

struct DetectionRow {
  double top_fraction = 0.0;
  std::size_t selected = 0;  // windows in the top fraction
  std::size_t captured = 0;  // target windows among them
  std::size_t targets = 0;   // target windows overall

  double recall() const noexcept;
  /// e.g. "7.97% (61/765)"
  std::string formatted() const;
};

/// Recall of target windows within each top fraction of the score ranking.
/// `is_target` is aligned with `items`.
std::vector<DetectionRow> detection_report(std::span<const RankedItem> items, std::span<const std::uint8_t> is_target,
                                           std::span<const double> top_fractions = kDetectionRows);

}  // namespace mtad::scoring
