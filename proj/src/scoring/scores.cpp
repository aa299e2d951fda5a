#include "mtad/scoring/scores.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_set>

#include "mtad/error.hpp"

namespace mtad::scoring {

double sequence_nll(std::span<const Symbol> symbols, const data::LabelStats& stats) {
  if (symbols.empty()) throw DataError("sequence_nll: empty symbol sequence");
  double nll = 0.0;
  for (auto s : symbols) {
    if (!is_maneuver(s)) continue;
    const double f = stats.frequency[index(s)];
    if (!(f > 0.0)) throw DataError("sequence_nll: maneuver '" + std::string(symbol_name(s)) + "' has zero frequency");
    nll -= std::log(f);
  }
  return nll;
}

double scaled_score(double raw, double nll, double floor) { return raw / std::max(nll, floor); }

std::size_t selection_size(std::size_t n, double percentile) {
  const double k = std::ceil(static_cast<double>(n) * percentile / 100.0 - 1e-9);
  return std::min(n, static_cast<std::size_t>(std::max(k, 0.0)));
}

namespace {

bool ranks_before(const RankedItem& a, const RankedItem& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.id < b.id;
}

}  // namespace

std::vector<RankedItem> rank_and_select(std::vector<RankedItem> items, double percentile) {
  if (items.empty()) throw DataError("rank_and_select: no scores");
  if (!(percentile > 0.0 && percentile <= 100.0)) throw ConfigError("rank_and_select: percentile must be in (0, 100]");
  for (const auto& it : items) {
    if (std::isnan(it.score)) throw DataError("rank_and_select: NaN score for window " + std::to_string(it.id));
  }
  const std::size_t k = selection_size(items.size(), percentile);
  std::partial_sort(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(k), items.end(), ranks_before);
  items.resize(k);
  return items;
}

double DetectionRow::recall() const noexcept {
  return targets == 0 ? 0.0 : static_cast<double>(captured) / static_cast<double>(targets);
}

std::string DetectionRow::formatted() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f%% (%zu/%zu)", 100.0 * recall(), captured, targets);
  return buf;
}

std::vector<DetectionRow> detection_report(std::span<const RankedItem> items, std::span<const std::uint8_t> is_target,
                                           std::span<const double> top_fractions) {
  if (items.size() != is_target.size()) throw ShapeError("detection_report: scores and targets differ in length");
  std::size_t targets = 0;
  std::unordered_set<std::uint64_t> target_ids;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (is_target[i]) {
      ++targets;
      target_ids.insert(items[i].id);
    }
  }
  std::vector<DetectionRow> rows;
  for (double frac : top_fractions) {
    DetectionRow row;
    row.top_fraction = frac;
    row.targets = targets;
    if (!items.empty()) {
      const auto selected = rank_and_select({items.begin(), items.end()}, 100.0 * frac);
      row.selected = selected.size();
      for (const auto& s : selected) row.captured += target_ids.count(s.id);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace mtad::scoring
