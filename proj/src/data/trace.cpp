#include "mtad/data/trace.hpp"

#include "mtad/error.hpp"

namespace mtad::data {

Trace Trace::zeros(std::size_t n, double rate_hz, std::string id) {
  Trace t;
  t.id = std::move(id);
  t.sample_rate_hz = rate_hz;
  for (auto& c : t.channels) c.assign(n, 0.0);
  t.labels.assign(n, Symbol::Background);
  t.anomaly_mask.assign(n, 0);
  return t;
}

void Trace::validate() const {
  if (!(sample_rate_hz > 0.0)) throw DataError("trace '" + id + "': sample rate must be positive");
  const std::size_t n = labels.size();
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    if (channels[c].size() != n) {
      throw DataError("trace '" + id + "': channel " + std::string(kChannelNames[c]) + " has " +
                      std::to_string(channels[c].size()) + " samples, labels have " + std::to_string(n));
    }
  }
  if (anomaly_mask.size() != n) throw DataError("trace '" + id + "': anomaly mask length differs");
  for (auto s : labels) {
    if (!is_maneuver(s)) throw DataError("trace '" + id + "': labels must be maneuvers");
  }
}

Symbol majority_label(const std::vector<Symbol>& labels, std::size_t begin, std::size_t end) {
  if (begin >= end || end > labels.size()) throw DataError("majority_label: empty or out-of-range span");
  std::array<std::size_t, kManeuverCount> counts{};
  std::array<std::size_t, kManeuverCount> first{};
  first.fill(end);
  for (std::size_t i = begin; i < end; ++i) {
    const auto k = index(labels[i]);
    if (k >= kManeuverCount) throw DataError("majority_label: non-maneuver label");
    if (counts[k]++ == 0) first[k] = i;
  }
  std::size_t best = index(labels[begin]);
  for (std::size_t k = 0; k < kManeuverCount; ++k) {
    if (counts[k] > counts[best] || (counts[k] == counts[best] && counts[k] > 0 && first[k] < first[best])) {
      best = k;
    }
  }
  return *symbol_from_index(best);
}

}  // namespace mtad::data
