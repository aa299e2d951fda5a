#include "mtad/scoring/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

#include "mtad/error.hpp"

namespace mtad::scoring {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_score_report(std::ostream& out, Modality modality, std::span<const ScoredWindow> windows, bool header) {
  if (header) out << "window_id,modality,raw_score,nll,scaled_score,majority_label,anomaly_fraction\n";
  const std::string_view name = modality_name(modality);
  for (const auto& w : windows) {
    out << w.window_id << ',' << name << ',' << format_number(w.raw_score) << ',' << format_number(w.nll) << ','
        << format_number(w.scaled_score) << ',' << symbol_name(w.majority_label) << ','
        << format_number(w.anomaly_fraction) << '\n';
  }
}

void write_detection_table(std::ostream& out, std::span<const DetectionColumn> columns) {
  out << "top_fraction";
  for (const auto& c : columns) out << ',' << c.name;
  out << '\n';
  if (columns.empty()) return;
  const std::size_t n = columns.front().rows.size();
  for (const auto& c : columns) {
    if (c.rows.size() != n) throw ShapeError("write_detection_table: columns have different row counts");
  }
  for (std::size_t r = 0; r < n; ++r) {
    out << format_number(columns.front().rows[r].top_fraction);
    for (const auto& c : columns) {
      if (c.rows[r].top_fraction != columns.front().rows[r].top_fraction) {
        throw ShapeError("write_detection_table: columns have different rows");
      }
      out << ',' << c.rows[r].formatted();
    }
    out << '\n';
  }
}

void write_loss_table(std::ostream& out, std::span<const LossColumn> columns) {
  out << "feature";
  for (const auto& c : columns) out << ',' << c.name;
  out << '\n';
  if (columns.empty()) return;
  const auto& first = columns.front().losses;
  for (std::size_t r = 0; r < first.size(); ++r) {
    out << modality_name(first[r].first);
    for (const auto& c : columns) {
      if (c.losses.size() != first.size() || c.losses[r].first != first[r].first) {
        throw ShapeError("write_loss_table: columns list different modalities");
      }
      out << ',' << format_number(c.losses[r].second);
    }
    out << '\n';
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("failed writing " + path.string());
}

}  // namespace mtad::scoring
