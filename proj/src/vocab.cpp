#include "mtad/vocab.hpp"

namespace mtad {

namespace {

constexpr std::array<std::string_view, kVocabSize> kNames = {
    "background",       "intersection_passing", "left_turn",          "right_turn",
    "left_lane_change", "right_lane_change",    "crosswalk_passing",  "u_turn",
    "left_lane_branch", "right_lane_branch",    "merge",              "<sos>",
    "<eos>"};

}  // namespace

std::string_view symbol_name(Symbol s) noexcept {
  const auto i = index(s);
  return i < kVocabSize ? kNames[i] : std::string_view("<invalid>");
}

std::optional<Symbol> symbol_from_name(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kVocabSize; ++i) {
    if (kNames[i] == name) return static_cast<Symbol>(i);
  }
  return std::nullopt;
}

std::optional<Symbol> symbol_from_index(std::size_t i) noexcept {
  if (i >= kVocabSize) return std::nullopt;
  return static_cast<Symbol>(i);
}

}  // namespace mtad
