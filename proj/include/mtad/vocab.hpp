#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace mtad {

/// Maneuver labels in the order of the source dataset's label table, followed
/// by the two framing tokens used by the symbol decoder.
enum class Symbol : std::uint8_t {
  Background = 0,
  IntersectionPassing,
  LeftTurn,
  RightTurn,
  LeftLaneChange,
  RightLaneChange,
  CrosswalkPassing,
  UTurn,
  LeftLaneBranch,
  RightLaneBranch,
  Merge,
  Sos,
  Eos,
};

inline constexpr std::size_t kManeuverCount = 11;
inline constexpr std::size_t kVocabSize = 13;

constexpr std::size_t index(Symbol s) noexcept { return static_cast<std::size_t>(s); }
constexpr bool is_maneuver(Symbol s) noexcept { return index(s) < kManeuverCount; }

/// Lowercase snake_case name, e.g. "u_turn".
std::string_view symbol_name(Symbol s) noexcept;
/// Accepts maneuver names and the framing tokens "<sos>"/"<eos>".
std::optional<Symbol> symbol_from_name(std::string_view name) noexcept;
std::optional<Symbol> symbol_from_index(std::size_t i) noexcept;

/// Label frequencies of the 150-hour reference dataset, in percent.
inline constexpr std::array<double, kManeuverCount> kReferenceLabelPercent = {
    87.15, 6.00, 2.58, 2.31, 0.54, 0.50, 0.27, 0.23, 0.20, 0.08, 0.14};

}  // namespace mtad
