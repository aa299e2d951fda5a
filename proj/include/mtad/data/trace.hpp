#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mtad/numeric/array.hpp"
#include "mtad/vocab.hpp"

namespace mtad::data {

inline constexpr std::size_t kChannelCount = 6;

enum class Channel : std::size_t { SteerAngle, SteerSpeed, Speed, Yaw, PedalAngle, PedalPressure };

/// Column names, in channel order.
inline constexpr std::array<std::string_view, kChannelCount> kChannelNames = {
    "steer_angle", "steer_speed", "speed", "yaw", "pedal_angle", "pedal_pressure"};

inline constexpr double kMetersPerSecondPerMph = 0.44704;
/// 15 mph in m/s.
inline constexpr double kDefaultMinSpeed = 15.0 * kMetersPerSecondPerMph;

/// One continuous recording. Units: steer angle deg, steer speed deg/s,
/// speed m/s, yaw rate deg/s, pedal angle deg, pedal pressure in [0, 1].
struct Trace {
  std::string id;
  double sample_rate_hz = 0.0;
  std::array<std::vector<double>, kChannelCount> channels;
  std::vector<Symbol> labels;
  std::vector<std::uint8_t> anomaly_mask;  // 1 where an anomaly was injected

  std::size_t size() const noexcept { return labels.size(); }
  std::vector<double>& channel(Channel c) { return channels[static_cast<std::size_t>(c)]; }
  const std::vector<double>& channel(Channel c) const { return channels[static_cast<std::size_t>(c)]; }

  /// Empty trace of n samples with all channels zero and labels background.
  static Trace zeros(std::size_t n, double rate_hz, std::string id = {});
  /// Throws DataError when lengths disagree or the rate is not positive.
  void validate() const;
};

/// A segmented training/inference unit.
struct Window {
  std::uint64_t id = 0;
  Array input;                  // [steps x channels]
  std::vector<Symbol> targets;  // horizon labels followed by EOS
  Symbol majority_label = Symbol::Background;
  double max_speed = 0.0;       // m/s over the input span, before scaling
  std::uint32_t trace_index = 0;
  std::uint64_t start = 0;      // first sample of the input span
  double anomaly_fraction = 0.0;
};

/// Most frequent maneuver in [begin, end); ties go to the label that occurs first.
Symbol majority_label(const std::vector<Symbol>& labels, std::size_t begin, std::size_t end);

}  // namespace mtad::data
