#pragma once

#include <array>
#include <string>
#include <utility>

#include "mtad/data/trace.hpp"
#include "mtad/kv_config.hpp"
#include "mtad/numeric/rng.hpp"

namespace mtad::data {

enum class AnomalyKind { BrakeSlam, SteerOscillation, PedalSpike };

/// Synthetic driving generator settings.
///
/// Keys (all optional): sample_rate_hz, duration_s, noise, anomaly_rate
/// (events per minute), anomaly_duration (lo:hi s), cruise_speed (lo:hi m/s),
/// prob.<label> and duration.<label> (lo:hi s) for each maneuver label.
struct GeneratorConfig {
  double sample_rate_hz = 100.0;
  double duration_s = 600.0;
  /// Target share of time spent in each maneuver; normalized on use.
  std::array<double, kManeuverCount> probability = {0.55, 0.12, 0.07, 0.07, 0.04, 0.04,
                                                    0.03, 0.03, 0.02, 0.02, 0.01};
  std::array<std::pair<double, double>, kManeuverCount> duration_s_range = {{{6.0, 16.0},
                                                                              {4.0, 7.0},
                                                                              {5.0, 8.0},
                                                                              {5.0, 8.0},
                                                                              {4.0, 6.0},
                                                                              {4.0, 6.0},
                                                                              {4.0, 7.0},
                                                                              {8.0, 12.0},
                                                                              {4.0, 6.0},
                                                                              {4.0, 6.0},
                                                                              {5.0, 8.0}}};
  std::pair<double, double> cruise_speed = {12.0, 18.0};
  /// Multiplier on the per-channel sensor noise.
  double noise = 1.0;
  double anomaly_rate = 0.5;
  std::pair<double, double> anomaly_duration = {1.5, 3.0};

  /// Throws ConfigError on negative, non-finite or all-zero probabilities and
  /// on invalid ranges.
  void validate() const;
  /// Reads the generator keys of `kv`; other keys are left untouched.
  static GeneratorConfig from_kv(const KeyValueConfig& kv);
  void to_kv(KeyValueConfig& kv) const;
  /// Label mix of the 150-hour reference dataset.
  static GeneratorConfig reference_mix();
};

/// Piecewise maneuver segments with smooth per-maneuver channel templates,
/// sensor noise and Poisson-timed anomaly injections.
Trace synth_trace(const GeneratorConfig& config, SeededRng& rng, std::string id = {});

}  // namespace mtad::data
