#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mtad/data/trace.hpp"

namespace mtad::data {

/// Block mean of each channel, block majority of labels (ties go to the
/// earliest label in the block) and block OR of the anomaly mask. A trailing
/// partial block is dropped. Throws DataError unless the source rate is an
/// integer multiple of target_hz.
Trace downsample(const Trace& trace, double target_hz);

struct SegmentOptions {
  double window_s = 5.0;
  double stride_s = 0.5;
  double horizon_s = 3.0;
  std::uint32_t trace_index = 0;
  std::uint64_t first_id = 0;  // id of the first window; later ids increase by one
};

/// Samples per span at the given rate; throws DataError unless integral.
std::size_t span_samples(double seconds, double rate_hz);

/// Number of windows `segment` produces for a trace of n samples.
std::size_t segment_count(std::size_t n, double rate_hz, const SegmentOptions& options = {});

/// Window k starts at floor(k * stride * rate); each carries the labels of the
/// following horizon as targets plus EOS. Traces shorter than window plus
/// horizon produce no windows.
std::vector<Window> segment(const Trace& trace, const SegmentOptions& options = {});

/// Keeps windows whose max speed is >= min_speed (m/s); order is preserved.
std::vector<Window> speed_filter(std::vector<Window> windows, double min_speed = kDefaultMinSpeed);

/// Drops windows whose majority label is `label`.
std::vector<Window> exclude_label(std::vector<Window> windows, Symbol label);

enum class SplitMode { Chronological, Shuffled };

/// Train size is floor(N * train_fraction). Chronological takes the lowest
/// ids for training; shuffled draws a seeded permutation. Both halves are
/// returned in id order.
std::pair<std::vector<Window>, std::vector<Window>> split(std::vector<Window> windows,
                                                          double train_fraction = 0.7,
                                                          SplitMode mode = SplitMode::Chronological,
                                                          std::uint64_t seed = 0);
std::size_t train_count(std::size_t n, double train_fraction);

/// Per-channel min-max scaling fitted on the training windows.
struct ScalerParams {
  std::array<double, kChannelCount> min{};
  std::array<double, kChannelCount> max{};

  /// (x - min) / (max - min); 0 for a degenerate channel. Not clamped.
  double transform(std::size_t channel, double x) const;
  /// For a degenerate channel returns min.
  double inverse(std::size_t channel, double y) const;
};

ScalerParams fit_scaler(std::span<const Window> train);
void apply_scaler(const ScalerParams& params, Window& w);
void apply_scaler(const ScalerParams& params, std::span<Window> windows);
void invert_scaler(const ScalerParams& params, Window& w);

/// Laplace-smoothed maneuver frequencies of the training majority labels:
/// f_s = (count_s + 1) / (N + 11).
struct LabelStats {
  std::array<std::uint64_t, kManeuverCount> counts{};
  std::array<double, kManeuverCount> frequency{};
  std::uint64_t total = 0;

  /// Per-vocabulary weights f_s^-k; SOS gets 0 (never a target), EOS gets 1.
  std::vector<double> class_weights(double k) const;
};

LabelStats label_stats(std::span<const Window> train);
LabelStats label_stats(std::span<const Symbol> labels);

}  // namespace mtad::data
