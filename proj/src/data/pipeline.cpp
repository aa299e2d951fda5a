#include "mtad/data/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mtad/error.hpp"
#include "mtad/nn/losses.hpp"
#include "mtad/numeric/rng.hpp"

namespace mtad::data {

namespace {

std::size_t integral_ratio(double value, const std::string& what) {
  const double r = std::round(value);
  if (r < 1.0 || std::abs(value - r) > 1e-9 * std::max(1.0, r)) {
    throw DataError(what + " (" + std::to_string(value) + ") is not a positive whole number");
  }
  return static_cast<std::size_t>(r);
}

}  // namespace

Trace downsample(const Trace& trace, double target_hz) {
  trace.validate();
  if (!(target_hz > 0.0)) throw DataError("downsample: target rate must be positive");
  const std::size_t block = integral_ratio(trace.sample_rate_hz / target_hz,
                                           "downsample: source/target rate ratio");
  const std::size_t n = trace.size() / block;
  Trace out = Trace::zeros(n, target_hz, trace.id);
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    const auto& src = trace.channels[c];
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < block; ++j) s += src[i * block + j];
      out.channels[c][i] = s / static_cast<double>(block);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.labels[i] = majority_label(trace.labels, i * block, (i + 1) * block);
    std::uint8_t any = 0;
    for (std::size_t j = 0; j < block; ++j) any |= trace.anomaly_mask[i * block + j];
    out.anomaly_mask[i] = any;
  }
  return out;
}

std::size_t span_samples(double seconds, double rate_hz) {
  return integral_ratio(seconds * rate_hz, "span of " + std::to_string(seconds) + " s in samples");
}

namespace {

// The stride may be fractional in samples (0.5 s at 5 Hz is 2.5).
std::size_t window_start(std::size_t k, double stride_samples) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(k) * stride_samples + 1e-9));
}

}  // namespace

std::size_t segment_count(std::size_t n, double rate_hz, const SegmentOptions& o) {
  const std::size_t need = span_samples(o.window_s, rate_hz) + span_samples(o.horizon_s, rate_hz);
  const double stride = o.stride_s * rate_hz;
  if (!(stride > 0.0)) throw DataError("segment: stride must be positive");
  if (n < need) return 0;
  return static_cast<std::size_t>(std::floor(static_cast<double>(n - need) / stride + 1e-9)) + 1;
}

std::vector<Window> segment(const Trace& trace, const SegmentOptions& o) {
  trace.validate();
  const double rate = trace.sample_rate_hz;
  const std::size_t steps = span_samples(o.window_s, rate);
  const std::size_t horizon = span_samples(o.horizon_s, rate);
  const double stride = o.stride_s * rate;
  const std::size_t count = segment_count(trace.size(), rate, o);
  const auto& speed = trace.channel(Channel::Speed);

  std::vector<Window> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t s = window_start(k, stride);
    Window w;
    w.id = o.first_id + k;
    w.trace_index = o.trace_index;
    w.start = s;
    w.input = Array({steps, kChannelCount});
    double max_speed = -INFINITY;
    std::size_t anomalous = 0;
    for (std::size_t t = 0; t < steps; ++t) {
      for (std::size_t c = 0; c < kChannelCount; ++c) w.input(t, c) = static_cast<float>(trace.channels[c][s + t]);
      max_speed = std::max(max_speed, speed[s + t]);
      anomalous += trace.anomaly_mask[s + t] ? 1 : 0;
    }
    w.max_speed = max_speed;
    w.anomaly_fraction = static_cast<double>(anomalous) / static_cast<double>(steps);
    w.majority_label = majority_label(trace.labels, s, s + steps);
    w.targets.assign(trace.labels.begin() + static_cast<std::ptrdiff_t>(s + steps),
                     trace.labels.begin() + static_cast<std::ptrdiff_t>(s + steps + horizon));
    w.targets.push_back(Symbol::Eos);
    out.push_back(std::move(w));
  }
  return out;
}

std::vector<Window> speed_filter(std::vector<Window> windows, double min_speed) {
  std::erase_if(windows, [&](const Window& w) { return !(w.max_speed >= min_speed); });
  return windows;
}

std::vector<Window> exclude_label(std::vector<Window> windows, Symbol label) {
  std::erase_if(windows, [&](const Window& w) { return w.majority_label == label; });
  return windows;
}

std::size_t train_count(std::size_t n, double train_fraction) {
  if (!(train_fraction >= 0.0 && train_fraction <= 1.0)) throw DataError("split: fraction must be in [0, 1]");
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * train_fraction + 1e-9));
}

std::pair<std::vector<Window>, std::vector<Window>> split(std::vector<Window> windows, double train_fraction,
                                                          SplitMode mode, std::uint64_t seed) {
  const std::size_t n_train = train_count(windows.size(), train_fraction);
  auto by_id = [](const Window& a, const Window& b) { return a.id < b.id; };
  std::stable_sort(windows.begin(), windows.end(), by_id);
  std::vector<std::size_t> order(windows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (mode == SplitMode::Shuffled) {
    SeededRng rng(seed);
    rng.shuffle(order);
    std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::sort(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  }
  std::pair<std::vector<Window>, std::vector<Window>> out;
  out.first.reserve(n_train);
  out.second.reserve(windows.size() - n_train);
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < n_train ? out.first : out.second).push_back(std::move(windows[order[i]]));
  }
  return out;
}

double ScalerParams::transform(std::size_t c, double x) const {
  const double range = max[c] - min[c];
  return range > 0.0 ? (x - min[c]) / range : 0.0;
}

double ScalerParams::inverse(std::size_t c, double y) const {
  const double range = max[c] - min[c];
  return range > 0.0 ? y * range + min[c] : min[c];
}

ScalerParams fit_scaler(std::span<const Window> train) {
  if (train.empty()) throw DataError("fit_scaler: empty training set");
  ScalerParams p;
  p.min.fill(INFINITY);
  p.max.fill(-INFINITY);
  for (const auto& w : train) {
    if (w.input.cols() != kChannelCount) throw ShapeError("fit_scaler: window has wrong channel count");
    for (std::size_t t = 0; t < w.input.rows(); ++t) {
      for (std::size_t c = 0; c < kChannelCount; ++c) {
        const double v = w.input(t, c);
        p.min[c] = std::min(p.min[c], v);
        p.max[c] = std::max(p.max[c], v);
      }
    }
  }
  return p;
}

void apply_scaler(const ScalerParams& params, Window& w) {
  for (std::size_t t = 0; t < w.input.rows(); ++t) {
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      w.input(t, c) = static_cast<float>(params.transform(c, w.input(t, c)));
    }
  }
}

void apply_scaler(const ScalerParams& params, std::span<Window> windows) {
  for (auto& w : windows) apply_scaler(params, w);
}

void invert_scaler(const ScalerParams& params, Window& w) {
  for (std::size_t t = 0; t < w.input.rows(); ++t) {
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      w.input(t, c) = static_cast<float>(params.inverse(c, w.input(t, c)));
    }
  }
}

LabelStats label_stats(std::span<const Symbol> labels) {
  LabelStats s;
  for (auto l : labels) {
    if (!is_maneuver(l)) throw DataError("label_stats: non-maneuver label");
    ++s.counts[index(l)];
  }
  s.total = labels.size();
  const double denom = static_cast<double>(s.total) + static_cast<double>(kManeuverCount);
  for (std::size_t i = 0; i < kManeuverCount; ++i) {
    s.frequency[i] = (static_cast<double>(s.counts[i]) + 1.0) / denom;
  }
  return s;
}

LabelStats label_stats(std::span<const Window> train) {
  std::vector<Symbol> labels;
  labels.reserve(train.size());
  for (const auto& w : train) labels.push_back(w.majority_label);
  return label_stats(labels);
}

std::vector<double> LabelStats::class_weights(double k) const {
  auto w = nn::class_weights(frequency, k);
  w.push_back(0.0);  // SOS
  w.push_back(1.0);  // EOS
  return w;
}

}  // namespace mtad::data
