#include "mtad/pipeline/experiment.hpp"

#include <ostream>
#include <string>

#include "mtad/error.hpp"
#include "mtad/model/checkpoint.hpp"
#include "mtad/nn/losses.hpp"
#include "mtad/scoring/report.hpp"

namespace mtad::pipeline {

std::vector<data::Trace> synth_dataset(const data::GeneratorConfig& config, std::size_t traces, std::uint64_t seed) {
  config.validate();
  SeededRng root(seed);
  std::vector<data::Trace> out;
  out.reserve(traces);
  for (std::size_t i = 0; i < traces; ++i) {
    SeededRng rng = root.fork(i);
    out.push_back(data::synth_trace(config, rng, "trace_" + std::to_string(i)));
  }
  return out;
}

PreparedData prepare_windows(std::span<const data::Trace> traces, const PrepareOptions& options) {
  PreparedData out;
  std::vector<data::Window> all;
  std::uint64_t next_id = 0;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const data::Trace low = data::downsample(traces[i], options.target_hz);
    data::SegmentOptions seg = options.segment;
    seg.trace_index = static_cast<std::uint32_t>(i);
    seg.first_id = next_id;
    auto ws = data::segment(low, seg);
    next_id += ws.size();
    out.segmented += ws.size();
    ws = data::speed_filter(std::move(ws), options.min_speed);
    for (auto& w : ws) all.push_back(std::move(w));
  }
  out.kept = all.size();
  if (all.empty()) throw DataError("no windows left after the speed filter");

  auto [train, test] = data::split(std::move(all), options.train_fraction, options.split_mode, options.split_seed);
  if (options.exclude_label) {
    const std::size_t before = train.size();
    train = data::exclude_label(std::move(train), *options.exclude_label);
    out.excluded = before - train.size();
  }
  if (train.empty()) throw DataError("training split is empty");
  out.scaler = data::fit_scaler(train);
  data::apply_scaler(out.scaler, std::span<data::Window>(train));
  data::apply_scaler(out.scaler, std::span<data::Window>(test));
  out.stats = data::label_stats(std::span<const data::Window>(train));
  out.train = std::move(train);
  out.test = std::move(test);
  return out;
}

std::vector<model::SampleF> make_samples(std::span<const data::Window> windows) {
  std::vector<model::SampleF> out;
  out.reserve(windows.size());
  for (const auto& w : windows) out.push_back({&w.input, w.targets, w.majority_label});
  return out;
}

std::string_view variant_name(Variant v) noexcept {
  switch (v) {
    case Variant::Multitask: return "multitask";
    case Variant::BaselineAe: return "baseline_ae";
    case Variant::Ensemble: return "ensemble";
    case Variant::SymbolOnly: return "symbol_only";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  for (auto v : {Variant::Multitask, Variant::BaselineAe, Variant::Ensemble, Variant::SymbolOnly}) {
    if (variant_name(v) == name) return v;
  }
  throw ConfigError("unknown variant '" + std::string(name) +
                    "' (expected multitask, baseline_ae, ensemble or symbol_only)");
}

model::ModelConfig variant_config(Variant v, model::ModelConfig base) {
  if (v == Variant::SymbolOnly) {
    base.loss_weights.reconstruction = 0.0;
    base.loss_weights.symbol = 1.0;
  }
  return base;
}

Array TrainedModel::reconstruct(const Array& window) const {
  if (multitask) return multitask->reconstruct(window);
  if (autoencoder) return autoencoder->reconstruct(window);
  if (ensemble) {
    const auto best = ensemble->ensemble_loss(window);
    for (const auto& m : ensemble->members()) {
      if (m.label == best.label) return m.model.reconstruct(window);
    }
  }
  throw Error("TrainedModel holds no model");
}

double TrainedModel::reconstruction_loss(const Array& window) const {
  if (ensemble) return ensemble->ensemble_loss(window).loss;
  return nn::mse_loss(reconstruct(window), window);
}

TrainedModel empty_variant(Variant variant, const model::ModelConfig& config, std::span<const Symbol> labels) {
  TrainedModel out;
  out.variant = variant;
  const auto cfg = variant_config(variant, config);
  switch (variant) {
    case Variant::Multitask:
    case Variant::SymbolOnly:
      out.multitask = std::make_unique<model::MultiTaskModel>(cfg, 0);
      break;
    case Variant::BaselineAe:
      out.autoencoder = std::make_unique<model::BaselineAutoencoder>(cfg, 0);
      break;
    case Variant::Ensemble:
      out.ensemble = std::make_unique<model::EnsembleModel>(cfg, std::vector<Symbol>(labels.begin(), labels.end()), 0);
      break;
  }
  return out;
}

TrainedModel train_variant(Variant variant, const model::ModelConfig& config, const PreparedData& data,
                           const model::TrainOptions& options, const model::EpochCallback& on_epoch) {
  const auto train = make_samples(data.train);
  const auto eval = make_samples(data.test);
  const auto cfg = variant_config(variant, config);
  TrainedModel out;
  out.variant = variant;
  switch (variant) {
    case Variant::Multitask:
    case Variant::SymbolOnly: {
      out.multitask = std::make_unique<model::MultiTaskModel>(cfg, options.seed);
      const auto cw = data.stats.class_weights(cfg.class_weight_exponent);
      out.metrics = model::train_multitask(*out.multitask, train, eval, cw, options, on_epoch);
      break;
    }
    case Variant::BaselineAe:
      out.autoencoder = std::make_unique<model::BaselineAutoencoder>(cfg, options.seed);
      out.metrics = model::train_autoencoder(*out.autoencoder, train, eval, options, on_epoch);
      break;
    case Variant::Ensemble:
      out.ensemble = std::make_unique<model::EnsembleModel>(cfg, model::present_labels(train), options.seed);
      out.metrics = model::train_ensemble(*out.ensemble, train, eval, options, on_epoch);
      break;
  }
  return out;
}

void save_trained(const std::filesystem::path& path, const TrainedModel& m) {
  if (m.multitask) return model::save_params(path, m.multitask->params());
  if (m.autoencoder) return model::save_params(path, m.autoencoder->params());
  if (m.ensemble) return model::save_ensemble(path, *m.ensemble);
  throw Error("TrainedModel holds no model");
}

void load_trained(const std::filesystem::path& path, TrainedModel& m) {
  if (m.multitask) return model::load_params(path, m.multitask->params());
  if (m.autoencoder) return model::load_params(path, m.autoencoder->params());
  if (m.ensemble) return model::load_ensemble(path, *m.ensemble);
  throw Error("TrainedModel holds no model");
}

std::vector<std::pair<scoring::Modality, double>> modality_mse(const TrainedModel& m,
                                                               std::span<const data::Window> windows) {
  std::vector<double> sums(scoring::kModalityCount, 0.0);
  std::size_t steps = 0, channels = 0;
  for (const auto& w : windows) {
    const Array r = m.reconstruct(w.input);
    steps = w.input.rows();
    channels = w.input.cols();
    for (std::size_t t = 0; t < steps; ++t) {
      for (std::size_t c = 0; c < channels; ++c) {
        const double d = static_cast<double>(w.input(t, c)) - static_cast<double>(r(t, c));
        sums[c] += d * d;
        sums.back() += d * d;
      }
    }
  }
  std::vector<std::pair<scoring::Modality, double>> out;
  const double n = static_cast<double>(windows.size());
  for (auto mod : scoring::kAllModalities) {
    const std::size_t i = static_cast<std::size_t>(mod);
    const double count = n * static_cast<double>(mod == scoring::Modality::Combined ? steps * channels : steps);
    out.emplace_back(mod, count > 0.0 ? sums[i] / count : 0.0);
  }
  return out;
}

ScoreSet score_windows(const TrainedModel& m, const PreparedData& data, std::optional<double> ridge,
                       double nll_floor) {
  using scoring::Modality;
  ScoreSet out;
  const std::size_t nm = scoring::kModalityCount;

  std::vector<std::vector<std::vector<double>>> train_errors(nm);
  for (const auto& w : data.train) {
    const Array r = m.reconstruct(w.input);
    for (std::size_t k = 0; k < nm; ++k) {
      train_errors[k].push_back(scoring::error_vector(w.input, r, scoring::kAllModalities[k]));
    }
  }
  for (std::size_t k = 0; k < nm; ++k) {
    out.models.push_back(scoring::fit_error_model(train_errors[k], ridge, scoring::kAllModalities[k]));
  }
  train_errors.clear();

  out.per_modality.assign(nm, {});
  for (auto& list : out.per_modality) list.reserve(data.test.size());
  for (const auto& w : data.test) {
    Array r;
    std::vector<Symbol> predicted;
    double nll = 0.0;
    if (m.multitask) {
      const auto enc = m.multitask->encode(w.input);
      r = m.multitask->reconstruct(enc);
      predicted = m.multitask->predict_symbols(enc);
      nll = scoring::sequence_nll(predicted, data.stats);
    } else {
      r = m.reconstruct(w.input);
    }
    for (std::size_t k = 0; k < nm; ++k) {
      const auto e = scoring::error_vector(w.input, r, scoring::kAllModalities[k]);
      scoring::ScoredWindow s;
      s.window_id = w.id;
      s.raw_score = scoring::mahalanobis(out.models[k], e);
      s.nll = nll;
      s.scaled_score = m.multitask ? scoring::scaled_score(s.raw_score, nll, nll_floor) : s.raw_score;
      s.predicted = predicted;
      s.majority_label = w.majority_label;
      s.anomaly_fraction = w.anomaly_fraction;
      out.per_modality[k].push_back(std::move(s));
    }
  }
  return out;
}

void write_metrics_csv(std::ostream& out, std::span<const model::EpochMetrics> metrics) {
  out << "epoch,L_O,L_A,L_B,L_R,symbol_accuracy\n";
  write_metrics_csv_rows(out, metrics);
}

void write_metrics_csv_rows(std::ostream& out, std::span<const model::EpochMetrics> metrics) {
  auto cell = [](const std::optional<double>& v) { return v ? scoring::format_number(*v) : std::string(); };
  for (const auto& m : metrics) {
    out << m.epoch << ',' << cell(m.total) << ',' << cell(m.reconstruction) << ',' << cell(m.symbol) << ','
        << cell(m.regularization) << ',' << cell(m.symbol_accuracy) << '\n';
  }
}

}  // namespace mtad::pipeline
