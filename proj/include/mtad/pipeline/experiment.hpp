#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "mtad/data/pipeline.hpp"
#include "mtad/data/synth.hpp"
#include "mtad/model/trainer.hpp"
#include "mtad/scoring/gaussian.hpp"
#include "mtad/scoring/scores.hpp"

namespace mtad::pipeline {

/// Trace i is generated from SeededRng(seed).fork(i) and named "trace_<i>".
std::vector<data::Trace> synth_dataset(const data::GeneratorConfig& config, std::size_t traces, std::uint64_t seed);

struct PrepareOptions {
  double target_hz = 5.0;
  data::SegmentOptions segment;
  double min_speed = data::kDefaultMinSpeed;
  double train_fraction = 0.7;
  data::SplitMode split_mode = data::SplitMode::Chronological;
  std::uint64_t split_seed = 0;
  /// Removed from the training split only.
  std::optional<Symbol> exclude_label;
};

struct PreparedData {
  std::vector<data::Window> train;
  std::vector<data::Window> test;
  data::ScalerParams scaler;
  data::LabelStats stats;
  std::size_t segmented = 0;  // windows before the speed filter
  std::size_t kept = 0;       // after the speed filter
  std::size_t excluded = 0;   // training windows dropped by exclude_label
};

/// downsample -> segment -> speed filter -> split -> exclude (train only) ->
/// scaler fitted on train and applied to both -> label stats of train.
/// Window ids are global across traces. Throws DataError when nothing
/// survives the filter or the training split is empty.
PreparedData prepare_windows(std::span<const data::Trace> traces, const PrepareOptions& options);

/// Non-owning views; the windows must outlive the samples.
std::vector<model::SampleF> make_samples(std::span<const data::Window> windows);

enum class Variant { Multitask, BaselineAe, Ensemble, SymbolOnly };

std::string_view variant_name(Variant v) noexcept;
/// Throws ConfigError on an unknown name.
Variant parse_variant(std::string_view name);

/// Weights a variant trains with: symbol_only zeroes the reconstruction term.
model::ModelConfig variant_config(Variant v, model::ModelConfig base);

/// A trained model of one variant; exactly one pointer is set.
struct TrainedModel {
  Variant variant = Variant::Multitask;
  std::unique_ptr<model::MultiTaskModel> multitask;
  std::unique_ptr<model::BaselineAutoencoder> autoencoder;
  std::unique_ptr<model::EnsembleModel> ensemble;
  std::vector<model::EpochMetrics> metrics;

  /// Reconstruction of a scaled window; the ensemble uses its best member.
  Array reconstruct(const Array& window) const;
  /// Per-window reconstruction loss used as the baseline anomaly score
  /// (the member minimum for the ensemble).
  double reconstruction_loss(const Array& window) const;
};

/// Ensemble members cover the labels present in the training split.
TrainedModel train_variant(Variant variant, const model::ModelConfig& config, const PreparedData& data,
                           const model::TrainOptions& options, const model::EpochCallback& on_epoch = {});

/// Builds an untrained model of the right shape, ready for checkpoint loading.
TrainedModel empty_variant(Variant variant, const model::ModelConfig& config, std::span<const Symbol> ensemble_labels);

void save_trained(const std::filesystem::path& path, const TrainedModel& m);
void load_trained(const std::filesystem::path& path, TrainedModel& m);

/// Mean squared reconstruction error per channel and over all channels.
std::vector<std::pair<scoring::Modality, double>> modality_mse(const TrainedModel& m,
                                                               std::span<const data::Window> windows);

/// Error models per modality (in kAllModalities order) fitted on the training
/// split, and the scores of every test window under each of them.
struct ScoreSet {
  std::vector<scoring::GaussianErrorModel> models;
  std::vector<std::vector<scoring::ScoredWindow>> per_modality;  // aligned with the test windows
};

/// Raw Mahalanobis scores for every variant; scaled scores and NLL need
/// predicted symbols, so they are filled only for models with a symbol head
/// (otherwise nll is 0 and scaled equals raw).
ScoreSet score_windows(const TrainedModel& m, const PreparedData& data, std::optional<double> ridge = std::nullopt,
                       double nll_floor = scoring::kDefaultNllFloor);

/// Header: epoch,L_O,L_A,L_B,L_R,symbol_accuracy; absent values are empty.
void write_metrics_csv(std::ostream& out, std::span<const model::EpochMetrics> metrics);
/// The same rows without the header.
void write_metrics_csv_rows(std::ostream& out, std::span<const model::EpochMetrics> metrics);

}  // namespace mtad::pipeline
