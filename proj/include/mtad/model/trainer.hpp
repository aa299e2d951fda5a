#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mtad/model/autoencoder.hpp"
#include "mtad/model/config.hpp"
#include "mtad/model/ensemble.hpp"
#include "mtad/model/multitask.hpp"
#include "mtad/nn/optim.hpp"

namespace mtad::model {

struct TrainOptions {
  std::size_t epochs = 30;
  std::size_t batch_size = 32;
  nn::AdamConfig adam{0.005, 0.9, 0.999, 1e-7};
  double clip_norm = 5.0;
  std::uint64_t seed = 0;
};

struct EpochMetrics {
  std::size_t epoch = 0;  // 1-based
  std::optional<double> total;
  std::optional<double> reconstruction;
  std::optional<double> symbol;
  std::optional<double> regularization;
  std::optional<double> symbol_accuracy;
};

using SampleF = Sample<float>;
/// Called after each epoch with that epoch's evaluation metrics.
using EpochCallback = std::function<void(const EpochMetrics&)>;

/// Mean losses over `samples`, plus greedy-decode symbol accuracy over all
/// target positions.
EpochMetrics evaluate_multitask(const MultiTaskModel& model, std::span<const SampleF> samples,
                                std::span<const double> class_weights);
EpochMetrics evaluate_autoencoder(const BaselineAutoencoder& model, std::span<const SampleF> samples);
/// reconstruction holds the mean minimum member loss.
EpochMetrics evaluate_ensemble(const EnsembleModel& model, std::span<const SampleF> samples);

/// Minibatch Adam on the total objective with global-norm clipping. Every
/// epoch ends with an evaluation on `eval`. Throws NumericError as soon as a
/// loss or gradient turns non-finite.
std::vector<EpochMetrics> train_multitask(MultiTaskModel& model, std::span<const SampleF> train,
                                          std::span<const SampleF> eval,
                                          std::span<const double> class_weights,
                                          const TrainOptions& options, const EpochCallback& on_epoch = {});

std::vector<EpochMetrics> train_autoencoder(BaselineAutoencoder& model, std::span<const SampleF> train,
                                            std::span<const SampleF> eval, const TrainOptions& options,
                                            const EpochCallback& on_epoch = {});

/// Trains every member on the training windows carrying its label. Member
/// budgets match a single autoencoder: the same epochs over their subset.
std::vector<EpochMetrics> train_ensemble(EnsembleModel& model, std::span<const SampleF> train,
                                         std::span<const SampleF> eval, const TrainOptions& options,
                                         const EpochCallback& on_epoch = {});

/// Labels present in `samples`, in index order.
std::vector<Symbol> present_labels(std::span<const SampleF> samples);

}  // namespace mtad::model
