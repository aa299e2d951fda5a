#include "mtad/model/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mtad/error.hpp"
#include "mtad/nn/losses.hpp"
#include "mtad/numeric/rng.hpp"

namespace mtad::model {

namespace {

template <typename Model>
void run_epoch(Model& model, nn::AdamState<float>& adam, std::span<const SampleF> data,
               std::vector<std::size_t>& order, SeededRng& rng, const TrainOptions& options,
               std::span<const double> class_weights, std::size_t epoch) {
  if (options.batch_size == 0) throw ConfigError("batch size must be positive");
  rng.shuffle(order);
  auto& params = model.params();
  const double w_r = model.config().loss_weights.regularization;
  for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
    const std::size_t end = std::min(start + options.batch_size, order.size());
    const double scale = 1.0 / static_cast<double>(end - start);
    params.zero_grad();
    double batch_loss = 0.0;
    for (std::size_t i = start; i < end; ++i) {
      const auto& s = data[order[i]];
      batch_loss += model.window_loss(*s.input, s.targets, class_weights, scale, true).total;
    }
    if (w_r != 0.0) nn::l2_regularization_grad(params, w_r);
    const double norm = nn::clip_global_norm(params, options.clip_norm);
    if (!std::isfinite(batch_loss) || !std::isfinite(norm)) {
      throw NumericError("training diverged at epoch " + std::to_string(epoch) + ", batch " +
                         std::to_string(start / options.batch_size + 1));
    }
    nn::adam_step(adam, params);
  }
}

void check_metrics(const EpochMetrics& m) {
  for (const auto& v : {m.total, m.reconstruction, m.symbol, m.regularization}) {
    if (v && !std::isfinite(*v)) {
      throw NumericError("evaluation loss is not finite after epoch " + std::to_string(m.epoch));
    }
  }
}

std::vector<std::size_t> iota_order(std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  return order;
}

}  // namespace

std::vector<Symbol> present_labels(std::span<const SampleF> samples) {
  std::vector<bool> seen(kManeuverCount, false);
  for (const auto& s : samples) seen[index(s.label)] = true;
  std::vector<Symbol> out;
  for (std::size_t i = 0; i < kManeuverCount; ++i) {
    if (seen[i]) out.push_back(*symbol_from_index(i));
  }
  return out;
}

EpochMetrics evaluate_multitask(const MultiTaskModel& model, std::span<const SampleF> samples,
                                std::span<const double> class_weights) {
  EpochMetrics m;
  const auto& w = model.config().loss_weights;
  const double reg = nn::l2_regularization(model.params());
  m.regularization = reg;
  if (samples.empty()) return m;
  double recon = 0.0, symbol = 0.0;
  std::size_t correct = 0, positions = 0;
  for (const auto& s : samples) {
    const auto enc = model.encode(*s.input);
    recon += nn::mse_loss(model.reconstruct(enc), *s.input);
    if (!class_weights.empty()) {
      symbol += nn::weighted_cross_entropy(model.symbol_logits(enc, s.targets), symbol_indices(s.targets),
                                           class_weights);
    }
    const auto pred = model.predict_symbols(enc);
    for (std::size_t t = 0; t < pred.size() && t < s.targets.size(); ++t) correct += pred[t] == s.targets[t];
    positions += s.targets.size();
  }
  const double n = static_cast<double>(samples.size());
  m.reconstruction = recon / n;
  if (!class_weights.empty()) m.symbol = symbol / n;
  m.total = combine_losses(w, *m.reconstruction, m.symbol.value_or(0.0), reg);
  m.symbol_accuracy = positions ? static_cast<double>(correct) / static_cast<double>(positions) : 0.0;
  return m;
}

EpochMetrics evaluate_autoencoder(const BaselineAutoencoder& model, std::span<const SampleF> samples) {
  EpochMetrics m;
  const auto& w = model.config().loss_weights;
  m.regularization = nn::l2_regularization(model.params());
  if (samples.empty()) return m;
  double recon = 0.0;
  for (const auto& s : samples) recon += model.loss(*s.input);
  m.reconstruction = recon / static_cast<double>(samples.size());
  m.total = combine_losses(w, *m.reconstruction, 0.0, *m.regularization);
  return m;
}

EpochMetrics evaluate_ensemble(const EnsembleModel& model, std::span<const SampleF> samples) {
  EpochMetrics m;
  if (samples.empty()) return m;
  double recon = 0.0;
  for (const auto& s : samples) recon += model.ensemble_loss(*s.input).loss;
  m.reconstruction = recon / static_cast<double>(samples.size());
  return m;
}

std::vector<EpochMetrics> train_multitask(MultiTaskModel& model, std::span<const SampleF> train,
                                          std::span<const SampleF> eval,
                                          std::span<const double> class_weights,
                                          const TrainOptions& options, const EpochCallback& on_epoch) {
  nn::AdamState<float> adam(model.params(), options.adam);
  SeededRng rng(options.seed);
  auto order = iota_order(train.size());
  std::vector<EpochMetrics> history;
  for (std::size_t e = 1; e <= options.epochs; ++e) {
    run_epoch(model, adam, train, order, rng, options, class_weights, e);
    auto m = evaluate_multitask(model, eval, class_weights);
    m.epoch = e;
    if (on_epoch) on_epoch(m);
    check_metrics(m);
    history.push_back(m);
  }
  return history;
}

std::vector<EpochMetrics> train_autoencoder(BaselineAutoencoder& model, std::span<const SampleF> train,
                                            std::span<const SampleF> eval, const TrainOptions& options,
                                            const EpochCallback& on_epoch) {
  nn::AdamState<float> adam(model.params(), options.adam);
  SeededRng rng(options.seed);
  auto order = iota_order(train.size());
  std::vector<EpochMetrics> history;
  for (std::size_t e = 1; e <= options.epochs; ++e) {
    run_epoch(model, adam, train, order, rng, options, {}, e);
    auto m = evaluate_autoencoder(model, eval);
    m.epoch = e;
    if (on_epoch) on_epoch(m);
    check_metrics(m);
    history.push_back(m);
  }
  return history;
}

std::vector<EpochMetrics> train_ensemble(EnsembleModel& model, std::span<const SampleF> train,
                                         std::span<const SampleF> eval, const TrainOptions& options,
                                         const EpochCallback& on_epoch) {
  struct MemberRun {
    EnsembleModel::Member* member;
    std::vector<SampleF> data;
    nn::AdamState<float> adam;
    SeededRng rng;
    std::vector<std::size_t> order;
  };
  std::vector<MemberRun> runs;
  SeededRng root(options.seed);
  for (auto& m : model.members()) {
    std::vector<SampleF> subset;
    for (const auto& s : train) {
      if (s.label == m.label) subset.push_back(s);
    }
    auto order = iota_order(subset.size());
    runs.push_back({&m, std::move(subset), nn::AdamState<float>(m.model.params(), options.adam),
                    root.fork(index(m.label)), std::move(order)});
  }
  std::vector<EpochMetrics> history;
  for (std::size_t e = 1; e <= options.epochs; ++e) {
    for (auto& r : runs) {
      run_epoch(r.member->model, r.adam, r.data, r.order, r.rng, options, {}, e);
    }
    auto m = evaluate_ensemble(model, eval);
    m.epoch = e;
    if (on_epoch) on_epoch(m);
    check_metrics(m);
    history.push_back(m);
  }
  return history;
}

}  // namespace mtad::model
