#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mtad/model/config.hpp"
#include "mtad/nn/layers.hpp"
#include "mtad/nn/lstm.hpp"
#include "mtad/nn/param.hpp"

namespace mtad::model {

/// Plain LSTM autoencoder over the raw window: a unidirectional encoder stack
/// whose final states seed an input-free decoder stack, followed by a dense
/// map back to the input channels. Uses hidden_size, lstm_layers and the
/// window geometry of the config; conv and symbol settings are ignored.
template <typename T>
class BasicBaselineAutoencoder {
 public:
  BasicBaselineAutoencoder(ModelConfig config, std::uint64_t seed, const std::string& prefix = "ae");

  const ModelConfig& config() const { return config_; }
  nn::ParamStore<T>& params() { return *store_; }
  const nn::ParamStore<T>& params() const { return *store_; }

  BasicArray<T> reconstruct(const BasicArray<T>& window) const;
  /// Reconstruction MSE of one window.
  double loss(const BasicArray<T>& window) const;

  /// w_A * MSE; gradients scaled by grad_scale. targets and class weights are
  /// accepted for interface parity with the multi-task model and ignored.
  LossBreakdown window_loss(const BasicArray<T>& window, std::span<const Symbol> targets,
                            std::span<const double> class_weights, double grad_scale,
                            bool accumulate_grad);

 private:
  ModelConfig config_;
  std::unique_ptr<nn::ParamStore<T>> store_;
  std::vector<nn::Lstm<T>> encoder_;
  std::vector<nn::Lstm<T>> decoder_;
  nn::Dense<T> projection_;
};

using BaselineAutoencoder = BasicBaselineAutoencoder<float>;

}  // namespace mtad::model
