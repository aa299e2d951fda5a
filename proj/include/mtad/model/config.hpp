#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mtad/numeric/array.hpp"
#include "mtad/vocab.hpp"

namespace mtad::model {

struct ConvSpec {
  std::size_t out_channels = 0;
  std::size_t kernel_width = 0;
  std::size_t stride = 1;

  bool operator==(const ConvSpec&) const = default;
};

/// Weights of the reconstruction, symbol and L2 terms in the total objective.
struct LossWeights {
  double reconstruction = 1.0;
  double symbol = 0.001;
  double regularization = 0.0001;
};

/// Combines the terms left to right: (w_A L_A + w_B L_B) + w_R L_R.
inline double combine_losses(const LossWeights& w, double recon, double symbol, double reg) {
  return w.reconstruction * recon + w.symbol * symbol + w.regularization * reg;
}

struct ModelConfig {
  std::size_t channels = 6;
  std::size_t window_steps = 25;
  std::size_t horizon_steps = 15;
  std::vector<ConvSpec> conv_specs = {{16, 3, 1}, {32, 3, 1}};
  std::size_t lstm_layers = 2;
  std::size_t hidden_size = 64;
  std::size_t embed_dim = 16;
  LossWeights loss_weights;
  /// Exponent k of the inverse-frequency class weights.
  double class_weight_exponent = 0.5;

  /// Throws ConfigError on an unusable geometry.
  void validate() const;

  std::size_t target_length() const { return horizon_steps + 1; }
  /// Sequence length after each conv layer, starting with window_steps.
  std::vector<std::size_t> conv_lengths() const;
  std::size_t encoded_steps() const { return conv_lengths().back(); }
  std::size_t encoded_channels() const;
  /// Final (h, c) of both directions of the top encoder layer.
  std::size_t embedding_size() const { return 4 * hidden_size; }

  /// Hidden size 256, matching the full-scale reference setup.
  static ModelConfig paper_scale();
};

/// "16:3:1,32:3:1" <-> conv specs.
std::vector<ConvSpec> parse_conv_specs(const std::string& text);
std::string format_conv_specs(std::span<const ConvSpec> specs);

struct LossBreakdown {
  double total = 0.0;
  double reconstruction = 0.0;
  double symbol = 0.0;
  double regularization = 0.0;
};

/// One training/evaluation unit as seen by the models.
template <typename T>
struct Sample {
  const BasicArray<T>* input = nullptr;  // [window_steps x channels]
  std::span<const Symbol> targets;       // horizon maneuvers + EOS
  Symbol label = Symbol::Background;     // majority maneuver of the input span
};

}  // namespace mtad::model
