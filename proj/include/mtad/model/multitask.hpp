#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "mtad/model/config.hpp"
#include "mtad/nn/layers.hpp"
#include "mtad/nn/lstm.hpp"
#include "mtad/nn/param.hpp"
#include "mtad/vocab.hpp"

namespace mtad::model {

template <typename T>
struct Encoding {
  /// [fwd_h ; fwd_c ; bwd_h ; bwd_c] of the top encoder layer.
  std::vector<T> embedding;
  /// Final states per encoder layer, bottom first.
  std::vector<nn::LstmState<T>> forward_final;
  std::vector<nn::LstmState<T>> backward_final;
};

/// Conv + BiLSTM encoder feeding a reconstruction decoder (A) and a
/// maneuver sequence decoder (B).
///
/// Decoder A runs BiLSTM layers seeded with the encoder states of the same
/// layer, a dense map and tanh, then transposed convolutions mirroring the
/// encoder. Decoder B is a unidirectional LSTM stack seeded with the encoder
/// forward states, reading [SOS, s_1 .. s_H] and emitting [s_1 .. s_H, EOS].
template <typename T>
class BasicMultiTaskModel {
 public:
  BasicMultiTaskModel(ModelConfig config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  nn::ParamStore<T>& params() { return *store_; }
  const nn::ParamStore<T>& params() const { return *store_; }

  Encoding<T> encode(const BasicArray<T>& window) const;
  /// [window_steps x channels].
  BasicArray<T> reconstruct(const Encoding<T>& encoding) const;
  BasicArray<T> reconstruct(const BasicArray<T>& window) const { return reconstruct(encode(window)); }

  /// Greedy decode of target_length() symbols; ties go to the lowest index.
  std::vector<Symbol> predict_symbols(const Encoding<T>& encoding) const;
  /// Teacher-forced logits [target_length() x vocab] for the given targets.
  BasicArray<T> symbol_logits(const Encoding<T>& encoding, std::span<const Symbol> targets) const;

  /// Total objective of one window including the L2 term. Gradients of every
  /// term are accumulated into params() when accumulate_grad is set.
  LossBreakdown multitask_loss(const BasicArray<T>& window, std::span<const Symbol> targets,
                               std::span<const double> class_weights, bool accumulate_grad = false);

  /// Data terms only (w_A L_A + w_B L_B in total); gradients are scaled by
  /// grad_scale. Terms with zero weight are skipped entirely.
  LossBreakdown window_loss(const BasicArray<T>& window, std::span<const Symbol> targets,
                            std::span<const double> class_weights, double grad_scale,
                            bool accumulate_grad);

 private:
  struct EncoderTape;
  struct DecoderATape;
  struct DecoderBTape;

  Encoding<T> encode_impl(const BasicArray<T>& window, EncoderTape* tape) const;
  BasicArray<T> decode_a(const Encoding<T>& enc, DecoderATape* tape) const;
  BasicArray<T> decode_b(const Encoding<T>& enc, std::span<const Symbol> targets,
                         DecoderBTape* tape) const;

  ModelConfig config_;
  std::unique_ptr<nn::ParamStore<T>> store_;
  std::vector<nn::Conv1d<T>> convs_;
  std::vector<nn::BiLstm<T>> encoder_;
  std::vector<nn::BiLstm<T>> decoder_a_;
  nn::Dense<T> projection_a_;
  std::vector<nn::ConvTranspose1d<T>> deconvs_;  // deconvs_[i] inverts convs_[i]
  nn::Embedding<T> embedding_;
  std::vector<nn::Lstm<T>> decoder_b_;
  nn::Dense<T> projection_b_;
};

using MultiTaskModel = BasicMultiTaskModel<float>;

/// Index form of a symbol sequence.
std::vector<std::size_t> symbol_indices(std::span<const Symbol> symbols);

}  // namespace mtad::model
