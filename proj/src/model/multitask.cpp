#include "mtad/model/multitask.hpp"

#include <algorithm>
#include <string>

#include "mtad/error.hpp"
#include "mtad/nn/losses.hpp"

namespace mtad::model {

std::vector<std::size_t> symbol_indices(std::span<const Symbol> symbols) {
  std::vector<std::size_t> out;
  out.reserve(symbols.size());
  for (auto s : symbols) out.push_back(index(s));
  return out;
}

namespace {

template <typename T>
void add_state(nn::LstmState<T>& acc, const nn::LstmState<T>& d) {
  for (std::size_t i = 0; i < acc.h.size(); ++i) acc.h[i] += d.h[i];
  for (std::size_t i = 0; i < acc.c.size(); ++i) acc.c[i] += d.c[i];
}

}  // namespace

template <typename T>
struct BasicMultiTaskModel<T>::EncoderTape {
  std::vector<BasicArray<T>> conv_acts;    // [0] = window, [i + 1] = tanh(conv_i(...))
  std::vector<BasicArray<T>> lstm_inputs;  // input of each encoder layer
  std::vector<typename nn::BiLstm<T>::Tape> lstm;
};

template <typename T>
struct BasicMultiTaskModel<T>::DecoderATape {
  std::vector<typename nn::BiLstm<T>::Tape> lstm;
  std::vector<BasicArray<T>> lstm_inputs;  // [0] unused (input-free layer)
  BasicArray<T> top;
  std::vector<BasicArray<T>> stages;  // [0] = projection, [k] = k-th transposed conv
};

template <typename T>
struct BasicMultiTaskModel<T>::DecoderBTape {
  std::vector<std::size_t> inputs;
  std::vector<typename nn::Lstm<T>::Tape> lstm;
  std::vector<BasicArray<T>> lstm_inputs;  // [0] = embedded inputs
  BasicArray<T> top;
};

template <typename T>
BasicMultiTaskModel<T>::BasicMultiTaskModel(ModelConfig config, std::uint64_t seed)
    : config_(std::move(config)), store_(std::make_unique<nn::ParamStore<T>>()) {
  config_.validate();
  SeededRng rng(seed);
  auto& s = *store_;
  const std::size_t h = config_.hidden_size;

  std::size_t channels = config_.channels;
  for (std::size_t i = 0; i < config_.conv_specs.size(); ++i) {
    const auto& spec = config_.conv_specs[i];
    nn::Conv1dGeometry g{channels, spec.out_channels, spec.kernel_width, spec.stride};
    convs_.emplace_back(s, "enc.conv" + std::to_string(i), g, rng);
    channels = spec.out_channels;
  }
  for (std::size_t l = 0; l < config_.lstm_layers; ++l) {
    encoder_.emplace_back(s, "enc.lstm" + std::to_string(l), l == 0 ? channels : 2 * h, h, rng);
  }

  for (std::size_t l = 0; l < config_.lstm_layers; ++l) {
    decoder_a_.emplace_back(s, "decA.lstm" + std::to_string(l), l == 0 ? 0 : 2 * h, h, rng);
  }
  projection_a_ = nn::Dense<T>(s, "decA.proj", 2 * h, channels, rng);
  deconvs_.resize(convs_.size());
  for (std::size_t k = convs_.size(); k-- > 0;) {
    deconvs_[k] = nn::ConvTranspose1d<T>(s, "decA.deconv" + std::to_string(k), convs_[k].geometry(), rng);
  }

  embedding_ = nn::Embedding<T>(s, "decB.embed", kVocabSize, config_.embed_dim, rng);
  for (std::size_t l = 0; l < config_.lstm_layers; ++l) {
    decoder_b_.emplace_back(s, "decB.lstm" + std::to_string(l), l == 0 ? config_.embed_dim : h, h,
                            false, rng);
  }
  projection_b_ = nn::Dense<T>(s, "decB.proj", h, kVocabSize, rng);
}

template <typename T>
Encoding<T> BasicMultiTaskModel<T>::encode_impl(const BasicArray<T>& window, EncoderTape* tape) const {
  if (window.rank() != 2 || window.rows() != config_.window_steps || window.cols() != config_.channels) {
    throw ShapeError("window must be [" + std::to_string(config_.window_steps) + " x " +
                     std::to_string(config_.channels) + "], got " + shape_to_string(window.shape()));
  }
  BasicArray<T> seq = window;
  if (tape) tape->conv_acts.push_back(seq);
  for (const auto& conv : convs_) {
    seq = conv.forward(seq);
    nn::tanh_inplace(seq);
    if (tape) tape->conv_acts.push_back(seq);
  }
  const std::size_t steps = seq.rows();
  const std::size_t h = config_.hidden_size;
  const auto zero = nn::LstmState<T>::zeros(h);
  Encoding<T> enc;
  if (tape) tape->lstm.resize(encoder_.size());
  for (std::size_t l = 0; l < encoder_.size(); ++l) {
    auto res = encoder_[l].forward(&seq, steps, zero, zero, tape ? &tape->lstm[l] : nullptr);
    if (tape) tape->lstm_inputs.push_back(std::move(seq));
    seq = std::move(res.outputs);
    enc.forward_final.push_back(std::move(res.forward_final));
    enc.backward_final.push_back(std::move(res.backward_final));
  }
  const auto& f = enc.forward_final.back();
  const auto& b = enc.backward_final.back();
  enc.embedding.reserve(4 * h);
  for (const auto* part : {&f.h, &f.c, &b.h, &b.c}) {
    enc.embedding.insert(enc.embedding.end(), part->begin(), part->end());
  }
  return enc;
}

template <typename T>
Encoding<T> BasicMultiTaskModel<T>::encode(const BasicArray<T>& window) const {
  return encode_impl(window, nullptr);
}

template <typename T>
BasicArray<T> BasicMultiTaskModel<T>::decode_a(const Encoding<T>& enc, DecoderATape* tape) const {
  const std::size_t steps = config_.encoded_steps();
  BasicArray<T> seq;
  if (tape) tape->lstm.resize(decoder_a_.size());
  for (std::size_t l = 0; l < decoder_a_.size(); ++l) {
    auto res = decoder_a_[l].forward(l == 0 ? nullptr : &seq, steps, enc.forward_final[l],
                                     enc.backward_final[l], tape ? &tape->lstm[l] : nullptr);
    if (tape) tape->lstm_inputs.push_back(std::move(seq));
    seq = std::move(res.outputs);
  }
  BasicArray<T> cur = projection_a_.forward(seq);
  if (!deconvs_.empty()) nn::tanh_inplace(cur);
  if (tape) {
    tape->top = std::move(seq);
    tape->stages.push_back(cur);
  }
  const auto lengths = config_.conv_lengths();
  for (std::size_t i = deconvs_.size(); i-- > 0;) {
    cur = deconvs_[i].forward(cur, lengths[i]);
    if (i > 0) nn::tanh_inplace(cur);
    if (tape) tape->stages.push_back(cur);
  }
  return cur;
}

template <typename T>
BasicArray<T> BasicMultiTaskModel<T>::reconstruct(const Encoding<T>& encoding) const {
  return decode_a(encoding, nullptr);
}

template <typename T>
BasicArray<T> BasicMultiTaskModel<T>::decode_b(const Encoding<T>& enc, std::span<const Symbol> targets,
                                               DecoderBTape* tape) const {
  const std::size_t steps = config_.target_length();
  if (targets.size() != steps) {
    throw ShapeError("symbol target must have " + std::to_string(steps) + " entries, got " +
                     std::to_string(targets.size()));
  }
  std::vector<std::size_t> inputs{index(Symbol::Sos)};
  for (std::size_t t = 0; t + 1 < steps; ++t) {
    if (index(targets[t]) >= kVocabSize) throw Error("symbol index out of vocabulary");
    inputs.push_back(index(targets[t]));
  }
  const std::size_t e = config_.embed_dim;
  BasicArray<T> seq({steps, e});
  for (std::size_t t = 0; t < steps; ++t) {
    const T* row = embedding_.lookup(inputs[t]);
    std::copy(row, row + e, &seq(t, 0));
  }
  if (tape) tape->lstm.resize(decoder_b_.size());
  for (std::size_t l = 0; l < decoder_b_.size(); ++l) {
    nn::LstmState<T> final_state;
    auto out = decoder_b_[l].forward(&seq, steps, enc.forward_final[l], final_state,
                                     tape ? &tape->lstm[l] : nullptr);
    if (tape) tape->lstm_inputs.push_back(std::move(seq));
    seq = std::move(out);
  }
  auto logits = projection_b_.forward(seq);
  if (tape) {
    tape->inputs = std::move(inputs);
    tape->top = std::move(seq);
  }
  return logits;
}

template <typename T>
BasicArray<T> BasicMultiTaskModel<T>::symbol_logits(const Encoding<T>& encoding,
                                                    std::span<const Symbol> targets) const {
  return decode_b(encoding, targets, nullptr);
}

template <typename T>
std::vector<Symbol> BasicMultiTaskModel<T>::predict_symbols(const Encoding<T>& encoding) const {
  const std::size_t layers = decoder_b_.size();
  const std::size_t h = config_.hidden_size;
  std::vector<nn::LstmState<T>> states = encoding.forward_final;
  std::vector<T> x(std::max(config_.embed_dim, h));
  std::vector<T> logits(kVocabSize);
  nn::LstmState<T> next = nn::LstmState<T>::zeros(h);
  std::vector<Symbol> out;
  std::size_t symbol = index(Symbol::Sos);
  for (std::size_t t = 0; t < config_.target_length(); ++t) {
    const T* row = embedding_.lookup(symbol);
    std::copy(row, row + config_.embed_dim, x.begin());
    for (std::size_t l = 0; l < layers; ++l) {
      decoder_b_[l].cell().step(x.data(), states[l].h.data(), states[l].c.data(), next.h.data(),
                                next.c.data(), nullptr);
      std::swap(states[l], next);
      std::copy(states[l].h.begin(), states[l].h.end(), x.begin());
    }
    projection_b_.forward_row(x.data(), logits.data());
    std::size_t best = 0;
    for (std::size_t v = 1; v < kVocabSize; ++v) {
      if (logits[v] > logits[best]) best = v;
    }
    out.push_back(*symbol_from_index(best));
    symbol = best;
  }
  return out;
}

template <typename T>
LossBreakdown BasicMultiTaskModel<T>::window_loss(const BasicArray<T>& window,
                                                  std::span<const Symbol> targets,
                                                  std::span<const double> class_weights,
                                                  double grad_scale, bool accumulate_grad) {
  const auto& w = config_.loss_weights;
  // Zero-weight terms contribute nothing to training, so skip them outright.
  const bool use_a = !accumulate_grad || w.reconstruction != 0.0;
  if (w.symbol != 0.0 && class_weights.size() != kVocabSize) {
    throw ShapeError("class weights must have one entry per vocabulary symbol");
  }
  const bool use_b = accumulate_grad ? w.symbol != 0.0 : class_weights.size() == kVocabSize;
  const auto target_idx = symbol_indices(targets);

  EncoderTape enc_tape;
  DecoderATape a_tape;
  DecoderBTape b_tape;
  const auto enc = encode_impl(window, accumulate_grad ? &enc_tape : nullptr);

  LossBreakdown out;
  BasicArray<T> recon, logits;
  if (use_a) {
    recon = decode_a(enc, accumulate_grad ? &a_tape : nullptr);
    out.reconstruction = nn::mse_loss(recon, window);
  }
  if (use_b) {
    logits = decode_b(enc, targets, accumulate_grad ? &b_tape : nullptr);
    out.symbol = nn::weighted_cross_entropy(logits, target_idx, class_weights);
  }
  out.total = w.reconstruction * out.reconstruction + w.symbol * out.symbol;
  if (!accumulate_grad) return out;

  const std::size_t layers = config_.lstm_layers;
  const std::size_t h = config_.hidden_size;
  std::vector<nn::LstmState<T>> d_fwd(layers, nn::LstmState<T>::zeros(h));
  std::vector<nn::LstmState<T>> d_bwd(layers, nn::LstmState<T>::zeros(h));

  if (use_a) {
    auto d = nn::mse_loss_grad(recon, window, grad_scale * w.reconstruction);
    const std::size_t n = deconvs_.size();
    for (std::size_t k = n; k >= 1; --k) {
      if (k < n) nn::tanh_backward_inplace(a_tape.stages[k], d);
      d = deconvs_[n - k].backward(a_tape.stages[k - 1], d);
    }
    if (n > 0) nn::tanh_backward_inplace(a_tape.stages[0], d);
    d = projection_a_.backward(a_tape.top, d);
    for (std::size_t l = layers; l-- > 0;) {
      nn::LstmState<T> di_f, di_b;
      BasicArray<T> dx;
      decoder_a_[l].backward(a_tape.lstm[l], &d, nullptr, nullptr, l > 0 ? &dx : nullptr, di_f, di_b);
      add_state(d_fwd[l], di_f);
      add_state(d_bwd[l], di_b);
      d = std::move(dx);
    }
  }

  if (use_b) {
    auto dlogits = nn::weighted_cross_entropy_grad(logits, target_idx, class_weights,
                                                   grad_scale * w.symbol);
    auto d = projection_b_.backward(b_tape.top, dlogits);
    for (std::size_t l = layers; l-- > 0;) {
      nn::LstmState<T> di;
      BasicArray<T> dx;
      decoder_b_[l].backward(b_tape.lstm[l], &d, nullptr, &dx, di);
      add_state(d_fwd[l], di);
      d = std::move(dx);
    }
    for (std::size_t t = 0; t < b_tape.inputs.size(); ++t) embedding_.backward(b_tape.inputs[t], &d(t, 0));
  }

  BasicArray<T> d_out;
  for (std::size_t l = layers; l-- > 0;) {
    nn::LstmState<T> unused_f, unused_b;
    BasicArray<T> dx;
    encoder_[l].backward(enc_tape.lstm[l], l + 1 < layers ? &d_out : nullptr, &d_fwd[l], &d_bwd[l],
                         &dx, unused_f, unused_b);
    d_out = std::move(dx);
  }
  for (std::size_t i = convs_.size(); i-- > 0;) {
    nn::tanh_backward_inplace(enc_tape.conv_acts[i + 1], d_out);
    d_out = convs_[i].backward(enc_tape.conv_acts[i], d_out);
  }
  return out;
}

template <typename T>
LossBreakdown BasicMultiTaskModel<T>::multitask_loss(const BasicArray<T>& window,
                                                     std::span<const Symbol> targets,
                                                     std::span<const double> class_weights,
                                                     bool accumulate_grad) {
  auto out = window_loss(window, targets, class_weights, 1.0, accumulate_grad);
  const auto& w = config_.loss_weights;
  out.regularization = nn::l2_regularization(*store_);
  if (accumulate_grad && w.regularization != 0.0) nn::l2_regularization_grad(*store_, w.regularization);
  out.total = combine_losses(w, out.reconstruction, out.symbol, out.regularization);
  return out;
}

template class BasicMultiTaskModel<float>;
template class BasicMultiTaskModel<double>;

}  // namespace mtad::model
