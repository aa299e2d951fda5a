#include "mtad/model/autoencoder.hpp"

#include "mtad/error.hpp"
#include "mtad/nn/losses.hpp"

namespace mtad::model {

template <typename T>
BasicBaselineAutoencoder<T>::BasicBaselineAutoencoder(ModelConfig config, std::uint64_t seed,
                                                      const std::string& prefix)
    : config_(std::move(config)), store_(std::make_unique<nn::ParamStore<T>>()) {
  config_.validate();
  SeededRng rng(seed);
  const std::size_t h = config_.hidden_size;
  for (std::size_t l = 0; l < config_.lstm_layers; ++l) {
    encoder_.emplace_back(*store_, prefix + ".enc" + std::to_string(l), l == 0 ? config_.channels : h,
                          h, false, rng);
  }
  for (std::size_t l = 0; l < config_.lstm_layers; ++l) {
    decoder_.emplace_back(*store_, prefix + ".dec" + std::to_string(l), l == 0 ? 0 : h, h, false, rng);
  }
  projection_ = nn::Dense<T>(*store_, prefix + ".proj", h, config_.channels, rng);
}

template <typename T>
BasicArray<T> BasicBaselineAutoencoder<T>::reconstruct(const BasicArray<T>& window) const {
  if (window.rank() != 2 || window.rows() != config_.window_steps || window.cols() != config_.channels) {
    throw ShapeError("window shape " + shape_to_string(window.shape()) + " does not match the model");
  }
  const std::size_t steps = config_.window_steps;
  const auto zero = nn::LstmState<T>::zeros(config_.hidden_size);
  std::vector<nn::LstmState<T>> finals(encoder_.size());
  BasicArray<T> seq = window;
  for (std::size_t l = 0; l < encoder_.size(); ++l) seq = encoder_[l].forward(&seq, steps, zero, finals[l], nullptr);
  nn::LstmState<T> unused;
  for (std::size_t l = 0; l < decoder_.size(); ++l) {
    seq = decoder_[l].forward(l == 0 ? nullptr : &seq, steps, finals[l], unused, nullptr);
  }
  return projection_.forward(seq);
}

template <typename T>
double BasicBaselineAutoencoder<T>::loss(const BasicArray<T>& window) const {
  return nn::mse_loss(reconstruct(window), window);
}

template <typename T>
LossBreakdown BasicBaselineAutoencoder<T>::window_loss(const BasicArray<T>& window,
                                                       std::span<const Symbol>, std::span<const double>,
                                                       double grad_scale, bool accumulate_grad) {
  LossBreakdown out;
  const double w = config_.loss_weights.reconstruction;
  if (!accumulate_grad) {
    out.reconstruction = loss(window);
    out.total = w * out.reconstruction;
    return out;
  }
  if (window.rank() != 2 || window.rows() != config_.window_steps || window.cols() != config_.channels) {
    throw ShapeError("window shape " + shape_to_string(window.shape()) + " does not match the model");
  }
  const std::size_t layers = encoder_.size();
  const std::size_t steps = config_.window_steps;
  const std::size_t h = config_.hidden_size;
  const auto zero = nn::LstmState<T>::zeros(h);

  std::vector<typename nn::Lstm<T>::Tape> enc_tapes(layers), dec_tapes(layers);
  std::vector<nn::LstmState<T>> finals(layers);
  BasicArray<T> seq = window;
  for (std::size_t l = 0; l < layers; ++l) seq = encoder_[l].forward(&seq, steps, zero, finals[l], &enc_tapes[l]);
  nn::LstmState<T> unused;
  for (std::size_t l = 0; l < layers; ++l) {
    seq = decoder_[l].forward(l == 0 ? nullptr : &seq, steps, finals[l], unused, &dec_tapes[l]);
  }
  const auto recon = projection_.forward(seq);
  out.reconstruction = nn::mse_loss(recon, window);
  out.total = w * out.reconstruction;
  if (w == 0.0) return out;

  auto d = projection_.backward(seq, nn::mse_loss_grad(recon, window, grad_scale * w));
  std::vector<nn::LstmState<T>> d_finals(layers);
  for (std::size_t l = layers; l-- > 0;) {
    BasicArray<T> dx;
    decoder_[l].backward(dec_tapes[l], &d, nullptr, l > 0 ? &dx : nullptr, d_finals[l]);
    d = std::move(dx);
  }
  BasicArray<T> d_out;
  for (std::size_t l = layers; l-- > 0;) {
    nn::LstmState<T> unused_init;
    BasicArray<T> dx;
    encoder_[l].backward(enc_tapes[l], l + 1 < layers ? &d_out : nullptr, &d_finals[l],
                         l > 0 ? &dx : nullptr, unused_init);
    d_out = std::move(dx);
  }
  return out;
}

template class BasicBaselineAutoencoder<float>;
template class BasicBaselineAutoencoder<double>;

}  // namespace mtad::model
