#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mtad/nn/param.hpp"
#include "mtad/numeric/array.hpp"

namespace mtad::nn {

/// Mean of squared differences over all elements.
template <typename T>
double mse_loss(const BasicArray<T>& pred, const BasicArray<T>& target);

/// scale * dMSE/dpred.
template <typename T>
BasicArray<T> mse_loss_grad(const BasicArray<T>& pred, const BasicArray<T>& target, double scale);

/// (1/T) sum_t weights[s_t] * -log softmax(logits_t)[s_t]. logits is [T x V].
template <typename T>
double weighted_cross_entropy(const BasicArray<T>& logits, std::span<const std::size_t> targets,
                              std::span<const double> weights);

/// scale * dL/dlogits.
template <typename T>
BasicArray<T> weighted_cross_entropy_grad(const BasicArray<T>& logits,
                                          std::span<const std::size_t> targets,
                                          std::span<const double> weights, double scale);

/// w_s = f_s^-k. Frequencies must lie in (0, 1]; smooth zero counts first.
std::vector<double> class_weights(std::span<const double> freqs, double k);

/// Sum of squared weight entries; biases are excluded.
template <typename T>
double l2_regularization(const ParamStore<T>& params);

/// Adds scale * dL2/dw to every weight gradient.
template <typename T>
void l2_regularization_grad(ParamStore<T>& params, double scale);

}  // namespace mtad::nn
