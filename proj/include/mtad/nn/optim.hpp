#pragma once

#include <cstdint>
#include <vector>

#include "mtad/nn/param.hpp"

namespace mtad::nn {

struct AdamConfig {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename T>
struct AdamState {
  AdamConfig config;
  std::uint64_t step = 0;
  std::vector<BasicArray<T>> m;  // one per parameter, in store order
  std::vector<BasicArray<T>> v;

  AdamState() = default;
  AdamState(const ParamStore<T>& params, AdamConfig cfg);
};

/// Bias-corrected Adam update of every parameter from its gradient.
template <typename T>
void adam_step(AdamState<T>& state, ParamStore<T>& params);

/// Rescales all gradients so their global L2 norm is at most max_norm.
/// Returns the norm before clipping. A max_norm <= 0 disables clipping.
template <typename T>
double clip_global_norm(ParamStore<T>& params, double max_norm);

template <typename T>
double global_grad_norm(const ParamStore<T>& params);

}  // namespace mtad::nn
