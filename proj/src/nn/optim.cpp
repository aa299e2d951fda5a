#include "mtad/nn/optim.hpp"

#include <cmath>

#include "mtad/error.hpp"

namespace mtad::nn {

template <typename T>
AdamState<T>::AdamState(const ParamStore<T>& params, AdamConfig cfg) : config(cfg) {
  for (const auto& p : params) {
    m.emplace_back(p.value.shape());
    v.emplace_back(p.value.shape());
  }
}

template <typename T>
void adam_step(AdamState<T>& state, ParamStore<T>& params) {
  if (state.m.size() != params.size()) throw Error("adam_step: state does not match parameters");
  const auto& c = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  std::size_t k = 0;
  for (auto& p : params) {
    auto& m = state.m[k];
    auto& v = state.v[k];
    ++k;
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = static_cast<double>(p.grad[i]);
      const double mi = c.beta1 * static_cast<double>(m[i]) + (1.0 - c.beta1) * g;
      const double vi = c.beta2 * static_cast<double>(v[i]) + (1.0 - c.beta2) * g * g;
      m[i] = static_cast<T>(mi);
      v[i] = static_cast<T>(vi);
      const double update = c.learning_rate * (mi / bc1) / (std::sqrt(vi / bc2) + c.epsilon);
      p.value[i] = static_cast<T>(static_cast<double>(p.value[i]) - update);
    }
  }
}

template <typename T>
double global_grad_norm(const ParamStore<T>& params) {
  double s = 0.0;
  for (const auto& p : params) {
    for (auto g : p.grad.values()) s += static_cast<double>(g) * static_cast<double>(g);
  }
  return std::sqrt(s);
}

template <typename T>
double clip_global_norm(ParamStore<T>& params, double max_norm) {
  const double norm = global_grad_norm(params);
  if (max_norm > 0.0 && norm > max_norm) {
    const T scale = static_cast<T>(max_norm / norm);
    for (auto& p : params) {
      for (auto& g : p.grad.values()) g *= scale;
    }
  }
  return norm;
}

template struct AdamState<float>;
template struct AdamState<double>;
template void adam_step(AdamState<float>&, ParamStore<float>&);
template void adam_step(AdamState<double>&, ParamStore<double>&);
template double clip_global_norm(ParamStore<float>&, double);
template double clip_global_norm(ParamStore<double>&, double);
template double global_grad_norm(const ParamStore<float>&);
template double global_grad_norm(const ParamStore<double>&);

}  // namespace mtad::nn
