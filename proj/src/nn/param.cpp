#include "mtad/nn/param.hpp"

#include <cmath>

#include "mtad/error.hpp"

namespace mtad::nn {

template <typename T>
Param<T>& ParamStore<T>::add(std::string name, Shape shape, bool decay) {
  if (name.empty() || name.find_first_of(" \t\r\n") != std::string::npos) {
    throw Error("parameter name must be non-empty without whitespace: '" + name + "'");
  }
  if (find(name)) throw Error("duplicate parameter name '" + name + "'");
  BasicArray<T> value(shape);
  BasicArray<T> grad(std::move(shape));
  params_.push_back(Param<T>{std::move(name), std::move(value), std::move(grad), decay});
  return params_.back();
}

template <typename T>
Param<T>* ParamStore<T>::find(std::string_view name) noexcept {
  for (auto& p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

template <typename T>
const Param<T>* ParamStore<T>::find(std::string_view name) const noexcept {
  for (const auto& p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

template <typename T>
Param<T>& ParamStore<T>::at(std::string_view name) {
  if (auto* p = find(name)) return *p;
  throw Error("unknown parameter '" + std::string(name) + "'");
}

template <typename T>
const Param<T>& ParamStore<T>::at(std::string_view name) const {
  if (const auto* p = find(name)) return *p;
  throw Error("unknown parameter '" + std::string(name) + "'");
}

template <typename T>
std::size_t ParamStore<T>::scalar_count() const noexcept {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

template <typename T>
void ParamStore<T>::zero_grad() noexcept {
  for (auto& p : params_) p.grad.fill(T(0));
}

template <typename T>
void init_glorot(Param<T>& p, std::size_t fan_in, std::size_t fan_out, SeededRng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (auto& v : p.value.values()) v = static_cast<T>(rng.uniform(-limit, limit));
}

template class ParamStore<float>;
template class ParamStore<double>;
template void init_glorot(Param<float>&, std::size_t, std::size_t, SeededRng&);
template void init_glorot(Param<double>&, std::size_t, std::size_t, SeededRng&);

}  // namespace mtad::nn
