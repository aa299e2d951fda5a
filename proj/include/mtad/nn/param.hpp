#pragma once

#include <cstddef>
#include <deque>
#include <string>
#include <string_view>

#include "mtad/numeric/array.hpp"
#include "mtad/numeric/rng.hpp"

namespace mtad::nn {

template <typename T>
struct Param {
  std::string name;
  BasicArray<T> value;
  BasicArray<T> grad;
  /// Weights count towards the L2 penalty; biases do not.
  bool decay = true;
};

/// Owns every learnable array of one model. Elements never move once added,
/// so layers keep plain pointers into the store.
template <typename T>
class ParamStore {
 public:
  ParamStore() = default;
  ParamStore(const ParamStore&) = delete;
  ParamStore& operator=(const ParamStore&) = delete;

  Param<T>& add(std::string name, Shape shape, bool decay);

  Param<T>* find(std::string_view name) noexcept;
  const Param<T>* find(std::string_view name) const noexcept;
  Param<T>& at(std::string_view name);
  const Param<T>& at(std::string_view name) const;

  std::size_t size() const noexcept { return params_.size(); }
  std::size_t scalar_count() const noexcept;
  void zero_grad() noexcept;

  auto begin() noexcept { return params_.begin(); }
  auto end() noexcept { return params_.end(); }
  auto begin() const noexcept { return params_.begin(); }
  auto end() const noexcept { return params_.end(); }

 private:
  std::deque<Param<T>> params_;
};

/// Uniform in +-sqrt(6 / (fan_in + fan_out)).
template <typename T>
void init_glorot(Param<T>& p, std::size_t fan_in, std::size_t fan_out, SeededRng& rng);

extern template class ParamStore<float>;
extern template class ParamStore<double>;

}  // namespace mtad::nn
