#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace mtad {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_to_string(const Shape& shape);

/// Dense row-major n-d array. Extents are positive; storage is contiguous.
template <typename T>
class BasicArray {
 public:
  using value_type = T;

  BasicArray() = default;
  explicit BasicArray(Shape shape, T fill = T(0));
  BasicArray(Shape shape, std::vector<T> data);

  static BasicArray vector(std::vector<T> values);
  static BasicArray matrix(std::initializer_list<std::initializer_list<T>> rows);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t extent(std::size_t axis) const;
  std::size_t rows() const;
  std::size_t cols() const;

  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }
  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }
  const std::vector<T>& storage() const noexcept { return data_; }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }
  T& operator()(std::size_t r, std::size_t c) { return data_[r * shape_[1] + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * shape_[1] + c]; }

  std::span<T> row(std::size_t r);
  std::span<const T> row(std::size_t r) const;

  void fill(T value);
  bool all_finite() const noexcept;

  template <typename U>
  BasicArray<U> cast() const {
    return BasicArray<U>(shape_, std::vector<U>(data_.begin(), data_.end()));
  }

  bool operator==(const BasicArray& other) const = default;

 private:
  Shape shape_;
  std::vector<T> data_;
};

using Array = BasicArray<float>;
using ArrayD = BasicArray<double>;

/// Throws NumericError naming `what` when any entry is NaN/Inf.
template <typename T>
void ensure_finite(const BasicArray<T>& a, const char* what);

extern template class BasicArray<float>;
extern template class BasicArray<double>;

}  // namespace mtad
