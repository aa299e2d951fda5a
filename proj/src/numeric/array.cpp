#include "mtad/numeric/array.hpp"

#include <cmath>
#include <sstream>

#include "mtad/error.hpp"

namespace mtad {

std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (auto e : shape) n *= e;
  return n;
}

std::string shape_to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  os << ']';
  return os.str();
}

namespace {

void check_extents(const Shape& shape) {
  if (shape.empty()) throw ShapeError("array shape must have at least one extent");
  for (auto e : shape) {
    if (e == 0) throw ShapeError("array extents must be positive, got " + shape_to_string(shape));
  }
}

}  // namespace

template <typename T>
BasicArray<T>::BasicArray(Shape shape, T fill) : shape_(std::move(shape)) {
  check_extents(shape_);
  data_.assign(shape_size(shape_), fill);
}

template <typename T>
BasicArray<T>::BasicArray(Shape shape, std::vector<T> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  check_extents(shape_);
  if (shape_size(shape_) != data_.size()) {
    throw ShapeError("shape " + shape_to_string(shape_) + " does not match " +
                     std::to_string(data_.size()) + " values");
  }
}

template <typename T>
BasicArray<T> BasicArray<T>::vector(std::vector<T> values) {
  const std::size_t n = values.size();
  return BasicArray({n}, std::move(values));
}

template <typename T>
BasicArray<T> BasicArray<T>::matrix(std::initializer_list<std::initializer_list<T>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.begin()->size() : 0;
  std::vector<T> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("ragged matrix literal");
    data.insert(data.end(), row.begin(), row.end());
  }
  return BasicArray({r, c}, std::move(data));
}

template <typename T>
std::size_t BasicArray<T>::extent(std::size_t axis) const {
  if (axis >= shape_.size()) throw ShapeError("axis out of range");
  return shape_[axis];
}

template <typename T>
std::size_t BasicArray<T>::rows() const {
  if (rank() != 2) throw ShapeError("rows() on array of shape " + shape_to_string(shape_));
  return shape_[0];
}

template <typename T>
std::size_t BasicArray<T>::cols() const {
  if (rank() != 2) throw ShapeError("cols() on array of shape " + shape_to_string(shape_));
  return shape_[1];
}

template <typename T>
std::span<T> BasicArray<T>::row(std::size_t r) {
  const std::size_t c = cols();
  return std::span<T>(data_).subspan(r * c, c);
}

template <typename T>
std::span<const T> BasicArray<T>::row(std::size_t r) const {
  const std::size_t c = cols();
  return std::span<const T>(data_).subspan(r * c, c);
}

template <typename T>
void BasicArray<T>::fill(T value) {
  for (auto& v : data_) v = value;
}

template <typename T>
bool BasicArray<T>::all_finite() const noexcept {
  for (auto v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

template <typename T>
void ensure_finite(const BasicArray<T>& a, const char* what) {
  if (!a.all_finite()) throw NumericError(std::string("non-finite value produced by ") + what);
}

template class BasicArray<float>;
template class BasicArray<double>;
template void ensure_finite(const BasicArray<float>&, const char*);
template void ensure_finite(const BasicArray<double>&, const char*);

}  // namespace mtad
