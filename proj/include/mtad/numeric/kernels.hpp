#pragma once

// Inner loops shared by the layers. Reductions accumulate in double; the
// simd reduction pragma fixes a single association order per build.

#include <cstddef>

namespace mtad::kernels {

template <typename T>
inline double dot(const T* a, const T* b, std::size_t n) {
  double acc = 0.0;
#pragma omp simd reduction(+ : acc)
  for (std::size_t i = 0; i < n; ++i) acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return acc;
}

/// y = W x + bias (bias may be null). W is rows x cols, row-major.
template <typename T>
inline void gemv(const T* w, std::size_t rows, std::size_t cols, const T* x, const T* bias, T* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = dot(w + r * cols, x, cols);
    if (bias) acc += static_cast<double>(bias[r]);
    y[r] = static_cast<T>(acc);
  }
}

/// dx += W^T dy, accumulated in double.
template <typename T>
inline void gemv_t_acc(const T* w, std::size_t rows, std::size_t cols, const T* dy, double* dx) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double g = static_cast<double>(dy[r]);
    if (g == 0.0) continue;
    const T* wr = w + r * cols;
#pragma omp simd
    for (std::size_t c = 0; c < cols; ++c) dx[c] += g * static_cast<double>(wr[c]);
  }
}

/// G += dy x^T.
template <typename T>
inline void ger_acc(T* g, std::size_t rows, std::size_t cols, const T* dy, const T* x) {
  for (std::size_t r = 0; r < rows; ++r) {
    const T s = dy[r];
    if (s == T(0)) continue;
    T* gr = g + r * cols;
#pragma omp simd
    for (std::size_t c = 0; c < cols; ++c) gr[c] += s * x[c];
  }
}

}  // namespace mtad::kernels
