#include "mtad/numeric/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "mtad/error.hpp"
#include "mtad/numeric/kernels.hpp"

namespace mtad {

template <typename T>
BasicArray<T> matmul(const BasicArray<T>& a, const BasicArray<T>& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.rows()) {
    throw ShapeError("matmul: cannot multiply " + shape_to_string(a.shape()) + " by " +
                     shape_to_string(b.shape()));
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  // Accumulate row-wise in double so the inner loop stays contiguous in b.
  BasicArray<T> out({m, n});
  std::vector<double> acc(n);
  for (std::size_t i = 0; i < m; ++i) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t p = 0; p < k; ++p) {
      const double s = static_cast<double>(a(i, p));
      const T* brow = b.data() + p * n;
#pragma omp simd
      for (std::size_t j = 0; j < n; ++j) acc[j] += s * static_cast<double>(brow[j]);
    }
    for (std::size_t j = 0; j < n; ++j) out(i, j) = static_cast<T>(acc[j]);
  }
  ensure_finite(out, "matmul");
  return out;
}

template BasicArray<float> matmul(const BasicArray<float>&, const BasicArray<float>&);
template BasicArray<double> matmul(const BasicArray<double>&, const BasicArray<double>&);

ArrayD SpdFactor::reconstruct() const {
  const std::size_t d = dim();
  ArrayD m({d, d});
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = kernels::dot(lower.data() + i * d, lower.data() + j * d, j + 1);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

double SpdFactor::log_det() const {
  double s = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) s += std::log(lower(i, i));
  return 2.0 * s;
}

SpdFactor cholesky(const ArrayD& m) {
  if (m.rank() != 2 || m.rows() != m.cols()) {
    throw ShapeError("cholesky: expected a square matrix, got " + shape_to_string(m.shape()));
  }
  const std::size_t d = m.rows();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < d; ++i) max_diag = std::max(max_diag, std::abs(m(i, i)));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double tol = 1e-9 * std::max({1.0, std::abs(m(i, j)), max_diag});
      if (std::abs(m(i, j) - m(j, i)) > tol) throw NumericError("cholesky: matrix is not symmetric");
    }
  }
  const double floor = kPivotRelativeTolerance * max_diag;
  ArrayD l({d, d}, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    const double* lj = l.data() + j * d;
    const double pivot = m(j, j) - kernels::dot(lj, lj, j);
    if (!(pivot > floor)) throw NotPositiveDefinite(j, pivot);
    const double ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < d; ++i) {
      const double* li = l.data() + i * d;
      l(i, j) = (m(i, j) - kernels::dot(li, lj, j)) / ljj;
    }
  }
  return SpdFactor{std::move(l)};
}

std::vector<double> forward_substitute(const SpdFactor& f, std::span<const double> b) {
  const std::size_t d = f.dim();
  if (b.size() != d) throw ShapeError("forward_substitute: dimension mismatch");
  std::vector<double> y(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double* li = f.lower.data() + i * d;
    y[i] = (b[i] - kernels::dot(li, y.data(), i)) / li[i];
  }
  return y;
}

std::vector<double> back_substitute(const SpdFactor& f, std::span<const double> y) {
  const std::size_t d = f.dim();
  if (y.size() != d) throw ShapeError("back_substitute: dimension mismatch");
  std::vector<double> x(d);
  for (std::size_t ii = d; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < d; ++k) s -= f.lower(k, ii) * x[k];
    x[ii] = s / f.lower(ii, ii);
  }
  return x;
}

std::vector<double> solve_spd(const SpdFactor& f, std::span<const double> b) {
  return back_substitute(f, forward_substitute(f, b));
}

template <typename T>
void softmax_inplace(std::span<T> v) {
  if (v.empty()) return;
  const T mx = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (auto& x : v) {
    x = std::exp(x - mx);
    sum += static_cast<double>(x);
  }
  for (auto& x : v) x = static_cast<T>(static_cast<double>(x) / sum);
}

template <typename T>
BasicArray<T> softmax(const BasicArray<T>& v) {
  if (v.rank() != 1) throw ShapeError("softmax expects a vector");
  BasicArray<T> out = v;
  softmax_inplace(out.values());
  return out;
}

template void softmax_inplace(std::span<float>);
template void softmax_inplace(std::span<double>);
template BasicArray<float> softmax(const BasicArray<float>&);
template BasicArray<double> softmax(const BasicArray<double>&);

template <typename T>
BasicArray<T> elementwise(UnaryOp op, const BasicArray<T>& a) {
  BasicArray<T> out = a;
  for (auto& x : out.values()) {
    switch (op) {
      case UnaryOp::Sigmoid: x = sigmoid(x); break;
      case UnaryOp::Tanh: x = std::tanh(x); break;
      case UnaryOp::Relu: x = x > T(0) ? x : T(0); break;
    }
  }
  ensure_finite(out, "elementwise");
  return out;
}

template <typename T>
BasicArray<T> elementwise(BinaryOp op, const BasicArray<T>& a, const BasicArray<T>& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError("elementwise: shapes " + shape_to_string(a.shape()) + " and " +
                     shape_to_string(b.shape()) + " differ");
  }
  BasicArray<T> out = a;
  for (std::size_t i = 0; i < out.size(); ++i) {
    switch (op) {
      case BinaryOp::Add: out[i] = a[i] + b[i]; break;
      case BinaryOp::Mul: out[i] = a[i] * b[i]; break;
      case BinaryOp::Sub: out[i] = a[i] - b[i]; break;
    }
  }
  ensure_finite(out, "elementwise");
  return out;
}

template BasicArray<float> elementwise(UnaryOp, const BasicArray<float>&);
template BasicArray<double> elementwise(UnaryOp, const BasicArray<double>&);
template BasicArray<float> elementwise(BinaryOp, const BasicArray<float>&, const BasicArray<float>&);
template BasicArray<double> elementwise(BinaryOp, const BasicArray<double>&, const BasicArray<double>&);

}  // namespace mtad
