#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "mtad/numeric/array.hpp"

namespace mtad {

/// Standard matrix product with double accumulation.
template <typename T>
BasicArray<T> matmul(const BasicArray<T>& a, const BasicArray<T>& b);

/// Lower-triangular Cholesky factor L with L L^T equal to the source matrix.
struct SpdFactor {
  ArrayD lower;

  std::size_t dim() const { return lower.rows(); }
  ArrayD reconstruct() const;
  /// log det of L L^T.
  double log_det() const;
};

/// Pivots at or below this fraction of the largest diagonal entry are treated
/// as zero; rounding otherwise leaves tiny positive pivots on singular input.
inline constexpr double kPivotRelativeTolerance = 1e-12;

/// Throws NotPositiveDefinite on a non-positive pivot (caller regularizes).
SpdFactor cholesky(const ArrayD& m);

/// Solves L y = b.
std::vector<double> forward_substitute(const SpdFactor& f, std::span<const double> b);
/// Solves L^T x = y.
std::vector<double> back_substitute(const SpdFactor& f, std::span<const double> y);
/// Solves (L L^T) x = b.
std::vector<double> solve_spd(const SpdFactor& f, std::span<const double> b);

/// Numerically stable softmax of a vector.
template <typename T>
BasicArray<T> softmax(const BasicArray<T>& v);

/// In-place softmax over a contiguous row.
template <typename T>
void softmax_inplace(std::span<T> v);

enum class UnaryOp { Sigmoid, Tanh, Relu };
enum class BinaryOp { Add, Mul, Sub };

template <typename T>
BasicArray<T> elementwise(UnaryOp op, const BasicArray<T>& a);

template <typename T>
BasicArray<T> elementwise(BinaryOp op, const BasicArray<T>& a, const BasicArray<T>& b);

template <typename T>
inline T sigmoid(T x) {
  // Split by sign so neither branch overflows.
  if (x >= T(0)) {
    const T z = std::exp(-x);
    return T(1) / (T(1) + z);
  }
  const T z = std::exp(x);
  return z / (T(1) + z);
}

}  // namespace mtad
