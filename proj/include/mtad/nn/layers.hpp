#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "mtad/nn/param.hpp"
#include "mtad/numeric/array.hpp"
#include "mtad/numeric/rng.hpp"

namespace mtad::nn {

// Sequences are [steps x features] arrays throughout.

template <typename T>
class Dense {
 public:
  Dense() = default;
  Dense(ParamStore<T>& store, const std::string& name, std::size_t in, std::size_t out,
        SeededRng& rng);

  std::size_t in_features() const { return in_; }
  std::size_t out_features() const { return out_; }

  /// Applies the map to every row.
  BasicArray<T> forward(const BasicArray<T>& x) const;
  void forward_row(const T* x, T* y) const;
  /// Accumulates parameter gradients; returns dL/dx.
  BasicArray<T> backward(const BasicArray<T>& x, const BasicArray<T>& dy);
  /// Row variant; dx (double accumulator) may be null.
  void backward_row(const T* x, const T* dy, double* dx);

  Param<T>* weight = nullptr;  // [out x in]
  Param<T>* bias = nullptr;    // [out]

 private:
  std::size_t in_ = 0, out_ = 0;
};

struct Conv1dGeometry {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel_width = 0;
  std::size_t stride = 1;

  /// floor((steps - width) / stride) + 1; throws SequenceTooShort.
  std::size_t output_length(std::size_t steps) const;
  /// Shortest input length of the paired convolution, (out - 1) * stride + width.
  std::size_t transpose_length(std::size_t steps) const;
};

/// Valid cross-correlation along time. kernel is [out x width x in], bias [out].
template <typename T>
BasicArray<T> conv1d(const BasicArray<T>& kernel, std::span<const T> bias, std::size_t stride,
                     const BasicArray<T>& seq);

/// Adjoint of conv1d in its input: maps [steps' x out] to [out_len x in]. bias
/// has one entry per input channel. out_len = 0 selects the minimal length.
template <typename T>
BasicArray<T> conv1d_transpose(const BasicArray<T>& kernel, std::span<const T> bias,
                               std::size_t stride, const BasicArray<T>& seq,
                               std::size_t out_len = 0);

template <typename T>
class Conv1d {
 public:
  Conv1d() = default;
  Conv1d(ParamStore<T>& store, const std::string& name, Conv1dGeometry geometry, SeededRng& rng);

  const Conv1dGeometry& geometry() const { return geo_; }
  BasicArray<T> forward(const BasicArray<T>& seq) const;
  BasicArray<T> backward(const BasicArray<T>& seq, const BasicArray<T>& dy);

  Param<T>* kernel = nullptr;  // [out x width x in]
  Param<T>* bias = nullptr;    // [out]

 private:
  Conv1dGeometry geo_;
};

/// Transposed convolution with the geometry of the paired forward conv: it maps
/// out_channels back to in_channels.
template <typename T>
class ConvTranspose1d {
 public:
  ConvTranspose1d() = default;
  ConvTranspose1d(ParamStore<T>& store, const std::string& name, Conv1dGeometry geometry,
                  SeededRng& rng);

  const Conv1dGeometry& geometry() const { return geo_; }
  BasicArray<T> forward(const BasicArray<T>& seq, std::size_t out_len) const;
  BasicArray<T> backward(const BasicArray<T>& seq, const BasicArray<T>& dy);

  Param<T>* kernel = nullptr;  // [out x width x in]
  Param<T>* bias = nullptr;    // [in]

 private:
  Conv1dGeometry geo_;
};

template <typename T>
class Embedding {
 public:
  Embedding() = default;
  Embedding(ParamStore<T>& store, const std::string& name, std::size_t vocab, std::size_t dim,
            SeededRng& rng);

  std::size_t dim() const { return dim_; }
  const T* lookup(std::size_t symbol) const;
  void backward(std::size_t symbol, const T* dy);

  Param<T>* table = nullptr;  // [vocab x dim]

 private:
  std::size_t vocab_ = 0, dim_ = 0;
};

/// In-place tanh; the backward pass only needs the activated output.
template <typename T>
void tanh_inplace(BasicArray<T>& a);
/// dy <- dy * (1 - y^2).
template <typename T>
void tanh_backward_inplace(const BasicArray<T>& y, BasicArray<T>& dy);

}  // namespace mtad::nn
