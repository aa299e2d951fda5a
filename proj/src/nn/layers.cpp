#include "mtad/nn/layers.hpp"

#include <cmath>
#include <vector>

#include "mtad/error.hpp"
#include "mtad/numeric/kernels.hpp"

namespace mtad::nn {

// ---------------------------------------------------------------------------
// Dense

template <typename T>
Dense<T>::Dense(ParamStore<T>& store, const std::string& name, std::size_t in, std::size_t out,
                SeededRng& rng)
    : in_(in), out_(out) {
  weight = &store.add(name + ".W", {out, in}, true);
  bias = &store.add(name + ".b", {out}, false);
  init_glorot(*weight, in, out, rng);
}

template <typename T>
void Dense<T>::forward_row(const T* x, T* y) const {
  kernels::gemv(weight->value.data(), out_, in_, x, bias->value.data(), y);
}

template <typename T>
BasicArray<T> Dense<T>::forward(const BasicArray<T>& x) const {
  if (x.rank() != 2 || x.cols() != in_) {
    throw ShapeError("dense: expected [steps x " + std::to_string(in_) + "], got " +
                     shape_to_string(x.shape()));
  }
  BasicArray<T> y({x.rows(), out_});
  for (std::size_t r = 0; r < x.rows(); ++r) forward_row(x.row(r).data(), y.row(r).data());
  return y;
}

template <typename T>
void Dense<T>::backward_row(const T* x, const T* dy, double* dx) {
  kernels::ger_acc(weight->grad.data(), out_, in_, dy, x);
  T* db = bias->grad.data();
  for (std::size_t o = 0; o < out_; ++o) db[o] += dy[o];
  if (dx) kernels::gemv_t_acc(weight->value.data(), out_, in_, dy, dx);
}

template <typename T>
BasicArray<T> Dense<T>::backward(const BasicArray<T>& x, const BasicArray<T>& dy) {
  if (dy.rank() != 2 || dy.rows() != x.rows() || dy.cols() != out_) {
    throw ShapeError("dense backward: gradient shape mismatch");
  }
  BasicArray<T> dx(x.shape());
  std::vector<double> acc(in_);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    std::fill(acc.begin(), acc.end(), 0.0);
    backward_row(x.row(r).data(), dy.row(r).data(), acc.data());
    auto out = dx.row(r);
    for (std::size_t i = 0; i < in_; ++i) out[i] = static_cast<T>(acc[i]);
  }
  return dx;
}

// ---------------------------------------------------------------------------
// Convolutions

std::size_t Conv1dGeometry::output_length(std::size_t steps) const {
  if (kernel_width == 0 || stride == 0) throw ShapeError("conv1d: width and stride must be positive");
  if (steps < kernel_width) {
    throw SequenceTooShort("conv1d: sequence of " + std::to_string(steps) +
                           " steps is shorter than kernel width " + std::to_string(kernel_width));
  }
  return (steps - kernel_width) / stride + 1;
}

std::size_t Conv1dGeometry::transpose_length(std::size_t steps) const {
  return (steps - 1) * stride + kernel_width;
}

namespace {

template <typename T>
Conv1dGeometry geometry_of(const BasicArray<T>& kernel, std::size_t stride) {
  if (kernel.rank() != 3) throw ShapeError("conv kernel must be [out x width x in]");
  return Conv1dGeometry{kernel.extent(2), kernel.extent(0), kernel.extent(1), stride};
}

template <typename T>
BasicArray<T> conv1d_backward(const BasicArray<T>& kernel, std::size_t stride,
                              const BasicArray<T>& seq, const BasicArray<T>& dy,
                              BasicArray<T>& dkernel, std::span<T> dbias) {
  const auto g = geometry_of(kernel, stride);
  const std::size_t out_len = g.output_length(seq.rows());
  if (dy.rank() != 2 || dy.rows() != out_len || dy.cols() != g.out_channels) {
    throw ShapeError("conv1d backward: gradient shape mismatch");
  }
  const std::size_t span_len = g.kernel_width * g.in_channels;
  std::vector<double> dx(seq.size(), 0.0);
  for (std::size_t t = 0; t < out_len; ++t) {
    const std::size_t offset = t * g.stride * g.in_channels;
    const T* dyt = dy.row(t).data();
    kernels::ger_acc(dkernel.data(), g.out_channels, span_len, dyt, seq.data() + offset);
    kernels::gemv_t_acc(kernel.data(), g.out_channels, span_len, dyt, dx.data() + offset);
    for (std::size_t o = 0; o < g.out_channels; ++o) dbias[o] += dyt[o];
  }
  return BasicArray<T>(seq.shape(), std::vector<T>(dx.begin(), dx.end()));
}

template <typename T>
BasicArray<T> conv1d_transpose_backward(const BasicArray<T>& kernel, std::size_t stride,
                                        const BasicArray<T>& seq, const BasicArray<T>& dy,
                                        BasicArray<T>& dkernel, std::span<T> dbias) {
  const auto g = geometry_of(kernel, stride);
  const std::size_t span_len = g.kernel_width * g.in_channels;
  if (dy.rank() != 2 || dy.cols() != g.in_channels || dy.rows() < g.transpose_length(seq.rows())) {
    throw ShapeError("conv1d_transpose backward: gradient shape mismatch");
  }
  BasicArray<T> dseq(seq.shape());
  for (std::size_t t = 0; t < seq.rows(); ++t) {
    const T* window = dy.data() + t * g.stride * g.in_channels;
    kernels::gemv(kernel.data(), g.out_channels, span_len, window, static_cast<const T*>(nullptr),
                  dseq.row(t).data());
    kernels::ger_acc(dkernel.data(), g.out_channels, span_len, seq.row(t).data(), window);
  }
  for (std::size_t r = 0; r < dy.rows(); ++r) {
    const auto row = dy.row(r);
    for (std::size_t c = 0; c < g.in_channels; ++c) dbias[c] += row[c];
  }
  return dseq;
}

}  // namespace

template <typename T>
BasicArray<T> conv1d(const BasicArray<T>& kernel, std::span<const T> bias, std::size_t stride,
                     const BasicArray<T>& seq) {
  const auto g = geometry_of(kernel, stride);
  if (seq.rank() != 2 || seq.cols() != g.in_channels) {
    throw ShapeError("conv1d: expected [steps x " + std::to_string(g.in_channels) + "], got " +
                     shape_to_string(seq.shape()));
  }
  if (bias.size() != g.out_channels) throw ShapeError("conv1d: bias length mismatch");
  const std::size_t out_len = g.output_length(seq.rows());
  const std::size_t span_len = g.kernel_width * g.in_channels;
  BasicArray<T> y({out_len, g.out_channels});
  for (std::size_t t = 0; t < out_len; ++t) {
    // Rows t*stride .. t*stride+width-1 are contiguous, so each output is one dot product.
    kernels::gemv(kernel.data(), g.out_channels, span_len,
                  seq.data() + t * g.stride * g.in_channels, bias.data(), y.row(t).data());
  }
  return y;
}

template <typename T>
BasicArray<T> conv1d_transpose(const BasicArray<T>& kernel, std::span<const T> bias,
                               std::size_t stride, const BasicArray<T>& seq, std::size_t out_len) {
  const auto g = geometry_of(kernel, stride);
  if (seq.rank() != 2 || seq.cols() != g.out_channels) {
    throw ShapeError("conv1d_transpose: expected [steps x " + std::to_string(g.out_channels) +
                     "], got " + shape_to_string(seq.shape()));
  }
  if (bias.size() != g.in_channels) throw ShapeError("conv1d_transpose: bias length mismatch");
  const std::size_t natural = g.transpose_length(seq.rows());
  if (out_len == 0) out_len = natural;
  if (out_len < natural || out_len >= natural + g.stride) {
    throw ShapeError("conv1d_transpose: output length " + std::to_string(out_len) +
                     " inconsistent with " + std::to_string(seq.rows()) + " input steps");
  }
  const std::size_t span_len = g.kernel_width * g.in_channels;
  std::vector<double> acc(out_len * g.in_channels, 0.0);
  for (std::size_t t = 0; t < seq.rows(); ++t) {
    kernels::gemv_t_acc(kernel.data(), g.out_channels, span_len, seq.row(t).data(),
                        acc.data() + t * g.stride * g.in_channels);
  }
  BasicArray<T> out({out_len, g.in_channels});
  for (std::size_t r = 0; r < out_len; ++r) {
    for (std::size_t c = 0; c < g.in_channels; ++c) {
      out(r, c) = static_cast<T>(acc[r * g.in_channels + c] + static_cast<double>(bias[c]));
    }
  }
  return out;
}

template <typename T>
Conv1d<T>::Conv1d(ParamStore<T>& store, const std::string& name, Conv1dGeometry geometry,
                  SeededRng& rng)
    : geo_(geometry) {
  kernel = &store.add(name + ".kernel", {geo_.out_channels, geo_.kernel_width, geo_.in_channels}, true);
  bias = &store.add(name + ".b", {geo_.out_channels}, false);
  init_glorot(*kernel, geo_.kernel_width * geo_.in_channels, geo_.kernel_width * geo_.out_channels, rng);
}

template <typename T>
BasicArray<T> Conv1d<T>::forward(const BasicArray<T>& seq) const {
  return conv1d(kernel->value, std::span<const T>(bias->value.values()), geo_.stride, seq);
}

template <typename T>
BasicArray<T> Conv1d<T>::backward(const BasicArray<T>& seq, const BasicArray<T>& dy) {
  return conv1d_backward(kernel->value, geo_.stride, seq, dy, kernel->grad, bias->grad.values());
}

template <typename T>
ConvTranspose1d<T>::ConvTranspose1d(ParamStore<T>& store, const std::string& name,
                                    Conv1dGeometry geometry, SeededRng& rng)
    : geo_(geometry) {
  kernel = &store.add(name + ".kernel", {geo_.out_channels, geo_.kernel_width, geo_.in_channels}, true);
  bias = &store.add(name + ".b", {geo_.in_channels}, false);
  init_glorot(*kernel, geo_.kernel_width * geo_.out_channels, geo_.kernel_width * geo_.in_channels, rng);
}

template <typename T>
BasicArray<T> ConvTranspose1d<T>::forward(const BasicArray<T>& seq, std::size_t out_len) const {
  return conv1d_transpose(kernel->value, std::span<const T>(bias->value.values()), geo_.stride, seq,
                          out_len);
}

template <typename T>
BasicArray<T> ConvTranspose1d<T>::backward(const BasicArray<T>& seq, const BasicArray<T>& dy) {
  return conv1d_transpose_backward(kernel->value, geo_.stride, seq, dy, kernel->grad,
                                   bias->grad.values());
}

// ---------------------------------------------------------------------------
// Embedding

template <typename T>
Embedding<T>::Embedding(ParamStore<T>& store, const std::string& name, std::size_t vocab,
                        std::size_t dim, SeededRng& rng)
    : vocab_(vocab), dim_(dim) {
  table = &store.add(name + ".table", {vocab, dim}, true);
  init_glorot(*table, vocab, dim, rng);
}

template <typename T>
const T* Embedding<T>::lookup(std::size_t symbol) const {
  if (symbol >= vocab_) throw Error("embedding: symbol " + std::to_string(symbol) + " out of range");
  return table->value.data() + symbol * dim_;
}

template <typename T>
void Embedding<T>::backward(std::size_t symbol, const T* dy) {
  T* g = table->grad.data() + symbol * dim_;
  for (std::size_t i = 0; i < dim_; ++i) g[i] += dy[i];
}

// ---------------------------------------------------------------------------

template <typename T>
void tanh_inplace(BasicArray<T>& a) {
  for (auto& v : a.values()) v = std::tanh(v);
}

template <typename T>
void tanh_backward_inplace(const BasicArray<T>& y, BasicArray<T>& dy) {
  for (std::size_t i = 0; i < dy.size(); ++i) dy[i] *= T(1) - y[i] * y[i];
}

#define MTAD_INSTANTIATE(T)                                                                     \
  template class Dense<T>;                                                                      \
  template class Conv1d<T>;                                                                     \
  template class ConvTranspose1d<T>;                                                            \
  template class Embedding<T>;                                                                  \
  template BasicArray<T> conv1d(const BasicArray<T>&, std::span<const T>, std::size_t,          \
                                const BasicArray<T>&);                                          \
  template BasicArray<T> conv1d_transpose(const BasicArray<T>&, std::span<const T>, std::size_t, \
                                          const BasicArray<T>&, std::size_t);                   \
  template void tanh_inplace(BasicArray<T>&);                                                   \
  template void tanh_backward_inplace(const BasicArray<T>&, BasicArray<T>&);

MTAD_INSTANTIATE(float)
MTAD_INSTANTIATE(double)

#undef MTAD_INSTANTIATE

}  // namespace mtad::nn
