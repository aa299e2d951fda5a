#include "mtad/nn/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mtad/error.hpp"

namespace mtad::nn {

namespace {

template <typename T>
void check_same_shape(const BasicArray<T>& a, const BasicArray<T>& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(what) + ": shapes " + shape_to_string(a.shape()) + " and " +
                     shape_to_string(b.shape()) + " differ");
  }
}

template <typename T>
void check_targets(const BasicArray<T>& logits, std::span<const std::size_t> targets,
                   std::span<const double> weights) {
  if (logits.rank() != 2 || logits.rows() != targets.size()) {
    throw ShapeError("weighted_cross_entropy: logits must be [T x V] with one target per step");
  }
  if (weights.size() != logits.cols()) throw ShapeError("weighted_cross_entropy: one weight per class");
  for (auto s : targets) {
    if (s >= logits.cols()) {
      throw Error("weighted_cross_entropy: target " + std::to_string(s) + " outside vocabulary of " +
                  std::to_string(logits.cols()));
    }
  }
}

/// log-sum-exp of one row, computed with max subtraction.
template <typename T>
double log_sum_exp(std::span<const T> row) {
  const double mx = static_cast<double>(*std::max_element(row.begin(), row.end()));
  double s = 0.0;
  for (auto v : row) s += std::exp(static_cast<double>(v) - mx);
  return mx + std::log(s);
}

}  // namespace

template <typename T>
double mse_loss(const BasicArray<T>& pred, const BasicArray<T>& target) {
  check_same_shape(pred, target, "mse_loss");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = static_cast<double>(pred[i]) - static_cast<double>(target[i]);
    s += d * d;
  }
  return s / static_cast<double>(pred.size());
}

template <typename T>
BasicArray<T> mse_loss_grad(const BasicArray<T>& pred, const BasicArray<T>& target, double scale) {
  check_same_shape(pred, target, "mse_loss");
  BasicArray<T> g(pred.shape());
  const double k = 2.0 * scale / static_cast<double>(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    g[i] = static_cast<T>(k * (static_cast<double>(pred[i]) - static_cast<double>(target[i])));
  }
  return g;
}

template <typename T>
double weighted_cross_entropy(const BasicArray<T>& logits, std::span<const std::size_t> targets,
                              std::span<const double> weights) {
  check_targets(logits, targets, weights);
  double s = 0.0;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const auto row = logits.row(t);
    const double nll = log_sum_exp(row) - static_cast<double>(row[targets[t]]);
    s += weights[targets[t]] * nll;
  }
  return s / static_cast<double>(targets.size());
}

template <typename T>
BasicArray<T> weighted_cross_entropy_grad(const BasicArray<T>& logits,
                                          std::span<const std::size_t> targets,
                                          std::span<const double> weights, double scale) {
  check_targets(logits, targets, weights);
  BasicArray<T> g(logits.shape());
  const double inv_t = scale / static_cast<double>(targets.size());
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const auto row = logits.row(t);
    const double lse = log_sum_exp(row);
    const double w = weights[targets[t]] * inv_t;
    auto out = g.row(t);
    for (std::size_t v = 0; v < row.size(); ++v) {
      const double p = std::exp(static_cast<double>(row[v]) - lse);
      out[v] = static_cast<T>(w * (p - (v == targets[t] ? 1.0 : 0.0)));
    }
  }
  return g;
}

std::vector<double> class_weights(std::span<const double> freqs, double k) {
  if (k < 0.0) throw Error("class_weights: exponent k must be non-negative");
  std::vector<double> w(freqs.size());
  for (std::size_t s = 0; s < freqs.size(); ++s) {
    const double f = freqs[s];
    if (!(f > 0.0) || f > 1.0) {
      throw Error("class_weights: frequency of class " + std::to_string(s) + " is " +
                  std::to_string(f) + "; expected a value in (0, 1] (smooth zero counts)");
    }
    w[s] = std::pow(f, -k);
  }
  return w;
}

template <typename T>
double l2_regularization(const ParamStore<T>& params) {
  double s = 0.0;
  for (const auto& p : params) {
    if (!p.decay) continue;
    for (auto v : p.value.values()) s += static_cast<double>(v) * static_cast<double>(v);
  }
  return s;
}

template <typename T>
void l2_regularization_grad(ParamStore<T>& params, double scale) {
  const T k = static_cast<T>(2.0 * scale);
  for (auto& p : params) {
    if (!p.decay) continue;
    for (std::size_t i = 0; i < p.value.size(); ++i) p.grad[i] += k * p.value[i];
  }
}

#define MTAD_INSTANTIATE(T)                                                                        \
  template double mse_loss(const BasicArray<T>&, const BasicArray<T>&);                            \
  template BasicArray<T> mse_loss_grad(const BasicArray<T>&, const BasicArray<T>&, double);        \
  template double weighted_cross_entropy(const BasicArray<T>&, std::span<const std::size_t>,       \
                                         std::span<const double>);                                 \
  template BasicArray<T> weighted_cross_entropy_grad(const BasicArray<T>&,                         \
                                                     std::span<const std::size_t>,                 \
                                                     std::span<const double>, double);             \
  template double l2_regularization(const ParamStore<T>&);                                         \
  template void l2_regularization_grad(ParamStore<T>&, double);

MTAD_INSTANTIATE(float)
MTAD_INSTANTIATE(double)

#undef MTAD_INSTANTIATE

}  // namespace mtad::nn
