#include "mtad/scoring/gaussian.hpp"

#include <cmath>
#include <string>

#include "mtad/data/trace.hpp"
#include "mtad/error.hpp"

namespace mtad::scoring {

std::string_view modality_name(Modality m) noexcept {
  if (m == Modality::Combined) return "combined";
  return data::kChannelNames[static_cast<std::size_t>(m)];
}

std::optional<Modality> modality_from_name(std::string_view name) noexcept {
  for (auto m : kAllModalities) {
    if (modality_name(m) == name) return m;
  }
  return std::nullopt;
}

std::size_t modality_dim(Modality m, std::size_t steps, std::size_t channels) {
  if (m == Modality::Combined) return steps * channels;
  if (static_cast<std::size_t>(m) >= channels) throw ShapeError("modality has no matching channel");
  return steps;
}

std::vector<double> error_vector(const Array& input, const Array& reconstruction, Modality m) {
  if (input.shape() != reconstruction.shape() || input.rank() != 2) {
    throw ShapeError("error_vector: input " + shape_to_string(input.shape()) + " vs reconstruction " +
                     shape_to_string(reconstruction.shape()));
  }
  const std::size_t steps = input.rows();
  const std::size_t channels = input.cols();
  std::vector<double> out;
  out.reserve(modality_dim(m, steps, channels));
  const std::size_t c0 = m == Modality::Combined ? 0 : static_cast<std::size_t>(m);
  const std::size_t c1 = m == Modality::Combined ? channels : c0 + 1;
  for (std::size_t c = c0; c < c1; ++c) {
    for (std::size_t t = 0; t < steps; ++t) {
      out.push_back(static_cast<double>(input(t, c)) - static_cast<double>(reconstruction(t, c)));
    }
  }
  return out;
}

GaussianErrorModel fit_error_model(std::span<const std::vector<double>> errors, std::optional<double> ridge,
                                   Modality modality) {
  const std::size_t n = errors.size();
  if (n < 2) throw DataError("fit_error_model: need at least two error vectors, got " + std::to_string(n));
  const std::size_t dim = errors.front().size();
  if (dim == 0) throw ShapeError("fit_error_model: empty error vectors");

  GaussianErrorModel model;
  model.modality = modality;
  model.mean.assign(dim, 0.0);
  for (const auto& e : errors) {
    if (e.size() != dim) throw ShapeError("fit_error_model: error vectors differ in length");
    for (std::size_t i = 0; i < dim; ++i) model.mean[i] += e[i];
  }
  for (auto& m : model.mean) m /= static_cast<double>(n);

  // Lower triangle only, mirrored afterwards.
  ArrayD cov({dim, dim});
  std::vector<double> d(dim);
  for (const auto& e : errors) {
    for (std::size_t i = 0; i < dim; ++i) d[i] = e[i] - model.mean[i];
    for (std::size_t i = 0; i < dim; ++i) {
      const double di = d[i];
      double* row = cov.data() + i * dim;
      for (std::size_t j = 0; j <= i; ++j) row[j] += di * d[j];
    }
  }
  const double denom = static_cast<double>(n - 1);
  double trace = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      cov(i, j) /= denom;
      cov(j, i) = cov(i, j);
    }
    trace += cov(i, i);
  }
  if (!std::isfinite(trace)) throw NumericError("fit_error_model: non-finite error vectors");

  if (ridge) {
    if (!(*ridge >= 0.0) || !std::isfinite(*ridge)) throw ConfigError("fit_error_model: ridge must be >= 0");
    model.ridge = *ridge;
  } else {
    model.ridge = trace > 0.0 ? kDefaultRidgeScale * trace / static_cast<double>(dim) : kDefaultRidgeScale;
  }
  for (std::size_t i = 0; i < dim; ++i) cov(i, i) += model.ridge;
  model.factor = cholesky(cov);
  return model;
}

double mahalanobis(const GaussianErrorModel& model, std::span<const double> e) {
  const std::size_t dim = model.dim();
  if (e.size() != dim) {
    throw ShapeError("mahalanobis: error vector has " + std::to_string(e.size()) + " entries, model expects " +
                     std::to_string(dim));
  }
  std::vector<double> d(dim);
  for (std::size_t i = 0; i < dim; ++i) d[i] = e[i] - model.mean[i];
  // (e-mu)^T (L L^T)^-1 (e-mu) = |L^-1 (e-mu)|^2
  const auto y = forward_substitute(model.factor, d);
  double q = 0.0;
  for (double v : y) q += v * v;
  return std::sqrt(q);
}

}  // namespace mtad::scoring
