#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mtad/numeric/array.hpp"
#include "mtad/numeric/linalg.hpp"

namespace mtad::scoring {

/// A single channel (in channel order) or all six concatenated.
enum class Modality : std::uint8_t { SteerAngle, SteerSpeed, Speed, Yaw, PedalAngle, PedalPressure, Combined };

inline constexpr std::size_t kModalityCount = 7;
inline constexpr std::array<Modality, kModalityCount> kAllModalities = {
    Modality::SteerAngle, Modality::SteerSpeed, Modality::Speed,   Modality::Yaw,
    Modality::PedalAngle, Modality::PedalPressure, Modality::Combined};

/// Channel column name, or "combined".
std::string_view modality_name(Modality m) noexcept;
std::optional<Modality> modality_from_name(std::string_view name) noexcept;

/// steps for a channel, steps * channels for the combined modality.
std::size_t modality_dim(Modality m, std::size_t steps, std::size_t channels);

/// input - reconstruction for one modality of a [steps x channels] window.
/// Combined vectors are channel-major: all steps of channel 0, then channel 1...
std::vector<double> error_vector(const Array& input, const Array& reconstruction, Modality m);

/// Relative ridge used when none is given: 1e-4 * trace(S) / dim.
inline constexpr double kDefaultRidgeScale = 1e-4;

struct GaussianErrorModel {
  Modality modality = Modality::Combined;
  std::vector<double> mean;
  SpdFactor factor;  // of sample covariance + ridge * I
  double ridge = 0.0;

  std::size_t dim() const noexcept { return mean.size(); }
};

/// Sample mean and covariance (N - 1 denominator) plus ridge * I, factorized.
/// `ridge` defaults to kDefaultRidgeScale * trace / dim (or kDefaultRidgeScale
/// when the trace is zero); an explicit 0 disables it. Throws DataError for
/// fewer than two samples, ShapeError on mixed lengths and NotPositiveDefinite
/// when the regularized covariance is still singular.
GaussianErrorModel fit_error_model(std::span<const std::vector<double>> errors,
                                   std::optional<double> ridge = std::nullopt,
                                   Modality modality = Modality::Combined);

/// sqrt((e - mu)^T S^-1 (e - mu)), computed as |L^-1 (e - mu)|.
double mahalanobis(const GaussianErrorModel& model, std::span<const double> e);

}  // namespace mtad::scoring
