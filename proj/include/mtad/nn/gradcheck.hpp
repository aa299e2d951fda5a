#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mtad/nn/param.hpp"

namespace mtad::nn {

struct GradCheckOptions {
  double step = 1e-3;
  double tolerance = 1e-4;
  /// Entries checked per parameter; larger parameters are subsampled.
  std::size_t max_entries_per_param = 64;
  std::uint64_t seed = 0;
};

struct GradCheckReport {
  struct Entry {
    std::string name;
    double max_rel_error = 0.0;
    std::size_t checked = 0;
  };
  std::vector<Entry> params;
  std::vector<std::string> failing;
  double max_rel_error = 0.0;
  std::size_t checked = 0;

  bool passed() const { return failing.empty(); }
};

/// |a - n| / max(|a|, |n|, 1e-8).
double relative_error(double analytic, double numeric);

/// `loss(with_grad)` evaluates the scalar loss; with_grad = true must also
/// accumulate analytic gradients into zeroed param grads. Every selected
/// entry is compared against a central finite difference.
template <typename T>
GradCheckReport gradient_check(ParamStore<T>& params, const std::function<double(bool)>& loss,
                               const GradCheckOptions& options);

}  // namespace mtad::nn
