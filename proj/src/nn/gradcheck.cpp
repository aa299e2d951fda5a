#include "mtad/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mtad/numeric/rng.hpp"

namespace mtad::nn {

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

template <typename T>
GradCheckReport gradient_check(ParamStore<T>& params, const std::function<double(bool)>& loss,
                               const GradCheckOptions& options) {
  params.zero_grad();
  loss(true);
  std::vector<BasicArray<T>> analytic;
  for (const auto& p : params) analytic.push_back(p.grad);

  SeededRng rng(options.seed);
  GradCheckReport report;
  std::size_t k = 0;
  for (auto& p : params) {
    const auto& grad = analytic[k++];
    std::vector<std::size_t> idx(p.value.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (idx.size() > options.max_entries_per_param) {
      rng.shuffle(idx);
      idx.resize(options.max_entries_per_param);
      std::sort(idx.begin(), idx.end());
    }
    GradCheckReport::Entry entry{p.name, 0.0, 0};
    for (auto i : idx) {
      const T saved = p.value[i];
      p.value[i] = static_cast<T>(static_cast<double>(saved) + options.step);
      const double up = loss(false);
      p.value[i] = static_cast<T>(static_cast<double>(saved) - options.step);
      const double down = loss(false);
      p.value[i] = saved;
      const double numeric = (up - down) / (2.0 * options.step);
      const double err = relative_error(static_cast<double>(grad[i]), numeric);
      entry.max_rel_error = std::max(entry.max_rel_error, err);
      ++entry.checked;
    }
    report.max_rel_error = std::max(report.max_rel_error, entry.max_rel_error);
    report.checked += entry.checked;
    if (entry.max_rel_error >= options.tolerance) report.failing.push_back(p.name);
    report.params.push_back(std::move(entry));
  }
  return report;
}

template GradCheckReport gradient_check(ParamStore<float>&, const std::function<double(bool)>&,
                                        const GradCheckOptions&);
template GradCheckReport gradient_check(ParamStore<double>&, const std::function<double(bool)>&,
                                        const GradCheckOptions&);

}  // namespace mtad::nn
