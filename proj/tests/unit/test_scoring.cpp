#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "mtad/error.hpp"
#include "mtad/numeric/linalg.hpp"
#include "mtad/numeric/rng.hpp"
#include "mtad/scoring/gaussian.hpp"
#include "mtad/scoring/report.hpp"
#include "mtad/scoring/scores.hpp"

using namespace mtad;
using namespace mtad::scoring;

namespace {

// Gauss-Jordan inverse with partial pivoting.
ArrayD invert(const ArrayD& m) {
  const std::size_t n = m.rows();
  ArrayD a = m;
  ArrayD inv({n, n});
  for (std::size_t i = 0; i < n; ++i) inv(i, i) = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t p = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(p, col))) p = r;
    }
    for (std::size_t j = 0; j < n; ++j) {
      std::swap(a(col, j), a(p, j));
      std::swap(inv(col, j), inv(p, j));
    }
    const double d = a(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      a(col, j) /= d;
      inv(col, j) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a(r, col);
      for (std::size_t j = 0; j < n; ++j) {
        a(r, j) -= f * a(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

ArrayD random_spd(std::size_t n, SeededRng& rng) {
  ArrayD a({n, n});
  for (auto& v : a.values()) v = rng.normal();
  ArrayD s({n, n});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += a(i, k) * a(j, k);
      s(i, j) = acc;
    }
    s(i, i) += 0.1 * static_cast<double>(n);
  }
  return s;
}

GaussianErrorModel model_from(std::vector<double> mean, const ArrayD& cov) {
  GaussianErrorModel m;
  m.mean = std::move(mean);
  m.factor = cholesky(cov);
  return m;
}

data::LabelStats stats_with(std::initializer_list<std::pair<Symbol, double>> freqs) {
  data::LabelStats s;
  s.frequency.fill(0.01);
  for (auto [sym, f] : freqs) s.frequency[index(sym)] = f;
  return s;
}

}  // namespace

TEST_CASE("modality names and dimensions") {
  CHECK(modality_name(Modality::Combined) == "combined");
  CHECK(modality_name(Modality::Yaw) == "yaw");
  CHECK(modality_from_name("pedal_pressure") == Modality::PedalPressure);
  CHECK(!modality_from_name("brake"));
  CHECK(modality_dim(Modality::Speed, 25, 6) == 25);
  CHECK(modality_dim(Modality::Combined, 25, 6) == 150);
}

TEST_CASE("error vectors are channel-major") {
  Array x({3, 2});
  Array r({3, 2});
  for (std::size_t t = 0; t < 3; ++t) {
    x(t, 0) = static_cast<float>(t);
    x(t, 1) = static_cast<float>(10 + t);
    r(t, 1) = 1.0f;
  }
  CHECK(error_vector(x, r, Modality::Combined) == std::vector<double>{0, 1, 2, 9, 10, 11});
  CHECK(error_vector(x, r, Modality::SteerSpeed) == std::vector<double>{9, 10, 11});
  CHECK_THROWS_AS(error_vector(x, Array({2, 2}), Modality::Combined), ShapeError);
}

TEST_CASE("mahalanobis simple cases") {
  ArrayD eye({2, 2});
  eye(0, 0) = eye(1, 1) = 1.0;
  const auto m = model_from({1.0, -2.0}, eye);
  const std::vector<double> e = {4.0, 2.0};
  CHECK(mahalanobis(m, e) == 5.0);
  const std::vector<double> mu = {1.0, -2.0};
  CHECK(mahalanobis(m, mu) == 0.0);
  const std::vector<double> wrong = {1.0};
  CHECK_THROWS_AS(mahalanobis(m, wrong), ShapeError);
}

TEST_CASE("mahalanobis matches the explicit-inverse quadratic form") {
  SeededRng rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(50);
    const ArrayD cov = random_spd(n, rng);
    std::vector<double> mean(n), e(n);
    for (auto& v : mean) v = rng.normal();
    for (auto& v : e) v = rng.normal(0.0, 3.0);
    const auto m = model_from(mean, cov);
    const ArrayD inv = invert(cov);
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) q += (e[i] - mean[i]) * inv(i, j) * (e[j] - mean[j]);
    }
    const double oracle = std::sqrt(q);
    worst = std::max(worst, std::abs(mahalanobis(m, e) - oracle) / oracle);
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("mahalanobis is zero only at the mean and grows along rays") {
  SeededRng rng(5);
  const ArrayD cov = random_spd(8, rng);
  std::vector<double> mean(8), dir(8);
  for (auto& v : mean) v = rng.normal();
  for (auto& v : dir) v = rng.normal();
  const auto m = model_from(mean, cov);
  double prev = 0.0;
  for (int k = 1; k <= 50; ++k) {
    std::vector<double> e(8);
    const double s = 1e-3 * k * k;
    for (std::size_t i = 0; i < 8; ++i) e[i] = mean[i] + s * dir[i];
    const double d = mahalanobis(m, e);
    CHECK(d > prev);
    prev = d;
  }
}

TEST_CASE("gaussian fit of identical samples gives the ridge") {
  std::vector<std::vector<double>> xs(10, std::vector<double>{1.0, 2.0, 3.0});
  const auto m = fit_error_model(xs, 0.5);
  CHECK(m.mean == std::vector<double>{1.0, 2.0, 3.0});
  const ArrayD s = m.factor.reconstruct();
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) CHECK(s(i, j) == doctest::Approx(i == j ? 0.5 : 0.0));
  }
  CHECK_THROWS_AS(fit_error_model(xs, 0.0), NotPositiveDefinite);
  CHECK_NOTHROW(fit_error_model(xs));
}

TEST_CASE("gaussian fit recovers known parameters") {
  SeededRng rng(99);
  const std::vector<double> mu = {1.0, -0.5, 2.0, 0.0};
  ArrayD l({4, 4});
  l(0, 0) = 1.0;
  l(1, 0) = 0.5, l(1, 1) = 0.8;
  l(2, 0) = -0.3, l(2, 1) = 0.2, l(2, 2) = 0.6;
  l(3, 0) = 0.1, l(3, 1) = -0.4, l(3, 2) = 0.3, l(3, 3) = 0.9;
  std::vector<std::vector<double>> xs;
  for (int s = 0; s < 10000; ++s) {
    std::array<double, 4> z{};
    for (auto& v : z) v = rng.normal();
    std::vector<double> x(4);
    for (std::size_t i = 0; i < 4; ++i) {
      x[i] = mu[i];
      for (std::size_t k = 0; k <= i; ++k) x[i] += l(i, k) * z[k];
    }
    xs.push_back(std::move(x));
  }
  const auto m = fit_error_model(xs, 0.0);
  const ArrayD s = m.factor.reconstruct();
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::abs(m.mean[i] - mu[i]) < 0.05);
    for (std::size_t j = 0; j < 4; ++j) {
      double truth = 0.0;
      for (std::size_t k = 0; k < 4; ++k) truth += l(i, k) * l(j, k);
      CHECK(std::abs(s(i, j) - truth) < 0.1);
    }
  }
}

TEST_CASE("rank-deficient 300-dim fit needs the ridge") {
  SeededRng rng(7);
  auto draw = [&](std::size_t n, std::size_t rank) {
    std::vector<std::vector<double>> basis(rank, std::vector<double>(300));
    for (auto& b : basis) {
      for (auto& v : b) v = rng.normal();
    }
    std::vector<std::vector<double>> xs(n, std::vector<double>(300, 0.0));
    for (auto& x : xs) {
      for (const auto& b : basis) {
        const double c = rng.normal();
        for (std::size_t i = 0; i < 300; ++i) x[i] += c * b[i];
      }
    }
    return xs;
  };
  const auto few = draw(200, 300);  // N < dim
  CHECK_THROWS_AS(fit_error_model(few, 0.0), NotPositiveDefinite);
  const auto fitted = fit_error_model(few);
  CHECK(fitted.dim() == 300);
  CHECK(fitted.ridge > 0.0);

  const auto flat = draw(500, 120);  // N > dim but confined to a subspace
  CHECK_THROWS_AS(fit_error_model(flat, 0.0), NotPositiveDefinite);
  CHECK_NOTHROW(fit_error_model(flat));
}

TEST_CASE("gaussian fit ignores sample order") {
  SeededRng rng(3);
  std::vector<std::vector<double>> xs(60, std::vector<double>(5));
  for (auto& x : xs) {
    for (auto& v : x) v = rng.normal();
  }
  auto shuffled = xs;
  rng.shuffle(shuffled);
  const auto a = fit_error_model(xs);
  const auto b = fit_error_model(shuffled);
  for (std::size_t i = 0; i < 5; ++i) CHECK(a.mean[i] == doctest::Approx(b.mean[i]).epsilon(1e-12));
  const ArrayD sa = a.factor.reconstruct(), sb = b.factor.reconstruct();
  for (std::size_t i = 0; i < sa.size(); ++i) CHECK(sa[i] == doctest::Approx(sb[i]).epsilon(1e-12));
}

TEST_CASE("gaussian fit input errors") {
  std::vector<std::vector<double>> one = {{1.0, 2.0}};
  CHECK_THROWS_AS(fit_error_model(one), DataError);
  std::vector<std::vector<double>> ragged = {{1.0, 2.0}, {1.0}};
  CHECK_THROWS_AS(fit_error_model(ragged), ShapeError);
  std::vector<std::vector<double>> ok = {{1.0}, {2.0}};
  CHECK_THROWS_AS(fit_error_model(ok, -1.0), ConfigError);
}

TEST_CASE("sequence nll") {
  const auto half = stats_with({{Symbol::Background, 0.5}, {Symbol::LeftTurn, 0.5}});
  const std::vector<Symbol> two = {Symbol::Background, Symbol::LeftTurn, Symbol::Eos};
  CHECK(sequence_nll(two, half) == doctest::Approx(1.3863).epsilon(1e-4));

  const auto ref = stats_with({{Symbol::Background, 0.8715}});
  std::vector<Symbol> bg(15, Symbol::Background);
  bg.push_back(Symbol::Eos);
  CHECK(sequence_nll(bg, ref) == doctest::Approx(2.0633).epsilon(1e-4));

  const auto certain = stats_with({{Symbol::Background, 1.0}});
  CHECK(sequence_nll(bg, certain) == 0.0);

  // Additive over concatenation.
  SeededRng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Symbol> a, b;
    for (int i = 0; i < 7; ++i) a.push_back(*symbol_from_index(rng.uniform_index(kVocabSize)));
    for (int i = 0; i < 5; ++i) b.push_back(*symbol_from_index(rng.uniform_index(kVocabSize)));
    std::vector<Symbol> ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    CHECK(sequence_nll(ab, half) == doctest::Approx(sequence_nll(a, half) + sequence_nll(b, half)));
  }
  CHECK_THROWS_AS(sequence_nll(std::vector<Symbol>{}, half), DataError);
}

TEST_CASE("scaled score") {
  CHECK(scaled_score(10.0, 1.3863) == doctest::Approx(7.2133).epsilon(1e-4));
  CHECK(scaled_score(10.0, 0.0) == doctest::Approx(10.0 / 1e-3));
  double prev = INFINITY;
  for (double nll = 0.01; nll < 20.0; nll *= 1.3) {
    const double s = scaled_score(3.0, nll);
    CHECK(s < prev);
    prev = s;
  }
  const auto stats = stats_with({{Symbol::Background, 0.87}, {Symbol::UTurn, 0.002}});
  const std::vector<Symbol> common(15, Symbol::Background);
  const std::vector<Symbol> rare(15, Symbol::UTurn);
  CHECK(scaled_score(5.0, sequence_nll(common, stats)) > scaled_score(5.0, sequence_nll(rare, stats)));
}

TEST_CASE("rank and select") {
  SeededRng rng(12);
  std::vector<RankedItem> items;
  for (std::uint64_t i = 0; i < 23; ++i) items.push_back({i, std::floor(rng.uniform(0.0, 5.0))});  // many ties
  CHECK(rank_and_select(items, 100.0).size() == 23);
  CHECK(selection_size(23, 10.0) == 3);
  CHECK(selection_size(228802, 0.1) == 229);
  CHECK(selection_size(100, 1.0) == 1);
  CHECK(selection_size(1000, 0.1) == 1);

  // Brute force: full sort and take the prefix.
  for (double p : {1.0, 10.0, 33.0, 50.0, 99.9}) {
    auto sorted = items;
    std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) {
      return a.score != b.score ? a.score > b.score : a.id < b.id;
    });
    const auto sel = rank_and_select(items, p);
    REQUIRE(sel.size() == static_cast<std::size_t>(std::ceil(23.0 * p / 100.0)));
    for (std::size_t i = 0; i < sel.size(); ++i) CHECK(sel[i].id == sorted[i].id);
  }

  // Invariant under a positive monotone transform.
  std::vector<RankedItem> big;
  for (std::uint64_t i = 0; i < 500; ++i) big.push_back({i, rng.normal()});
  auto transformed = big;
  for (auto& it : transformed) it.score = std::exp(2.0 * it.score) + 1.0;
  const auto a = rank_and_select(big, 7.0), b = rank_and_select(transformed, 7.0);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].id == b[i].id);

  CHECK_THROWS_AS(rank_and_select({}, 10.0), DataError);
  CHECK_THROWS_AS(rank_and_select(items, 0.0), ConfigError);
  CHECK_THROWS_AS(rank_and_select(items, 101.0), ConfigError);
  CHECK_THROWS_AS(rank_and_select({{1, NAN}}, 10.0), DataError);
}

TEST_CASE("detection report") {
  DetectionRow row{0.001, 229, 61, 765};
  CHECK(row.formatted() == "7.97% (61/765)");

  std::vector<RankedItem> items;
  for (std::uint64_t i = 0; i < 1000; ++i) items.push_back({i, static_cast<double>(i)});
  std::vector<std::uint8_t> none(1000, 0);
  for (const auto& r : detection_report(items, none)) {
    CHECK(r.captured == 0);
    CHECK(r.targets == 0);
    CHECK(r.formatted() == "0.00% (0/0)");
  }

  // The five highest scores are the targets.
  std::vector<std::uint8_t> top(1000, 0);
  for (std::size_t i = 995; i < 1000; ++i) top[i] = 1;
  const auto rows = detection_report(items, top);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0].selected == 1);
  CHECK(rows[0].captured == 1);
  CHECK(rows[1].selected == 10);
  for (std::size_t r = 1; r < rows.size(); ++r) CHECK(rows[r].recall() == 1.0);

  // Random scores capture about the selected share.
  SeededRng rng(44);
  std::vector<RankedItem> noise;
  std::vector<std::uint8_t> targets;
  for (std::uint64_t i = 0; i < 20000; ++i) {
    noise.push_back({i, rng.uniform()});
    targets.push_back(rng.bernoulli(0.1) ? 1 : 0);
  }
  for (const auto& r : detection_report(noise, targets)) {
    const double expected = r.top_fraction;
    const double sd = std::sqrt(expected * (1.0 - expected) / static_cast<double>(r.targets));
    CHECK(std::abs(r.recall() - expected) <= 4.0 * sd + 1e-12);
  }
  CHECK_THROWS_AS(detection_report(items, std::vector<std::uint8_t>(3)), ShapeError);
}

TEST_CASE("report csv layout") {
  std::vector<ScoredWindow> ws(2);
  ws[0] = {7, 2.5, 1.25, 2.0, {}, Symbol::UTurn, 0.2};
  ws[1] = {9, 0.1, 0.0, 100.0, {}, Symbol::Background, 0.0};
  std::ostringstream out;
  write_score_report(out, Modality::Combined, ws);
  CHECK(out.str() ==
        "window_id,modality,raw_score,nll,scaled_score,majority_label,anomaly_fraction\n"
        "7,combined,2.5,1.25,2,u_turn,0.2\n"
        "9,combined,0.1,0,100,background,0\n");

  std::vector<DetectionColumn> cols = {{"ensemble", {{0.001, 1, 1, 4}, {0.01, 2, 2, 4}}},
                                       {"scaled", {{0.001, 1, 0, 4}, {0.01, 2, 1, 4}}}};
  std::ostringstream det;
  write_detection_table(det, cols);
  CHECK(det.str() ==
        "top_fraction,ensemble,scaled\n"
        "0.001,25.00% (1/4),0.00% (0/4)\n"
        "0.01,50.00% (2/4),25.00% (1/4)\n");

  std::vector<LossColumn> losses = {{"autoencoder", {{Modality::Speed, 0.5}, {Modality::Combined, 0.25}}},
                                    {"multitask", {{Modality::Speed, 0.4}, {Modality::Combined, 0.125}}}};
  std::ostringstream lt;
  write_loss_table(lt, losses);
  CHECK(lt.str() == "feature,autoencoder,multitask\nspeed,0.5,0.4\ncombined,0.25,0.125\n");
}
