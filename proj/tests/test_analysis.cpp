#include <doctest.h>

#include <algorithm>
#include <random>

#include "wfsim/analysis.hpp"
#include "wfsim/errors.hpp"
#include "wfsim/perf_model.hpp"
#include "wfsim/workload.hpp"

using namespace wfsim;

TEST_CASE("collinear points fit exactly") {
  std::vector<Sample> pts;
  for (int x = 1; x <= 10; ++x) pts.push_back({static_cast<double>(x), 2.0 * x + 5.0});
  auto fit = fit_linear(pts);
  CHECK(fit.alpha == doctest::Approx(2.0));
  CHECK(fit.beta == doctest::Approx(5.0));
  CHECK(fit.r_squared == doctest::Approx(1.0));
  CHECK(fit.residuals.size() == pts.size());
  CHECK(fit.alpha_stderr == doctest::Approx(0.0));
}

TEST_CASE("constant durations give zero slope and R^2 = 0") {
  std::vector<Sample> pts = {{1.0, 4.0}, {2.0, 4.0}, {3.0, 4.0}};
  auto fit = fit_linear(pts);
  CHECK(fit.alpha == doctest::Approx(0.0));
  CHECK(fit.beta == doctest::Approx(4.0));
  CHECK(fit.r_squared == 0.0);
}

TEST_CASE("identical sizes are a degenerate fit") {
  std::vector<Sample> pts = {{2.0, 1.0}, {2.0, 3.0}};
  CHECK_THROWS_AS(fit_linear(pts), DegenerateFitError);
  CHECK_THROWS_AS(fit_linear(std::vector<Sample>{}), DegenerateFitError);
}

TEST_CASE("fit matches a closed-form oracle on a small example") {
  // x = 0,1,2,3; y = 1,3,2,5. Hand computation:
  // xbar = 1.5, ybar = 2.75, Sxy = 5.5, Sxx = 5 -> alpha = 1.1, beta = 1.1.
  std::vector<Sample> pts = {{0, 1}, {1, 3}, {2, 2}, {3, 5}};
  auto fit = fit_linear(pts);
  CHECK(fit.alpha == doctest::Approx(1.1));
  CHECK(fit.beta == doctest::Approx(1.1));
  // SS_tot = 8.75, SS_res = 8.75 - 1.1 * 5.5 = 2.7.
  CHECK(fit.r_squared == doctest::Approx(1.0 - 2.7 / 8.75));
}

TEST_CASE("fit error shrinks with sample count (property)") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> x(50.0, 2770.0);
  std::uniform_real_distribution<double> noise(-5.0, 5.0);
  std::vector<Sample> pts;
  for (int i = 0; i < 10000; ++i) {
    double s = x(rng);
    pts.push_back({s, 1.92e-2 * s + 60.49 + noise(rng)});
  }
  auto fit = fit_linear(pts);
  CHECK(std::abs(fit.alpha - 1.92e-2) / 1.92e-2 < 0.02);
  CHECK(std::abs(fit.beta - 60.49) / 60.49 < 0.02);
}

TEST_CASE("R^2 is invariant under affine rescaling of x (property)") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 3.0);
  std::vector<Sample> pts;
  for (int i = 0; i < 200; ++i) pts.push_back({i * 0.5, 3.0 * i * 0.5 - 2.0 + n(rng)});
  auto base = fit_linear(pts);
  for (auto [a, b] : {std::pair{10.0, 0.0}, std::pair{0.001, 50.0}, std::pair{-2.0, 7.0}}) {
    std::vector<Sample> scaled;
    for (const auto& p : pts) scaled.push_back({a * p.size_mb + b, p.duration_s});
    auto fit = fit_linear(scaled);
    CHECK(fit.r_squared == doctest::Approx(base.r_squared));
    CHECK(fit.alpha == doctest::Approx(base.alpha / a));
    CHECK(fit.beta == doctest::Approx(base.beta - base.alpha * b / a));
  }
}

TEST_CASE("simulated UC1-T1 durations recover the profile") {
  PerfModel m{1.92e-2, 60.49, 0.15};
  auto items = generate_dataset({2000, 1304.85, 512.68, 50.0, 2770.0}, 31);
  Rng rng(77);
  std::vector<Sample> pts;
  for (const auto& i : items) pts.push_back({i.size_mb, sample_duration(m, i.size_mb, rng)});
  auto fit = fit_linear(pts);
  CHECK(std::abs(fit.alpha - 1.92e-2) / 1.92e-2 < 0.10);
  CHECK(std::abs(fit.beta - 60.49) / 60.49 < 0.10);
}

TEST_CASE("box statistics") {
  std::vector<double> v = {7, 1, 3, 5, 9};
  auto b = box_stats(v);
  CHECK(b.median == 5.0);
  CHECK(b.q1 == 3.0);
  CHECK(b.q3 == 7.0);
  CHECK(b.mean == 5.0);
  CHECK(b.std == doctest::Approx(std::sqrt(10.0)));
  CHECK(b.outliers.empty());

  std::vector<double> with_outlier = {1, 2, 3, 4, 100};
  auto o = box_stats(with_outlier);
  REQUIRE(o.outliers.size() == 1);
  CHECK(o.outliers[0] == 100.0);
  CHECK(o.whisker_hi == 4.0);
  CHECK(o.whisker_lo == 1.0);

  CHECK_THROWS_AS(box_stats(std::vector<double>{}), ConfigError);
  std::vector<double> one = {2.5};
  CHECK(box_stats(one).median == 2.5);
}

TEST_CASE("odd-length median is the middle order statistic (property)") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int n = 1; n < 100; n += 2) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = u(rng);
    auto b = box_stats(v);
    std::sort(v.begin(), v.end());
    CHECK(b.median == v[v.size() / 2]);
    CHECK(b.q1 <= b.median);
    CHECK(b.median <= b.q3);
  }
}

TEST_CASE("bin selection") {
  SUBCASE("uniform occupancy keeps every bin") {
    std::vector<Sample> v;
    for (int b = 0; b < 10; ++b)
      for (int k = 0; k < 5; ++k) v.push_back({b * 10.0 + k, 1.0});
    auto bins = bin_items(v, 10.0, 0.0);
    auto r = select_bins(bins);
    CHECK(r.first == 0);
    CHECK(r.last == 9);
  }
  SUBCASE("single occupied bin is kept alone") {
    std::vector<Sample> v = {{35.0, 1.0}, {36.0, 2.0}};
    auto bins = bin_items(v, 10.0, 0.0, 100.0);
    auto r = select_bins(bins);
    CHECK(r.first == 3);
    CHECK(r.last == 3);
  }
  SUBCASE("UC1-shaped sample keeps roughly bins 4 to 18") {
    auto items = generate_dataset({3097, 1304.85, 512.68, 50.0, 2770.0}, 42);
    std::vector<Sample> v;
    for (const auto& i : items) v.push_back({i.size_mb, 1.0});
    auto bins = bin_items(v, 125.0, 50.0, 2800.0);
    REQUIRE(bins.size() == 22);
    auto r = select_bins(bins);
    MESSAGE("kept bins " << r.first << ".." << r.last);
    CHECK(std::abs(r.first - 4) <= 1);
    CHECK(std::abs(r.last - 18) <= 2);
  }
}

TEST_CASE("bin-mean fitting") {
  std::vector<Sample> v;
  for (int b = 0; b < 5; ++b)
    for (int k = 0; k < 4; ++k) {
      double x = b * 10.0 + 2.0 + k;
      v.push_back({x, 3.0 * x + 1.0});
    }
  auto bins = bin_items(v, 10.0, 0.0);
  auto fit = fit_bins(bins, {1, 3}, true);
  CHECK(fit.residuals.size() == 3);
  CHECK(fit.alpha == doctest::Approx(3.0));
  auto raw = fit_bins(bins, {1, 3}, false);
  CHECK(raw.residuals.size() == 12);
  REQUIRE(raw.bins_used);
  CHECK(raw.bins_used->first == 1);

  auto row = fit_row("1", "UC1/T1", raw);
  for (const char* k : {"design", "task", "alpha", "beta", "r_squared"}) CHECK(row.contains(k));
}
