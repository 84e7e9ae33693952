#include <doctest.h>

#include <cmath>
#include <random>

#include "vmdkit/error.hpp"
#include "vmdkit/metrics.hpp"

using namespace vmdkit;
using namespace vmdkit::metrics;

TEST_CASE("perfect prediction") {
  const std::vector<double> t{1, 2, 3};
  const auto m = compute(t, t);
  CHECK(m.mae == 0.0);
  CHECK(m.rmse == 0.0);
  CHECK(m.mape == 0.0);
}

TEST_CASE("unit offset on a constant truth") {
  const std::vector<double> t(10, 2.0), p(10, 3.0);
  const auto m = compute(p, t);
  CHECK(m.mae == doctest::Approx(1.0));
  CHECK(m.rmse == doctest::Approx(1.0));
  CHECK(m.mape == doctest::Approx(50.0));
}

TEST_CASE("near-zero truth is masked from MAPE") {
  const std::vector<double> t{0.0, 5e-4, 2.0}, p{1.0, 1.0, 3.0};
  const auto m = compute(p, t);
  CHECK(m.mape_excluded == 2);
  CHECK(m.mape == doctest::Approx(50.0));
  const auto all_masked = compute(std::vector<double>{1.0}, std::vector<double>{0.0});
  CHECK(std::isnan(all_masked.mape));
}

TEST_CASE("random pair against an independent loop") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> d(0, 3);
  std::vector<double> p(200), t(200);
  for (std::size_t i = 0; i < 200; ++i) {
    p[i] = d(rng);
    t[i] = d(rng);
  }
  double a = 0, s = 0, pc = 0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < 200; ++i) {
    a += std::abs(p[i] - t[i]);
    s += (p[i] - t[i]) * (p[i] - t[i]);
    if (std::abs(t[i]) >= 1e-3) {
      pc += std::abs((p[i] - t[i]) / t[i]);
      ++k;
    }
  }
  const auto m = compute(p, t);
  CHECK(m.mae == doctest::Approx(a / 200).epsilon(1e-12));
  CHECK(m.rmse == doctest::Approx(std::sqrt(s / 200)).epsilon(1e-12));
  CHECK(m.mape == doctest::Approx(100 * pc / k).epsilon(1e-12));
  CHECK_THROWS_AS(compute(std::vector<double>{1.0}, std::vector<double>{}), InvalidInput);
}

TEST_CASE("horizon report selects steps and averages per-step values") {
  std::vector<Eigen::MatrixXd> preds, truths;
  for (int w = 0; w < 3; ++w) {
    Eigen::MatrixXd t = Eigen::MatrixXd::Constant(2, 12, 2.0);
    Eigen::MatrixXd p = t;
    for (int h = 0; h < 12; ++h) p.col(h).array() += h + 1;  // error grows with the horizon
    preds.push_back(p);
    truths.push_back(t);
  }
  const auto r = horizon_report(preds, truths);
  REQUIRE(r.selected.size() == 3);
  CHECK(r.selected[0].horizon == 3);
  CHECK(r.selected[0].metrics.mae == doctest::Approx(3.0));
  CHECK(r.selected[2].metrics.mae == doctest::Approx(12.0));
  CHECK(r.average.mae == doctest::Approx(6.5));
  CHECK(r.average.mape == doctest::Approx(325.0));
}
