#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "support.hpp"
#include "vmdkit/error.hpp"
#include "vmdkit/vmd.hpp"

using namespace vmdkit;
using namespace vmdkit::vmd;

TEST_CASE("uniform centers sit at band midpoints") {
  const auto w = initial_omegas(2, OmegaInit::Uniform);
  CHECK(w[0] == doctest::Approx(0.125));
  CHECK(w[1] == doctest::Approx(0.375));
  for (double v : initial_omegas(4, OmegaInit::Zero)) CHECK(v == 0.0);
}

TEST_CASE("wiener kernel") {
  CHECK(wiener_kernel(2000, 0.1, 0.1) == 1.0);
  CHECK(wiener_kernel(0.5, 1.0, 0.0) == doctest::Approx(0.5));
}

TEST_CASE("explicit mode update matches the in-place Gauss-Seidel kernel") {
  const std::size_t n = 32, K = 3;
  const auto f = testing::random_spectrum(n, 1);
  const auto lambda = testing::random_spectrum(n, 2, 0.1);
  std::vector<ComplexVec> modes;
  for (std::size_t k = 0; k < K; ++k) modes.push_back(testing::random_spectrum(n, 10 + k));
  const auto grid = signal::frequency_grid(n);

  const auto expected = mode_update(f, modes, lambda, 1, 150.0, 0.2, grid);

  ComplexVec sum(n);
  for (const auto& m : modes)
    for (std::size_t j = 0; j < n; ++j) sum[j] += m[j];
  auto mode = modes[1];
  detail::update_mode_in_place(f, sum, mode, lambda, 150.0, 0.2, grid);
  for (std::size_t j = 0; j < n; ++j) {
    CHECK(std::abs(mode[j] - expected[j]) <= 1e-12 * (1.0 + std::abs(expected[j])));
    Complex s = modes[0][j] + mode[j] + modes[2][j];
    CHECK(std::abs(sum[j] - s) <= 1e-12 * (1.0 + std::abs(s)));
  }
}

TEST_CASE("centroid of a single spectral line is its frequency") {
  const auto grid = signal::frequency_grid(16);
  ComplexVec m(16);
  CHECK_FALSE(omega_update(m, grid).has_value());
  m[5] = {0.0, 3.0};
  CHECK(*omega_update(m, grid) == doctest::Approx(grid[5]));
}

TEST_CASE("zero signal decomposes to zero modes") {
  const RealVec x(128, 0.0);
  const auto out = vmd_decompose(x, VmdConfig{});
  REQUIRE(out.size() == 3);
  for (const auto& m : out.modes)
    for (double v : m) CHECK(v == 0.0);
  CHECK(vmd::reconstruction_error(x, out) == 0.0);
}

TEST_CASE("three tones are separated") {
  const std::size_t T = 1024;
  const double freqs[] = {0.03, 0.2, 0.38};
  RealVec x(T);
  for (std::size_t t = 0; t < T; ++t)
    for (double f : freqs) x[t] += std::cos(2 * std::numbers::pi * f * t);
  VmdConfig cfg;
  cfg.tau = 1.0;  // noiseless input: dual ascent drives the residual down
  const auto out = vmd_decompose(x, cfg);
  const double bin = 1.0 / (2.0 * T);
  for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(out.omegas[k] - freqs[k]) <= 2 * bin);
  CHECK(reconstruction_error(x, out) < 1e-2);
  CHECK(std::is_sorted(out.omegas.begin(), out.omegas.end()));
}

TEST_CASE("without dual ascent the residual stays at the Wiener fixed point") {
  const std::size_t T = 1024;
  RealVec x(T);
  for (std::size_t t = 0; t < T; ++t) x[t] = std::cos(2 * std::numbers::pi * 0.1 * t);
  const auto out = vmd_decompose(x, VmdConfig{});
  const double err = reconstruction_error(x, out);
  CHECK(err > 0.0);
  CHECK(err < 0.1);
}

TEST_CASE("a noiseless single tone converges before the iteration cap") {
  const std::size_t T = 512;
  RealVec x(T);
  for (std::size_t t = 0; t < T; ++t) x[t] = std::sin(2 * std::numbers::pi * 0.1 * t);
  VmdConfig cfg;
  cfg.modes = 1;
  const auto out = vmd_decompose(x, cfg);
  CHECK(out.converged);
  CHECK(out.iterations_used < 500);
  CHECK(out.mode_updates == out.iterations_used);
}

TEST_CASE("config validation") {
  VmdConfig cfg;
  cfg.modes = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
  cfg = {};
  cfg.alpha = -1;
  CHECK_THROWS_AS(vmd_decompose(RealVec(16, 1.0), cfg), InvalidConfig);
}
