#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "support.hpp"
#include "vmdkit/error.hpp"
#include "vmdkit/fft.hpp"
#include "vmdkit/signal.hpp"

using namespace vmdkit;
using namespace vmdkit::signal;

TEST_CASE("mirror extension reflects each half") {
  const RealVec x{1, 2, 3, 4};
  const auto m = mirror_extend(x);
  const RealVec expected{2, 1, 1, 2, 3, 4, 4, 3};
  CHECK(RealVec(m.values().begin(), m.values().end()) == expected);
  CHECK(unmirror(m.values()) == x);
}

TEST_CASE("series construction validates input") {
  CHECK_THROWS_AS(make_series("short", {1, 2}), InvalidInput);
  CHECK_THROWS_AS(make_series("nan", {1, 2, NAN, 4}), InvalidInput);
  const auto odd = make_series("odd", {1, 2, 3, 4, 5});
  CHECK(odd.size() == 4);
  CHECK(odd.truncated);
}

TEST_CASE("fft matches a direct DFT") {
  const auto x = testing::random_spectrum(30, 5);
  ComplexVec got(x.size());
  fft::forward(x, got);
  const auto want = testing::naive_dft(x);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(got[i] - want[i]) < 1e-9);

  ComplexVec back(x.size());
  fft::inverse(got, back);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(back[i] - x[i]) < 1e-12);
}

TEST_CASE("spectrum round trip and Parseval") {
  const auto x = testing::random_signal(64, 11);
  const auto m = mirror_extend(x);
  const auto spec = to_spectrum(m);
  CHECK(spec.symmetry_defect() < 1e-12);
  CHECK(spec.frequency(64) == 0.0);
  CHECK(spec.frequency(0) == doctest::Approx(-0.5));

  const double time_energy = energy(m.values());
  const double freq_energy = energy(spec.coeffs()) / 128.0;
  CHECK(freq_energy == doctest::Approx(time_energy).epsilon(1e-12));

  const auto inv = from_spectrum_checked(spec);
  CHECK(inv.imag_residue < 1e-12);
  const auto back = unmirror(inv.values);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-12));
}

TEST_CASE("one-sided grid is j / 2T") {
  const auto grid = frequency_grid(8);
  REQUIRE(grid.size() == 8);
  for (std::size_t j = 0; j < 8; ++j) CHECK(grid[j] == doctest::Approx(j / 16.0));
}

TEST_CASE("analysis and synthesis invert each other away from Nyquist") {
  // A smooth signal has negligible energy in the dropped Nyquist bin.
  RealVec x(256);
  for (std::size_t t = 0; t < x.size(); ++t) x[t] = std::cos(2 * std::numbers::pi * 0.05 * t) + 0.3;
  const auto half = analysis(x);
  CHECK(half.size() == 256);
  const auto y = synthesis(half);
  double err = 0, ref = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    err += (x[i] - y[i]) * (x[i] - y[i]);
    ref += x[i] * x[i];
  }
  CHECK(std::sqrt(err / ref) < 1e-3);
}

TEST_CASE("from_one_sided rebuilds a conjugate-symmetric spectrum") {
  auto half = testing::random_spectrum(16, 3);
  const auto full = from_one_sided(half);
  CHECK(full.symmetry_defect() < 1e-14);
  CHECK(full.coeffs()[0] == Complex{});
  CHECK(full.coeffs()[16].imag() == 0.0);
}

TEST_CASE("synthetic generator is seeded and puts power at its tones") {
  SyntheticSpec spec;
  spec.tones = {{0.0625, 1.0, 0.0}, {0.25, 0.5, 1.0}};
  spec.noise_std = 0.1;
  spec.length = 512;
  spec.seed = 7;
  const auto a = gen_synthetic(spec);
  const auto b = gen_synthetic(spec);
  CHECK(a.values == b.values);

  // Periodogram oracle: the two largest bins are the generating tones.
  ComplexVec c(a.values.begin(), a.values.end());
  auto p = testing::naive_dft(c);
  std::vector<std::pair<double, std::size_t>> power;
  for (std::size_t k = 1; k < 256; ++k) power.push_back({std::norm(p[k]), k});
  std::sort(power.rbegin(), power.rend());
  std::vector<std::size_t> top{power[0].second, power[1].second};
  std::sort(top.begin(), top.end());
  CHECK(top[0] == 32);
  CHECK(top[1] == 128);

  spec.tones[0].frequency = 0.6;
  CHECK_THROWS_AS(gen_synthetic(spec), InvalidConfig);
}
