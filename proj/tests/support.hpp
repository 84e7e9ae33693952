#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "vmdkit/types.hpp"

namespace vmdkit::testing {

inline RealVec random_signal(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, scale);
  RealVec x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

inline ComplexVec random_spectrum(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, scale);
  ComplexVec x(n);
  for (auto& v : x) v = {d(rng), d(rng)};
  return x;
}

// |a - b| relative to the larger magnitude, with an absolute floor so that
// components which are zero up to rounding do not dominate.
inline double rel_err(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

// Finite-difference acceptance rule: relative error <= 1e-4, or absolute
// error <= 1e-8 where the analytic value itself is below 1e-8.
inline bool gradient_agrees(double analytic, double numeric) {
  if (std::abs(analytic) < 1e-8) return std::abs(analytic - numeric) <= 1e-8;
  return std::abs(analytic - numeric) <= 1e-4 * std::abs(analytic);
}

// Naive O(n^2) DFT with the same sign convention as the library.
inline ComplexVec naive_dft(const ComplexVec& x) {
  const std::size_t n = x.size();
  ComplexVec out(n);
  for (std::size_t k = 0; k < n; ++k) {
    Complex s{};
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = -2.0 * 3.14159265358979323846 * static_cast<double>((k * t) % n) / static_cast<double>(n);
      s += x[t] * Complex(std::cos(ang), std::sin(ang));
    }
    out[k] = s;
  }
  return out;
}

}  // namespace vmdkit::testing
