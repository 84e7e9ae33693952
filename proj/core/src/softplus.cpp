#include "vmdkit/softplus.hpp"

#include <cmath>

#include "vmdkit/error.hpp"

namespace vmdkit {

double softplus(double x) noexcept {
  if (x > 30.0) return x + std::log1p(std::exp(-x));
  if (x < -30.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus_derivative(double x) noexcept { return sigmoid(x); }

double softplus_inverse(double y) {
  if (!(y > 0.0)) throw InvalidInput("softplus_inverse requires a positive argument");
  if (y > 30.0) return y + std::log(-std::expm1(-y));
  return std::log(std::expm1(y));
}

}  // namespace vmdkit
