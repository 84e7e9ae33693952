#pragma once

namespace vmdkit {

/// log(1 + e^x), evaluated without overflow for large |x|.
double softplus(double x) noexcept;

/// d/dx softplus(x) = sigmoid(x).
double softplus_derivative(double x) noexcept;

/// Inverse map; requires y > 0.
double softplus_inverse(double y);

double sigmoid(double x) noexcept;

}  // namespace vmdkit
