#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace vmdkit {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected Adam over a flat block of parameters.
class Adam {
 public:
  Adam(std::size_t size, AdamConfig cfg) : cfg_(cfg), m_(size, 0.0), v_(size, 0.0) {}

  void step(std::span<double> params, std::span<const double> grads) {
    ++t_;
    const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grads[i];
      v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grads[i] * grads[i];
      params[i] -= cfg_.learning_rate * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + cfg_.epsilon);
    }
  }

  std::size_t steps() const noexcept { return t_; }

 private:
  AdamConfig cfg_;
  std::vector<double> m_, v_;
  std::size_t t_ = 0;
};

}  // namespace vmdkit
