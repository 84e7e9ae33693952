#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace vmdkit::metrics {

/// Truth entries with |truth| below this are left out of MAPE.
inline constexpr double kMapeFloor = 1e-3;

struct Metrics {
  double mae = 0.0;
  double rmse = 0.0;
  double mape = 0.0;  // percent; NaN when every entry was masked
  std::size_t count = 0;
  std::size_t mape_excluded = 0;
};

Metrics compute(std::span<const double> pred, std::span<const double> truth);
Metrics compute(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth);

struct HorizonMetrics {
  std::size_t horizon = 0;  // 1-based step ahead
  Metrics metrics;
};

struct HorizonReport {
  std::vector<HorizonMetrics> per_step;  // every step 1..H
  std::vector<HorizonMetrics> selected;  // the requested reporting horizons that exist
  Metrics average;                       // mean of the per-step values
};

/// `preds` and `truths` hold one N x H matrix per window; column h is h+1 steps ahead.
HorizonReport horizon_report(const std::vector<Eigen::MatrixXd>& preds, const std::vector<Eigen::MatrixXd>& truths,
                             const std::vector<std::size_t>& horizons = {3, 6, 12});

}  // namespace vmdkit::metrics
