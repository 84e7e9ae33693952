#include "vmdkit/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "vmdkit/error.hpp"

namespace vmdkit::metrics {

Metrics compute(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) {
    throw InvalidInput("metrics: " + std::to_string(pred.size()) + " predictions for " +
                       std::to_string(truth.size()) + " truth values");
  }
  if (pred.empty()) throw InvalidInput("metrics: no values");
  Metrics m;
  m.count = pred.size();
  double abs_sum = 0.0, sq_sum = 0.0, pct_sum = 0.0;
  std::size_t pct_count = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = pred[i] - truth[i];
    abs_sum += std::abs(e);
    sq_sum += e * e;
    if (std::abs(truth[i]) < kMapeFloor) {
      ++m.mape_excluded;
    } else {
      pct_sum += std::abs(e / truth[i]);
      ++pct_count;
    }
  }
  const auto n = static_cast<double>(m.count);
  m.mae = abs_sum / n;
  m.rmse = std::sqrt(sq_sum / n);
  m.mape = pct_count ? 100.0 * pct_sum / static_cast<double>(pct_count) : std::numeric_limits<double>::quiet_NaN();
  return m;
}

Metrics compute(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth) {
  if (pred.rows() != truth.rows() || pred.cols() != truth.cols()) throw InvalidInput("metrics: shape mismatch");
  return compute(std::span<const double>(pred.data(), static_cast<std::size_t>(pred.size())),
                 std::span<const double>(truth.data(), static_cast<std::size_t>(truth.size())));
}

HorizonReport horizon_report(const std::vector<Eigen::MatrixXd>& preds, const std::vector<Eigen::MatrixXd>& truths,
                             const std::vector<std::size_t>& horizons) {
  if (preds.size() != truths.size()) throw InvalidInput("metrics: prediction and truth window counts differ");
  if (preds.empty()) throw InvalidInput("metrics: no windows");
  const Eigen::Index rows = preds.front().rows(), steps = preds.front().cols();
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i].rows() != rows || preds[i].cols() != steps || truths[i].rows() != rows ||
        truths[i].cols() != steps) {
      throw InvalidInput("metrics: window " + std::to_string(i) + " has a different shape");
    }
  }

  HorizonReport report;
  std::vector<double> p, t;
  for (Eigen::Index h = 0; h < steps; ++h) {
    p.clear();
    t.clear();
    for (std::size_t i = 0; i < preds.size(); ++i) {
      for (Eigen::Index r = 0; r < rows; ++r) {
        p.push_back(preds[i](r, h));
        t.push_back(truths[i](r, h));
      }
    }
    report.per_step.push_back({static_cast<std::size_t>(h + 1), compute(p, t)});
  }

  double mape_sum = 0.0;
  std::size_t mape_steps = 0;
  for (const auto& s : report.per_step) {
    report.average.mae += s.metrics.mae;
    report.average.rmse += s.metrics.rmse;
    report.average.count += s.metrics.count;
    report.average.mape_excluded += s.metrics.mape_excluded;
    if (!std::isnan(s.metrics.mape)) {
      mape_sum += s.metrics.mape;
      ++mape_steps;
    }
  }
  const auto n = static_cast<double>(report.per_step.size());
  report.average.mae /= n;
  report.average.rmse /= n;
  report.average.mape = mape_steps ? mape_sum / static_cast<double>(mape_steps)
                                   : std::numeric_limits<double>::quiet_NaN();

  for (std::size_t h : horizons) {
    if (h >= 1 && h <= report.per_step.size()) report.selected.push_back(report.per_step[h - 1]);
  }
  return report;
}

}  // namespace vmdkit::metrics
