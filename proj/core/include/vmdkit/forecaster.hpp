#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "vmdkit/autodiff.hpp"
#include "vmdkit/graph.hpp"

namespace vmdkit::graph {

/// One input window: N nodes x C channels x T_w steps, stored N x (C*T_w)
/// with column c*T_w + t.
struct FeatureTensor {
  std::size_t nodes = 0;
  std::size_t channels = 0;
  std::size_t steps = 0;
  std::size_t start = 0;  // index of the first timestep in the source series
  Matrix data;

  static FeatureTensor zeros(std::size_t nodes, std::size_t channels, std::size_t steps);

  double& at(std::size_t n, std::size_t c, std::size_t t) {
    return data(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(c * steps + t));
  }
  double at(std::size_t n, std::size_t c, std::size_t t) const {
    return data(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(c * steps + t));
  }

  void validate() const;
};

struct AttentionParams {
  Matrix Vs, bs;  // N x N
  Matrix W1;      // T_w x 1
  Matrix W2;      // C x T_w
  Matrix W3;      // C x 1
  Matrix Ve, be;  // T_w x T_w
  Matrix V1;      // N x 1
  Matrix V2;      // N x C
  Matrix V3;      // C x 1

  static AttentionParams zeros(std::size_t nodes, std::size_t channels, std::size_t steps);
  void check_shapes(std::size_t nodes, std::size_t channels, std::size_t steps) const;
};

/// theta[m] is C_in x C_out: the coefficient of T_m for every channel pair.
struct ChebParams {
  std::vector<Matrix> theta;
  std::size_t order() const noexcept { return theta.size(); }
};

struct ForecasterShape {
  std::size_t nodes = 0;
  std::size_t channels = 1;
  std::size_t window = 12;
  std::size_t horizon = 12;
  std::size_t cheb_order = 3;
  std::size_t cheb_filters = 8;
  std::size_t time_filters = 8;

  void validate() const;
};

struct ForecasterParams {
  ForecasterShape shape;
  AttentionParams attention;
  ChebParams cheb;
  Matrix conv_w;  // F' x 3F
  Matrix conv_b;  // F' x 1
  Matrix head_w;  // (F' * T_w) x T'
  Matrix head_b;  // 1 x T'

  /// Glorot-uniform weights from `seed`, zero biases.
  static ForecasterParams initial(const ForecasterShape& shape, std::uint64_t seed);

  void validate() const;
  /// Visits every parameter block in a fixed order.
  void for_each(const std::function<void(const std::string&, Matrix&)>& fn);
  void for_each(const std::function<void(const std::string&, const Matrix&)>& fn) const;
  std::size_t size() const;
};

/// Row-stochastic N x N spatial attention.
Matrix spatial_attention(const FeatureTensor& z, const AttentionParams& p);

struct TemporalAttention {
  Matrix weights;          // T_w x T_w, row-stochastic
  FeatureTensor adjusted;  // z reweighted along time
};
TemporalAttention temporal_attention(const FeatureTensor& z, const AttentionParams& p);

/// relu(sum_m (T_m(L) . S') z_t theta_m) for every timestep; output N x (C_out*T_w).
Matrix cheb_conv(const FeatureTensor& z_adjusted, const Graph& g, const Matrix& spatial, const ChebParams& cheb);

/// N x T' predictions. Pure: identical inputs give bitwise-identical outputs.
Matrix forecaster_forward(const FeatureTensor& window, const Graph& g, const ForecasterParams& params);

struct ForecasterGradients {
  double loss = 0.0;
  ForecasterParams grad;  // same layout as the parameters
};

/// MAE of one window's prediction and its gradient.
ForecasterGradients forecaster_gradients(const FeatureTensor& window, const Matrix& target, const Graph& g,
                                         const ForecasterParams& params);

double forecaster_loss(const FeatureTensor& window, const Matrix& target, const Graph& g,
                       const ForecasterParams& params);

namespace detail {
/// Unchecked MAE (and gradient when `grad` is non-null) given a precomputed
/// Chebyshev basis.
double loss_and_grad(const FeatureTensor& window, const Matrix& target, const std::vector<Matrix>& basis,
                     const ForecasterParams& params, ForecasterParams* grad);
}  // namespace detail

struct ForecastTrainConfig {
  std::size_t max_epochs = 50;
  std::size_t patience = 10;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  double train_frac = 0.6;
  double val_frac = 0.2;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  /// When false every window is used for training and validation is skipped.
  bool use_validation = true;

  void validate() const;
};

struct WindowSplit {
  std::size_t train = 0, val = 0, test = 0;  // consecutive counts in chronological order
};

/// Train gets floor(n * train_frac), validation round(n * val_frac) capped by
/// what is left, test the remainder. Without validation everything trains.
WindowSplit split_windows(std::size_t n, const ForecastTrainConfig& cfg);

struct ForecastTrainReport {
  std::vector<double> train_mae;
  std::vector<double> val_mae;
  std::size_t best_epoch = 0;  // 1-based; 0 until an epoch finishes
  std::size_t stopped_epoch = 0;
  std::size_t train_windows = 0, val_windows = 0, test_windows = 0;
  double wall_clock_ms = 0.0;

  double best_val_mae() const;
};

struct ForecastTrainResult {
  ForecasterParams params;
  ForecastTrainReport report;
};

/// Adam on MAE over chronologically split windows with early stopping on
/// validation MAE; the best-validation parameters are returned.
ForecastTrainResult train_forecaster(const std::vector<FeatureTensor>& windows, const std::vector<Matrix>& targets,
                                     const Graph& g, const ForecasterShape& shape, const ForecastTrainConfig& cfg);

/// Predictions for many windows, evaluated in parallel.
std::vector<Matrix> predict(const std::vector<FeatureTensor>& windows, const Graph& g, const ForecasterParams& params,
                            std::size_t threads = 1);

inline constexpr int kForecasterSchema = 1;

void save_forecaster(const std::filesystem::path& path, const ForecasterParams& params);
ForecasterParams load_forecaster(const std::filesystem::path& path);

}  // namespace vmdkit::graph
