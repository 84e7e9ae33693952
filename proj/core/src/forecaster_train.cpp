#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include <json.hpp>

#include "vmdkit/adam.hpp"
#include "vmdkit/error.hpp"
#include "vmdkit/forecaster.hpp"
#include "vmdkit/parallel.hpp"

namespace vmdkit::graph {

using nlohmann::json;

void ForecastTrainConfig::validate() const {
  if (max_epochs == 0) throw InvalidConfig("forecast.max_epochs must be >= 1");
  if (batch_size == 0) throw InvalidConfig("forecast.batch_size must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidConfig("forecast.learning_rate must be a positive finite number");
  }
  if (!(train_frac > 0.0) || !(val_frac >= 0.0) || train_frac + val_frac > 1.0 + 1e-12) {
    throw InvalidConfig("forecast.train_frac/val_frac must be positive and sum to at most 1");
  }
}

WindowSplit split_windows(std::size_t n, const ForecastTrainConfig& cfg) {
  if (!cfg.use_validation) return {n, 0, 0};
  WindowSplit s;
  s.train = std::min(n, static_cast<std::size_t>(std::floor(static_cast<double>(n) * cfg.train_frac)));
  s.val = std::min(static_cast<std::size_t>(std::llround(static_cast<double>(n) * cfg.val_frac)), n - s.train);
  s.test = n - s.train - s.val;
  return s;
}

double ForecastTrainReport::best_val_mae() const {
  if (best_epoch == 0 || best_epoch > val_mae.size()) return std::numeric_limits<double>::quiet_NaN();
  return val_mae[best_epoch - 1];
}

namespace {

std::vector<Matrix*> blocks_of(ForecasterParams& p) {
  std::vector<Matrix*> out;
  p.for_each([&out](const std::string&, Matrix& m) { out.push_back(&m); });
  return out;
}

double mean_loss(const std::vector<FeatureTensor>& windows, const std::vector<Matrix>& targets, std::size_t begin,
                 std::size_t end, const std::vector<Matrix>& basis, const ForecasterParams& params,
                 std::size_t threads) {
  std::vector<double> losses(end - begin);
  parallel_for(losses.size(), threads, [&](std::size_t i) {
    losses[i] = detail::loss_and_grad(windows[begin + i], targets[begin + i], basis, params, nullptr);
  });
  return std::accumulate(losses.begin(), losses.end(), 0.0) / static_cast<double>(losses.size());
}

}  // namespace

ForecastTrainResult train_forecaster(const std::vector<FeatureTensor>& windows, const std::vector<Matrix>& targets,
                                     const Graph& g, const ForecasterShape& shape, const ForecastTrainConfig& cfg) {
  cfg.validate();
  shape.validate();
  if (windows.size() != targets.size()) {
    throw InvalidInput("got " + std::to_string(windows.size()) + " windows but " + std::to_string(targets.size()) +
                       " targets");
  }
  if (windows.empty()) throw InvalidInput("no training windows");
  for (std::size_t i = 0; i < windows.size(); ++i) {
    windows[i].validate();
    if (windows[i].nodes != g.nodes || windows[i].nodes != shape.nodes || windows[i].channels != shape.channels ||
        windows[i].steps != shape.window) {
      throw InvalidInput("window " + std::to_string(i) + " does not match the model shape");
    }
    if (targets[i].rows() != static_cast<Eigen::Index>(shape.nodes) ||
        targets[i].cols() != static_cast<Eigen::Index>(shape.horizon)) {
      throw InvalidInput("target " + std::to_string(i) + " is misaligned: expected " + std::to_string(shape.nodes) +
                         "x" + std::to_string(shape.horizon));
    }
    if (i > 0 && windows[i].start < windows[i - 1].start) {
      throw InvalidInput("windows must be in chronological order");
    }
  }

  const auto started = std::chrono::steady_clock::now();
  const std::size_t n = windows.size();
  const WindowSplit split = split_windows(n, cfg);
  const std::size_t n_train = split.train, n_val = split.val;
  if (n_train == 0 || (cfg.use_validation && n_val == 0)) {
    throw InvalidInput("too few windows (" + std::to_string(n) + ") for a train/validation split");
  }

  ForecastTrainResult result;
  result.params = ForecasterParams::initial(shape, cfg.seed);
  auto& report = result.report;
  report.train_windows = n_train;
  report.val_windows = n_val;
  report.test_windows = split.test;

  const auto basis = chebyshev_basis(g.scaled_laplacian, shape.cheb_order);
  ForecasterParams& params = result.params;
  std::vector<Adam> optimizers;
  params.for_each([&](const std::string&, Matrix& m) {
    optimizers.emplace_back(static_cast<std::size_t>(m.size()), AdamConfig{cfg.learning_rate});
  });

  ForecasterParams best = params;
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(n_train);
  std::iota(order.begin(), order.end(), 0);
  std::vector<ForecasterParams> grads;

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t b = 0; b < n_train; b += cfg.batch_size) {
      const std::size_t size = std::min(cfg.batch_size, n_train - b);
      grads.resize(size);
      std::vector<double> losses(size);
      parallel_for(size, cfg.threads, [&](std::size_t i) {
        const std::size_t w = order[b + i];
        losses[i] = detail::loss_and_grad(windows[w], targets[w], basis, params, &grads[i]);
      });
      // Summed in index order so the result does not depend on thread count.
      const auto param_blocks = blocks_of(params);
      std::vector<std::vector<Matrix*>> per_window;
      for (auto& gr : grads) per_window.push_back(blocks_of(gr));
      for (std::size_t k = 0; k < param_blocks.size(); ++k) {
        Matrix total = *per_window[0][k];
        for (std::size_t i = 1; i < size; ++i) total += *per_window[i][k];
        total /= static_cast<double>(size);
        Matrix& m = *param_blocks[k];
        optimizers[k].step({m.data(), static_cast<std::size_t>(m.size())},
                           {total.data(), static_cast<std::size_t>(total.size())});
      }
      for (double l : losses) epoch_loss += l;
    }
    report.train_mae.push_back(epoch_loss / static_cast<double>(n_train));
    report.stopped_epoch = epoch;

    if (!cfg.use_validation) {
      report.best_epoch = epoch;
      best = params;
      continue;
    }
    const double val = mean_loss(windows, targets, n_train, n_train + n_val, basis, params, cfg.threads);
    if (!std::isfinite(val)) throw TrainingFailure("validation MAE became non-finite at epoch " + std::to_string(epoch));
    report.val_mae.push_back(val);
    if (val < best_val) {
      best_val = val;
      best = params;
      report.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.patience && cfg.patience > 0) {
      break;
    }
  }

  params = std::move(best);
  report.wall_clock_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return result;
}

std::vector<Matrix> predict(const std::vector<FeatureTensor>& windows, const Graph& g, const ForecasterParams& params,
                            std::size_t threads) {
  params.validate();
  std::vector<Matrix> out(windows.size());
  parallel_for(windows.size(), threads,
               [&](std::size_t i) { out[i] = forecaster_forward(windows[i], g, params); });
  return out;
}

void save_forecaster(const std::filesystem::path& path, const ForecasterParams& params) {
  params.validate();
  const auto& s = params.shape;
  json j;
  j["schema"] = kForecasterSchema;
  j["kind"] = "vmdkit.forecaster";
  j["shape"] = {{"nodes", s.nodes},           {"channels", s.channels},
                {"window", s.window},         {"horizon", s.horizon},
                {"cheb_order", s.cheb_order}, {"cheb_filters", s.cheb_filters},
                {"time_filters", s.time_filters}};
  json blocks = json::object();
  params.for_each([&](const std::string& name, const Matrix& m) {
    std::vector<double> data(m.data(), m.data() + m.size());
    blocks[name] = {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
  });
  j["params"] = std::move(blocks);
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << j.dump(1) << '\n';
}

ForecasterParams load_forecaster(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("model file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  try {
    if (j.at("schema").get<int>() != kForecasterSchema) {
      throw DataError("model file '" + path.string() + "' has unsupported schema " + j.at("schema").dump());
    }
    const auto& js = j.at("shape");
    ForecasterShape s;
    s.nodes = js.at("nodes").get<std::size_t>();
    s.channels = js.at("channels").get<std::size_t>();
    s.window = js.at("window").get<std::size_t>();
    s.horizon = js.at("horizon").get<std::size_t>();
    s.cheb_order = js.at("cheb_order").get<std::size_t>();
    s.cheb_filters = js.at("cheb_filters").get<std::size_t>();
    s.time_filters = js.at("time_filters").get<std::size_t>();
    ForecasterParams p = ForecasterParams::initial(s, 0);
    const auto& blocks = j.at("params");
    p.for_each([&](const std::string& name, Matrix& m) {
      const auto& b = blocks.at(name);
      const auto rows = b.at("rows").get<Eigen::Index>(), cols = b.at("cols").get<Eigen::Index>();
      const auto data = b.at("data").get<std::vector<double>>();
      if (rows != m.rows() || cols != m.cols() || static_cast<Eigen::Index>(data.size()) != rows * cols) {
        throw DataError("model file '" + path.string() + "': block '" + name + "' has the wrong shape");
      }
      m = Eigen::Map<const Matrix>(data.data(), rows, cols);
    });
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw DataError("model file '" + path.string() + "' is malformed: " + e.what());
  } catch (const InvalidInput& e) {
    throw DataError("model file '" + path.string() + "' is inconsistent: " + e.what());
  }
}

}  // namespace vmdkit::graph
