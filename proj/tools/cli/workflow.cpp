#include "cli/workflow.hpp"

#include <cmath>

#include "vmdkit/dataset.hpp"
#include "vmdkit/error.hpp"

namespace vmdkit::cli {

std::vector<signal::TimeSeries> load_input_series(const RunContext& ctx, const ConfigNode& root) {
  const auto path = ctx.resolve(root.require<std::string>("input"));
  const auto columns = root.get<std::vector<std::string>>("columns", {});
  auto series = dataset::load_csv(path, columns);
  if (series.empty()) throw DataError("'" + path.string() + "' holds no series");
  return series;
}

graph::Graph graph_from_edges(std::size_t nodes, const std::vector<dataset::Edge>& edges) {
  return graph::build_laplacians(graph::adjacency_from_edges(nodes, edges));
}

graph::Graph load_input_graph(const RunContext& ctx, const ConfigNode& root, std::size_t nodes) {
  const auto path = ctx.resolve(root.require<std::string>("edges"));
  return graph_from_edges(nodes, dataset::load_edges(path));
}

std::vector<RealVec> values_of(const std::vector<signal::TimeSeries>& series) {
  std::vector<RealVec> out;
  out.reserve(series.size());
  for (const auto& s : series) out.push_back(s.values);
  return out;
}

ZScored zscore_on_prefix(const std::vector<RealVec>& series, double fit_frac) {
  ZScored out;
  for (const auto& x : series) {
    const auto fit = std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(fit_frac * static_cast<double>(x.size()))));
    out.norms.push_back(dataset::fit_zscore(std::span<const double>(x).first(std::min(fit, x.size()))));
    out.values.push_back(dataset::apply_zscore(x, out.norms.back()));
  }
  return out;
}

std::vector<signal::TimeSeries> training_chunks(const std::vector<RealVec>& series, std::size_t length,
                                                double fit_frac) {
  if (series.empty()) return {};
  const std::size_t limit = static_cast<std::size_t>(std::floor(fit_frac * static_cast<double>(series.front().size())));
  std::vector<signal::TimeSeries> out;
  for (std::size_t b = 0; b + length <= limit; b += length) {
    for (std::size_t n = 0; n < series.size(); ++n) {
      out.push_back(signal::make_series("node" + std::to_string(n) + "@" + std::to_string(b),
                                        RealVec(series[n].begin() + static_cast<std::ptrdiff_t>(b),
                                                series[n].begin() + static_cast<std::ptrdiff_t>(b + length))));
    }
  }
  if (out.empty()) {
    throw InvalidInput("no training chunk of " + std::to_string(length) + " samples fits in the first " +
                       std::to_string(limit) + " samples");
  }
  return out;
}

pipeline::Decomposer make_decomposer(const unfolded::Params& params) {
  return pipeline::Decomposer{params.modes, [&params](std::span<const double> x) {
                                return unfolded::decompose_with(params, x).modes;
                              }};
}

void check_decomposer_fit(const unfolded::Params& params, const pipeline::FeatureConfig& features,
                          std::size_t series_length) {
  const std::size_t need =
      features.mode == pipeline::FeatureMode::Causal ? features.causal_length() : series_length;
  if (params.grid_length != need) {
    throw InvalidConfig("uvmd_params: parameters were trained for " + std::to_string(params.grid_length) +
                        "-sample signals but " + std::string(features.mode == pipeline::FeatureMode::Causal
                                                                  ? "features.decompose_length/context"
                                                                  : "the input series") +
                        " needs " + std::to_string(need));
  }
}

metrics::HorizonReport score_windows(const pipeline::WindowSet& ws, std::size_t begin, std::size_t end,
                                     const graph::Graph& g, const graph::ForecasterParams& params,
                                     std::size_t threads) {
  std::vector<graph::FeatureTensor> windows(ws.windows.begin() + static_cast<std::ptrdiff_t>(begin),
                                            ws.windows.begin() + static_cast<std::ptrdiff_t>(end));
  auto preds = graph::predict(windows, g, params, threads);
  std::vector<Eigen::MatrixXd> truths;
  for (std::size_t i = begin; i < end; ++i) truths.push_back(ws.denormalize(ws.targets[i]));
  for (auto& p : preds) p = ws.denormalize(p);
  return metrics::horizon_report(preds, truths);
}

ForecastRun run_forecast(const std::vector<RealVec>& series, const graph::Graph& g,
                         const pipeline::FeatureConfig& features, const pipeline::Decomposer* decomposer,
                         graph::ForecasterShape shape, const graph::ForecastTrainConfig& train) {
  const auto ws = pipeline::build_windows(series, features, decomposer);
  shape.nodes = series.size();
  shape.channels = ws.channels;
  shape.window = features.window;
  shape.horizon = features.horizon;

  ForecastRun run;
  run.channels = ws.channels;
  run.trained = graph::train_forecaster(ws.windows, ws.targets, g, shape, train);
  const auto split = graph::split_windows(ws.windows.size(), train);
  run.validation = score_windows(ws, split.train, split.train + split.val, g, run.trained.params, train.threads);
  if (split.test > 0) {
    run.test = score_windows(ws, split.train + split.val, ws.windows.size(), g, run.trained.params, train.threads);
  }
  return run;
}

}  // namespace vmdkit::cli
