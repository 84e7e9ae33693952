#pragma once

#include <cstddef>
#include <vector>

#include "cli/context.hpp"
#include "vmdkit/forecaster.hpp"
#include "vmdkit/graph.hpp"
#include "vmdkit/metrics.hpp"
#include "vmdkit/pipeline.hpp"
#include "vmdkit/signal.hpp"
#include "vmdkit/unfolded.hpp"

namespace vmdkit::cli {

/// Reads root.input (wide CSV), optionally restricted to root.columns.
std::vector<signal::TimeSeries> load_input_series(const RunContext& ctx, const ConfigNode& root);

/// Reads root.edges for a graph over `nodes` nodes.
graph::Graph load_input_graph(const RunContext& ctx, const ConfigNode& root, std::size_t nodes);

graph::Graph graph_from_edges(std::size_t nodes, const std::vector<dataset::Edge>& edges);

/// z-scores every series on its first floor(fit_frac * T) samples, the same
/// rule the window builder uses.
struct ZScored {
  std::vector<RealVec> values;
  std::vector<dataset::Normalization> norms;
};
ZScored zscore_on_prefix(const std::vector<RealVec>& series, double fit_frac);

/// Non-overlapping length-`length` chunks from the first floor(fit_frac * T)
/// samples, ordered by time block and then by node, so a chronological
/// signal-list split keeps later blocks out of training.
std::vector<signal::TimeSeries> training_chunks(const std::vector<RealVec>& series, std::size_t length,
                                                double fit_frac);

pipeline::Decomposer make_decomposer(const unfolded::Params& params);

/// Checks that `params` can decompose what `features` will feed it.
void check_decomposer_fit(const unfolded::Params& params, const pipeline::FeatureConfig& features,
                          std::size_t series_length);

struct ForecastRun {
  graph::ForecastTrainResult trained;
  metrics::HorizonReport validation;  // original units
  metrics::HorizonReport test;        // original units; empty when there are no test windows
  std::size_t channels = 0;
};

/// Builds windows, trains the forecaster and scores validation and test windows.
ForecastRun run_forecast(const std::vector<RealVec>& series, const graph::Graph& g,
                         const pipeline::FeatureConfig& features, const pipeline::Decomposer* decomposer,
                         graph::ForecasterShape shape, const graph::ForecastTrainConfig& train);

/// Horizon metrics in original units for windows [begin, end).
metrics::HorizonReport score_windows(const pipeline::WindowSet& ws, std::size_t begin, std::size_t end,
                                     const graph::Graph& g, const graph::ForecasterParams& params,
                                     std::size_t threads);

std::vector<RealVec> values_of(const std::vector<signal::TimeSeries>& series);

}  // namespace vmdkit::cli
