#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cli/config.hpp"
#include "cli/context.hpp"
#include "vmdkit/forecaster.hpp"
#include "vmdkit/metrics.hpp"
#include "vmdkit/pipeline.hpp"
#include "vmdkit/synthetic.hpp"
#include "vmdkit/unfolded.hpp"
#include "vmdkit/vmd.hpp"

// Config-section parsers shared by the subcommands. Each one rejects unknown
// fields and runs the module's own validation so a bad config fails before
// any work starts.
namespace vmdkit::cli {

vmd::VmdConfig parse_vmd(const ConfigNode& node);
unfolded::TrainConfig parse_uvmd_train(const ConfigNode& node, std::uint64_t seed, std::size_t threads);
pipeline::FeatureConfig parse_features(const ConfigNode& node, std::size_t threads);
graph::ForecasterShape parse_shape(const ConfigNode& node);
graph::ForecastTrainConfig parse_forecast_train(const ConfigNode& node, std::uint64_t seed, std::size_t threads);
synthetic::GraphDatasetSpec parse_graph_spec(const ConfigNode& node, std::uint64_t seed);

pipeline::FeatureMode parse_feature_mode(const std::string& name, const std::string& path);
const char* to_string(pipeline::FeatureMode mode);

json to_json(const metrics::Metrics& m);
json to_json(const metrics::HorizonReport& r);

}  // namespace vmdkit::cli
