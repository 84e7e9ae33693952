#include "cli/settings.hpp"

#include <cmath>

namespace vmdkit::cli {

vmd::VmdConfig parse_vmd(const ConfigNode& node) {
  node.allow_only({"modes", "alpha", "tau", "tol", "max_iter", "omega_init"});
  vmd::VmdConfig c;
  c.modes = node.get("modes", c.modes);
  c.alpha = node.get("alpha", c.alpha);
  c.tau = node.get("tau", c.tau);
  c.tol = node.get("tol", c.tol);
  c.max_iter = node.get("max_iter", c.max_iter);
  const auto init = node.get<std::string>("omega_init", "uniform");
  if (init == "uniform") {
    c.omega_init = vmd::OmegaInit::Uniform;
  } else if (init == "zero") {
    c.omega_init = vmd::OmegaInit::Zero;
  } else {
    throw InvalidConfig(node.path_of("omega_init") + ": expected \"uniform\" or \"zero\", got \"" + init + "\"");
  }
  c.validate();
  return c;
}

unfolded::TrainConfig parse_uvmd_train(const ConfigNode& node, std::uint64_t seed, std::size_t threads) {
  node.allow_only({"modes", "depth", "shared_alpha", "alpha_init", "lr_alpha", "lr_multiplier", "max_epochs",
                   "patience", "batch_size", "split"});
  unfolded::TrainConfig c;
  c.modes = node.get("modes", c.modes);
  c.depth = node.get("depth", c.depth);
  c.shared_alpha = node.get("shared_alpha", c.shared_alpha);
  c.alpha_init = node.get("alpha_init", c.alpha_init);
  c.lr_alpha = node.get("lr_alpha", c.lr_alpha);
  c.lr_multiplier = node.get("lr_multiplier", c.lr_multiplier);
  c.max_epochs = node.get("max_epochs", c.max_epochs);
  c.patience = node.get("patience", c.patience);
  c.batch_size = node.get("batch_size", c.batch_size);
  const auto split = node.child("split");
  split.allow_only({"train", "val", "test"});
  c.split.train_frac = split.get("train", c.split.train_frac);
  c.split.val_frac = split.get("val", c.split.val_frac);
  c.split.test_frac = split.get("test", c.split.test_frac);
  c.seed = seed;
  c.threads = threads;
  c.validate();
  return c;
}

pipeline::FeatureMode parse_feature_mode(const std::string& name, const std::string& path) {
  if (name == "raw") return pipeline::FeatureMode::Raw;
  if (name == "causal") return pipeline::FeatureMode::Causal;
  if (name == "full") return pipeline::FeatureMode::Full;
  throw InvalidConfig(path + ": expected \"raw\", \"causal\" or \"full\", got \"" + name + "\"");
}

const char* to_string(pipeline::FeatureMode mode) {
  switch (mode) {
    case pipeline::FeatureMode::Raw: return "raw";
    case pipeline::FeatureMode::Causal: return "causal";
    case pipeline::FeatureMode::Full: return "full";
  }
  return "?";
}

pipeline::FeatureConfig parse_features(const ConfigNode& node, std::size_t threads) {
  node.allow_only({"mode", "window", "horizon", "context", "decompose_length", "stride", "time_of_day", "period",
                   "fit_frac"});
  pipeline::FeatureConfig c;
  c.mode = parse_feature_mode(node.get<std::string>("mode", "raw"), node.path_of("mode"));
  c.window = node.get("window", c.window);
  c.horizon = node.get("horizon", c.horizon);
  c.context = node.get("context", c.context);
  c.decompose_length = node.get("decompose_length", c.decompose_length);
  c.stride = node.get("stride", c.stride);
  c.time_of_day = node.get("time_of_day", c.time_of_day);
  c.period = node.get("period", c.period);
  c.fit_frac = node.get("fit_frac", c.fit_frac);
  c.threads = threads;
  c.validate();
  return c;
}

graph::ForecasterShape parse_shape(const ConfigNode& node) {
  node.allow_only({"cheb_order", "cheb_filters", "time_filters"});
  graph::ForecasterShape s;
  s.cheb_order = node.get("cheb_order", s.cheb_order);
  s.cheb_filters = node.get("cheb_filters", s.cheb_filters);
  s.time_filters = node.get("time_filters", s.time_filters);
  return s;
}

graph::ForecastTrainConfig parse_forecast_train(const ConfigNode& node, std::uint64_t seed, std::size_t threads) {
  node.allow_only({"max_epochs", "patience", "batch_size", "learning_rate", "train_frac", "val_frac"});
  graph::ForecastTrainConfig c;
  c.max_epochs = node.get("max_epochs", c.max_epochs);
  c.patience = node.get("patience", c.patience);
  c.batch_size = node.get("batch_size", c.batch_size);
  c.learning_rate = node.get("learning_rate", c.learning_rate);
  c.train_frac = node.get("train_frac", c.train_frac);
  c.val_frac = node.get("val_frac", c.val_frac);
  c.seed = seed;
  c.threads = threads;
  c.validate();
  return c;
}

synthetic::GraphDatasetSpec parse_graph_spec(const ConfigNode& node, std::uint64_t seed) {
  node.allow_only({"nodes", "length", "density", "tone_pool", "tones_per_node", "noise_std", "broadband_std",
                   "broadband_rho", "seed"});
  synthetic::GraphDatasetSpec s;
  s.nodes = node.get("nodes", s.nodes);
  s.length = node.get("length", s.length);
  s.density = node.get("density", s.density);
  s.tone_pool = node.get("tone_pool", s.tone_pool);
  s.tones_per_node = node.get("tones_per_node", s.tones_per_node);
  s.noise_std = node.get("noise_std", s.noise_std);
  s.broadband_std = node.get("broadband_std", s.broadband_std);
  s.broadband_rho = node.get("broadband_rho", s.broadband_rho);
  s.seed = seed;
  s.validate();
  return s;
}

json to_json(const metrics::Metrics& m) {
  json j{{"mae", m.mae}, {"rmse", m.rmse}, {"count", m.count}, {"mape_excluded", m.mape_excluded}};
  // NaN would serialize as null anyway; keep it explicit.
  j["mape"] = std::isnan(m.mape) ? json(nullptr) : json(m.mape);
  return j;
}

json to_json(const metrics::HorizonReport& r) {
  json j;
  json per_step = json::array();
  for (const auto& h : r.per_step) {
    json e = to_json(h.metrics);
    e["horizon"] = h.horizon;
    per_step.push_back(std::move(e));
  }
  for (const auto& h : r.selected) j["horizon_" + std::to_string(h.horizon)] = to_json(h.metrics);
  j["average"] = to_json(r.average);
  j["per_step"] = std::move(per_step);
  return j;
}

}  // namespace vmdkit::cli
