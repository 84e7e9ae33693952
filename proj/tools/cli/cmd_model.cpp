// train-uvmd, train-forecast and eval.
#include <algorithm>

#include "cli/commands.hpp"
#include "cli/settings.hpp"
#include "cli/workflow.hpp"
#include "vmdkit/dataset.hpp"
#include "vmdkit/parallel.hpp"

namespace vmdkit::cli {
namespace {

constexpr int kSchema = 1;

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

struct UvmdInputs {
  std::vector<signal::TimeSeries> signals;
  std::vector<unfolded::NamedNormalization> norms;
};

UvmdInputs uvmd_inputs(const RunContext& ctx, const ConfigNode& root) {
  UvmdInputs in;
  if (root.has("synthetic")) {
    if (root.has("input")) throw InvalidConfig("input: give either input or synthetic, not both");
    const auto syn = root.child("synthetic");
    syn.allow_only({"count", "length", "tones_per_signal", "noise_std", "tone_pool"});
    in.signals = synthetic::mixed_signals(syn.get<std::size_t>("count", 50), syn.get<std::size_t>("length", 4096),
                                          syn.get("tone_pool", synthetic::GraphDatasetSpec{}.tone_pool),
                                          syn.get<std::size_t>("tones_per_signal", 3),
                                          syn.get("noise_std", 0.1), ctx.seed());
    return in;
  }
  const auto series = load_input_series(ctx, root);
  const bool normalize = root.get("normalize", false);
  const double fit_frac = root.get("fit_frac", 0.6);
  if (!(fit_frac > 0.0 && fit_frac <= 1.0)) throw InvalidConfig("fit_frac: must be in (0, 1]");
  const auto segment = root.get<std::size_t>("segment_length", 0);

  std::vector<RealVec> values = values_of(series);
  if (normalize) {
    auto z = zscore_on_prefix(values, fit_frac);
    values = std::move(z.values);
    for (std::size_t i = 0; i < series.size(); ++i) in.norms.push_back({series[i].id, z.norms[i]});
  }
  if (segment > 0) {
    in.signals = training_chunks(values, segment, fit_frac);
  } else {
    for (std::size_t i = 0; i < series.size(); ++i) in.signals.push_back(signal::make_series(series[i].id, values[i]));
  }
  return in;
}

json train_history(const unfolded::TrainReport& r) {
  json h = json::array();
  for (std::size_t e = 0; e < r.train_loss.size(); ++e) {
    h.push_back({{"epoch", e + 1},
                 {"train_loss", r.train_loss[e]},
                 {"val_loss", r.val_loss[e]},
                 {"val_relative", r.val_relative[e]}});
  }
  return h;
}

json forecast_history(const graph::ForecastTrainReport& r) {
  json h = json::array();
  for (std::size_t e = 0; e < r.train_mae.size(); ++e) {
    json row{{"epoch", e + 1}, {"train_mae", r.train_mae[e]}};
    if (e < r.val_mae.size()) row["val_mae"] = r.val_mae[e];
    h.push_back(std::move(row));
  }
  return h;
}

struct ForecastSetup {
  std::vector<signal::TimeSeries> series;
  graph::Graph graph;
  pipeline::FeatureConfig features;
  graph::ForecasterShape shape;
  graph::ForecastTrainConfig train;
  std::optional<unfolded::Params> uvmd;
};

ForecastSetup forecast_setup(const RunContext& ctx, bool allow_model) {
  const auto root = ctx.root();
  if (allow_model) {
    root.allow_only({"input", "columns", "edges", "uvmd_params", "features", "model", "train", "seed", "forecaster"});
  } else {
    root.allow_only({"input", "columns", "edges", "uvmd_params", "features", "model", "train", "seed"});
  }
  ForecastSetup s;
  s.features = parse_features(root.child("features"), ctx.threads);
  s.shape = parse_shape(root.child("model"));
  s.train = parse_forecast_train(root.child("train"), ctx.seed(), ctx.threads);
  if (s.features.mode != pipeline::FeatureMode::Raw) {
    if (!root.has("uvmd_params")) {
      throw InvalidConfig("uvmd_params: decomposed features need a trained parameter file; run `vmdkit train-uvmd` "
                          "first");
    }
    const auto path = ctx.resolve(root.require<std::string>("uvmd_params"));
    if (!std::filesystem::exists(path)) {
      throw DataError("parameter file '" + path.string() + "' does not exist; run `vmdkit train-uvmd` first");
    }
    s.uvmd = unfolded::load_params(path);
  }
  s.series = load_input_series(ctx, root);
  s.graph = load_input_graph(ctx, root, s.series.size());
  if (s.uvmd) check_decomposer_fit(*s.uvmd, s.features, s.series.front().size());
  return s;
}

json features_json(const pipeline::FeatureConfig& f) {
  return {{"mode", to_string(f.mode)},  {"window", f.window},           {"horizon", f.horizon},
          {"context", f.context},       {"decompose_length", f.causal_length()},
          {"stride", f.stride},         {"time_of_day", f.time_of_day}, {"fit_frac", f.fit_frac}};
}

}  // namespace

void cmd_train_uvmd(const RunContext& ctx) {
  const auto root = ctx.root();
  root.allow_only({"input", "columns", "synthetic", "normalize", "fit_frac", "segment_length", "train", "seed"});
  const auto cfg = parse_uvmd_train(root.child("train"), ctx.seed(), ctx.threads);
  auto in = uvmd_inputs(ctx, root);
  ctx.claim({"uvmd_params.json", "train_report.json"});

  auto result = unfolded::train(in.signals, cfg);
  result.params.normalization = in.norms;
  unfolded::save_params(ctx.output("uvmd_params.json"), result.params);

  const auto& r = result.report;
  json report{{"schema", kSchema},
              {"kind", "vmdkit.uvmd_report"},
              {"modes", cfg.modes},
              {"depth", cfg.depth},
              {"shared_alpha", cfg.shared_alpha},
              {"seed", cfg.seed},
              {"signal_length", in.signals.front().size()},
              {"signals",
               {{"train", r.train_signals},
                {"val", r.val_signals},
                {"test", r.test_signals},
                {"validation_reuses_train", r.validation_reuses_train}}},
              {"history", train_history(r)},
              {"best_epoch", r.best_epoch},
              {"stopped_epoch", r.stopped_epoch},
              {"best_val_loss", r.best_val_loss()},
              {"best_val_relative", r.best_val_relative()},
              {"bandwidths", r.bandwidths}};

  if (r.test_signals > 0) {
    const auto ranges = dataset::split(in.signals.size(), cfg.split);
    const RealVec init = vmd::initial_omegas(cfg.modes, vmd::OmegaInit::Uniform);
    std::vector<double> loss(ranges.test_size()), rel(ranges.test_size());
    parallel_for(ranges.test_size(), cfg.threads, [&](std::size_t i) {
      const auto f = signal::analysis(in.signals[ranges.test_begin + i].values);
      const auto trace = unfolded::forward(f, result.params, init);
      loss[i] = unfolded::reconstruction_loss(f, trace.modes);
      rel[i] = unfolded::relative_reconstruction_loss(f, trace.modes);
    });
    double mean = 0.0;
    for (double l : loss) mean += l / static_cast<double>(loss.size());
    report["test"] = {{"mean_loss", mean}, {"median_relative", median(rel)}};
  }
  report["timing"] = {{"wall_clock_ms", r.wall_clock_ms}, {"threads", ctx.resolved_threads()}};
  write_json(ctx.output("train_report.json"), report);
  ctx.note("trained UVMD (K=" + std::to_string(cfg.modes) + ", depth=" + std::to_string(cfg.depth) +
           "): best validation L_rec " + std::to_string(r.best_val_loss()) + " at epoch " +
           std::to_string(r.best_epoch));
}

void cmd_train_forecast(const RunContext& ctx) {
  const auto s = forecast_setup(ctx, false);
  ctx.claim({"forecaster.json", "forecast_metrics.json"});

  std::optional<pipeline::Decomposer> dec;
  if (s.uvmd) dec = make_decomposer(*s.uvmd);
  const auto run = run_forecast(values_of(s.series), s.graph, s.features, dec ? &*dec : nullptr, s.shape, s.train);
  graph::save_forecaster(ctx.output("forecaster.json"), run.trained.params);

  const auto& r = run.trained.report;
  json out{{"schema", kSchema},
           {"kind", "vmdkit.forecast_metrics"},
           {"seed", s.train.seed},
           {"features", features_json(s.features)},
           {"channels", run.channels},
           {"windows", {{"train", r.train_windows}, {"val", r.val_windows}, {"test", r.test_windows}}},
           {"history", forecast_history(r)},
           {"best_epoch", r.best_epoch},
           {"stopped_epoch", r.stopped_epoch},
           {"best_val_mae_normalized", r.best_val_mae()},
           {"validation", to_json(run.validation)}};
  if (r.test_windows > 0) out["test"] = to_json(run.test);
  out["timing"] = {{"wall_clock_ms", r.wall_clock_ms}, {"threads", ctx.resolved_threads()}};
  write_json(ctx.output("forecast_metrics.json"), out);
  ctx.note("trained forecaster on " + std::string(to_string(s.features.mode)) + " features: validation MAE " +
           std::to_string(run.validation.average.mae));
}

void cmd_eval(const RunContext& ctx) {
  const auto s = forecast_setup(ctx, true);
  const auto root = ctx.root();
  const auto model_path = ctx.resolve(root.require<std::string>("forecaster"));
  auto params = graph::load_forecaster(model_path);
  ctx.claim({"eval_metrics.json"});

  std::optional<pipeline::Decomposer> dec;
  if (s.uvmd) dec = make_decomposer(*s.uvmd);
  const auto ws = pipeline::build_windows(values_of(s.series), s.features, dec ? &*dec : nullptr);
  if (params.shape.nodes != s.series.size() || params.shape.channels != ws.channels ||
      params.shape.window != s.features.window || params.shape.horizon != s.features.horizon) {
    throw InvalidInput("forecaster '" + model_path.string() + "' expects " + std::to_string(params.shape.nodes) +
                       " nodes x " + std::to_string(params.shape.channels) + " channels, window " +
                       std::to_string(params.shape.window) + ", horizon " + std::to_string(params.shape.horizon) +
                       "; the data and features give " + std::to_string(s.series.size()) + " x " +
                       std::to_string(ws.channels) + ", " + std::to_string(s.features.window) + ", " +
                       std::to_string(s.features.horizon));
  }
  const auto split = graph::split_windows(ws.windows.size(), s.train);
  if (split.test == 0) throw InvalidInput("no test windows left after the train/validation split");
  const auto report = score_windows(ws, split.train + split.val, ws.windows.size(), s.graph, params, ctx.threads);
  json out{{"schema", kSchema},
           {"kind", "vmdkit.eval_metrics"},
           {"features", features_json(s.features)},
           {"test_windows", split.test},
           {"test", to_json(report)}};
  write_json(ctx.output("eval_metrics.json"), out);
  ctx.note("test MAE " + std::to_string(report.average.mae) + " over " + std::to_string(split.test) + " windows");
}

}  // namespace vmdkit::cli
