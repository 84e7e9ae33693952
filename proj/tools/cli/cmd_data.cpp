// gen and decompose.
#include <chrono>
#include <fstream>
#include <iomanip>

#include "cli/commands.hpp"
#include "cli/settings.hpp"
#include "cli/workflow.hpp"
#include "vmdkit/dataset.hpp"
#include "vmdkit/parallel.hpp"

namespace vmdkit::cli {
namespace {

constexpr int kSchema = 1;

void write_modes_csv(const std::filesystem::path& path, const vmd::ModeSet& set) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << std::setprecision(17);
  for (std::size_t k = 0; k < set.size(); ++k) out << (k ? "," : "") << "mode_" << k;
  out << '\n';
  const std::size_t T = set.size() ? set.modes[0].size() : 0;
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t k = 0; k < set.size(); ++k) out << (k ? "," : "") << set.modes[k][t];
    out << '\n';
  }
  if (!out) throw DataError("failed while writing '" + path.string() + "'");
}

}  // namespace

void cmd_gen(const RunContext& ctx) {
  const auto root = ctx.root();
  const auto spec = parse_graph_spec(root, ctx.seed());
  ctx.claim({"series.csv", "edges.csv", "meta.json"});

  const auto ds = synthetic::make_graph_dataset(spec);
  dataset::write_csv(ctx.output("series.csv"), ds.series);
  dataset::write_edges(ctx.output("edges.csv"), ds.edges);

  json nodes = json::array();
  for (std::size_t n = 0; n < ds.series.size(); ++n) {
    json tones = json::array();
    for (const auto& t : ds.mixes[n].tones) {
      tones.push_back({{"frequency", t.frequency}, {"amplitude", t.amplitude}, {"phase", t.phase}});
    }
    nodes.push_back({{"id", ds.series[n].id}, {"tones", std::move(tones)}});
  }
  const double pairs = static_cast<double>(spec.nodes * (spec.nodes - 1)) / 2.0;
  json meta{{"schema", kSchema},
            {"kind", "vmdkit.dataset"},
            {"seed", spec.seed},
            {"nodes", spec.nodes},
            {"length", spec.length},
            {"density", spec.density},
            {"undirected_edges", ds.edges.size() / 2},
            {"realized_density", pairs > 0 ? static_cast<double>(ds.edges.size() / 2) / pairs : 0.0},
            {"tone_pool", spec.tone_pool},
            {"tones_per_node", spec.tones_per_node},
            {"noise_std", spec.noise_std},
            {"broadband_std", spec.broadband_std},
            {"broadband_rho", spec.broadband_rho},
            {"node_mixes", std::move(nodes)}};
  write_json(ctx.output("meta.json"), meta);
  ctx.note("wrote " + std::to_string(spec.nodes) + " series of length " + std::to_string(spec.length) + " to " +
           ctx.out_dir.string());
}

void cmd_decompose(const RunContext& ctx) {
  const auto root = ctx.root();
  root.allow_only({"input", "columns", "engine", "params", "vmd", "seed"});
  const auto engine = root.get<std::string>("engine", "iterative");
  if (engine != "iterative" && engine != "unfolded") {
    throw InvalidConfig("engine: expected \"iterative\" or \"unfolded\", got \"" + engine + "\"");
  }
  const auto vcfg = parse_vmd(root.child("vmd"));
  unfolded::Params params;
  if (engine == "unfolded") {
    if (!root.has("params")) {
      throw InvalidConfig("params: the unfolded engine needs a trained parameter file; run `vmdkit train-uvmd` "
                          "first and pass its uvmd_params.json via --params or the config");
    }
    const auto path = ctx.resolve(root.require<std::string>("params"));
    if (!std::filesystem::exists(path)) {
      throw DataError("parameter file '" + path.string() + "' does not exist; run `vmdkit train-uvmd` first");
    }
    params = unfolded::load_params(path);
  }
  const auto series = load_input_series(ctx, root);

  std::vector<std::string> outputs{"diagnostics.json"};
  for (const auto& s : series) outputs.push_back("modes_" + s.id + ".csv");
  ctx.claim(outputs);

  // Parameters trained on z-scored data decompose z-scored input.
  std::vector<RealVec> inputs(series.size());
  std::vector<std::optional<dataset::Normalization>> used(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    inputs[i] = series[i].values;
    for (const auto& nn : params.normalization) {
      if (nn.id == series[i].id) {
        used[i] = nn.norm;
        inputs[i] = dataset::apply_zscore(series[i].values, nn.norm);
      }
    }
  }

  std::vector<vmd::ModeSet> results(series.size());
  std::vector<double> ms(series.size());
  const auto started = std::chrono::steady_clock::now();
  parallel_for(series.size(), ctx.threads, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    results[i] = engine == "iterative" ? vmd::vmd_decompose(inputs[i], vcfg) : unfolded::decompose_with(params, inputs[i]);
    ms[i] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  });
  const double total_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();

  json entries = json::array();
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& r = results[i];
    write_modes_csv(ctx.output("modes_" + series[i].id + ".csv"), r);
    json e{{"id", series[i].id},
           {"length", series[i].size()},
           {"modes", r.size()},
           {"omegas", r.omegas},
           {"iterations", r.iterations_used},
           {"converged", r.converged},
           {"stalls", r.stalls},
           {"mode_updates", r.mode_updates},
           {"reconstruction_error", vmd::reconstruction_error(inputs[i], r)}};
    if (used[i]) e["zscore"] = {{"mean", used[i]->mean}, {"std", used[i]->std}};
    entries.push_back(std::move(e));
  }
  json out{{"schema", kSchema}, {"kind", "vmdkit.decomposition"}, {"engine", engine}, {"series", std::move(entries)}};
  if (engine == "iterative") {
    out["vmd"] = {{"modes", vcfg.modes}, {"alpha", vcfg.alpha}, {"tau", vcfg.tau}, {"tol", vcfg.tol},
                  {"max_iter", vcfg.max_iter}};
  } else {
    out["uvmd"] = {{"modes", params.modes}, {"depth", params.depth}, {"bandwidths", params.bandwidths()}};
  }
  out["timing"] = {{"total_ms", total_ms}, {"per_series_ms", ms}, {"threads", ctx.resolved_threads()}};
  write_json(ctx.output("diagnostics.json"), out);
  ctx.note("decomposed " + std::to_string(series.size()) + " series with the " + engine + " engine");
}

}  // namespace vmdkit::cli
