#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "cli/commands.hpp"
#include "cli/settings.hpp"
#include "cli/workflow.hpp"

namespace vmdkit::cli {
namespace {

constexpr int kSchema = 1;

struct Cell {
  std::string case_id;
  std::string variant;
  std::size_t modes = 13;
  std::size_t depth = 1;
  bool shared_alpha = false;
  std::size_t decompose_length = 0;
};

struct Row {
  Cell cell;
  std::uint64_t seed = 0;
  double val_loss = 0.0, val_relative = 0.0;
  std::size_t best_epoch = 0;
  bool forecast = false;
  double val_mae = 0.0, test_mae = 0.0, test_rmse = 0.0, test_mape = 0.0;
};

std::string fraction_label(double f) {
  if (f == 1.0) return "full";
  const double inv = 1.0 / f;
  if (std::abs(inv - std::round(inv)) < 1e-9) return "1/" + std::to_string(static_cast<long>(std::round(inv)));
  std::ostringstream s;
  s << f;
  return s.str();
}

std::string num(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

}  // namespace

void cmd_ablate(const RunContext& ctx) {
  const auto root = ctx.root();
  root.allow_only({"data", "input", "columns", "edges", "cases", "seeds", "context", "fit_frac", "uvmd", "case1",
                   "case2", "case3", "forecast", "seed"});
  const auto cases = root.get<std::vector<std::string>>("cases", {"I", "II", "III"});
  const auto seeds = root.get<std::size_t>("seeds", 1);
  const auto context = root.get<std::size_t>("context", 256);
  const double fit_frac = root.get("fit_frac", 0.6);
  if (seeds == 0) throw InvalidConfig("seeds: must be >= 1");
  if (!(fit_frac > 0.0 && fit_frac <= 1.0)) throw InvalidConfig("fit_frac: must be in (0, 1]");
  const auto base_train = parse_uvmd_train(root.child("uvmd"), 0, ctx.threads);

  const auto fc = root.child("forecast");
  fc.allow_only({"enabled", "features", "model", "train"});
  const bool forecast = fc.get("enabled", true);
  auto features = parse_features(fc.child("features"), ctx.threads);
  features.mode = pipeline::FeatureMode::Causal;
  features.context = context;
  features.fit_frac = fit_frac;
  if (!fc.child("features").has("stride")) features.stride = 4;
  const auto shape = parse_shape(fc.child("model"));
  auto ftrain = parse_forecast_train(fc.child("train"), 0, ctx.threads);
  if (!fc.child("train").has("max_epochs")) ftrain.max_epochs = 10;

  std::vector<Cell> cells;
  for (const auto& c : cases) {
    if (c == "I") {
      const auto n = root.child("case1");
      n.allow_only({"modes", "depth"});
      const auto K = n.get<std::size_t>("modes", 13), D = n.get<std::size_t>("depth", 1);
      cells.push_back({"I", "alpha_k", K, D, false, context});
      cells.push_back({"I", "shared_alpha", K, D, true, context});
    } else if (c == "II") {
      const auto n = root.child("case2");
      n.allow_only({"fractions", "modes", "depth"});
      const auto K = n.get<std::size_t>("modes", 13), D = n.get<std::size_t>("depth", 1);
      for (double f : n.get<std::vector<double>>("fractions", {1.0, 0.5, 0.25, 0.125})) {
        if (!(f > 0.0 && f <= 1.0)) throw InvalidConfig("case2.fractions: every fraction must be in (0, 1]");
        std::size_t L = static_cast<std::size_t>(std::floor(f * static_cast<double>(context)));
        L -= L % 2;
        if (L < features.window) {
          throw InvalidConfig("case2.fractions: " + fraction_label(f) + " of context " + std::to_string(context) +
                              " is shorter than the forecast window");
        }
        cells.push_back({"II", fraction_label(f), K, D, false, L});
      }
    } else if (c == "III") {
      const auto n = root.child("case3");
      n.allow_only({"modes", "depths"});
      for (auto K : n.get<std::vector<std::size_t>>("modes", {3, 6, 9, 13, 15})) {
        for (auto D : n.get<std::vector<std::size_t>>("depths", {1, 2})) {
          cells.push_back({"III", "K=" + std::to_string(K) + ",depth=" + std::to_string(D), K, D, false, context});
        }
      }
    } else {
      throw InvalidConfig("cases: unknown case \"" + c + "\" (expected I, II or III)");
    }
  }
  for (const auto& c : cells) {
    auto t = base_train;
    t.modes = c.modes;
    t.depth = c.depth;
    t.validate();
  }

  const bool from_file = root.has("input");
  std::optional<synthetic::GraphDatasetSpec> spec;
  if (!from_file) spec = parse_graph_spec(root.child("data"), ctx.seed());
  std::vector<RealVec> file_series;
  std::optional<graph::Graph> file_graph;
  if (from_file) {
    file_series = values_of(load_input_series(ctx, root));
    file_graph = load_input_graph(ctx, root, file_series.size());
  }
  ctx.claim({"ablation.csv", "ablation_summary.json"});

  std::vector<Row> rows;
  for (std::size_t s = 0; s < seeds; ++s) {
    const std::uint64_t seed = ctx.seed() + s;
    std::vector<RealVec> series = file_series;
    graph::Graph g;
    if (from_file) {
      g = *file_graph;
    } else {
      auto sp = *spec;
      sp.seed = seed;
      const auto ds = synthetic::make_graph_dataset(sp);
      series = values_of(ds.series);
      g = graph_from_edges(sp.nodes, ds.edges);
    }
    const auto z = zscore_on_prefix(series, fit_frac);

    for (const auto& c : cells) {
      ctx.note("ablate case " + c.case_id + " " + c.variant + " seed " + std::to_string(seed));
      auto t = base_train;
      t.modes = c.modes;
      t.depth = c.depth;
      t.shared_alpha = c.shared_alpha;
      t.seed = seed;
      const auto trained = unfolded::train(training_chunks(z.values, c.decompose_length, fit_frac), t);

      Row row{c, seed, trained.report.best_val_loss(), trained.report.best_val_relative(), trained.report.best_epoch};
      if (forecast) {
        auto f = features;
        f.decompose_length = c.decompose_length;
        auto ft = ftrain;
        ft.seed = seed;
        const auto dec = make_decomposer(trained.params);
        const auto run = run_forecast(series, g, f, &dec, shape, ft);
        row.forecast = true;
        row.val_mae = run.validation.average.mae;
        const auto& avg = run.trained.report.test_windows ? run.test.average : run.validation.average;
        row.test_mae = avg.mae;
        row.test_rmse = avg.rmse;
        row.test_mape = avg.mape;
      }
      rows.push_back(std::move(row));
    }
  }

  std::ofstream csv(ctx.output("ablation.csv"));
  if (!csv) throw DataError("cannot write '" + ctx.output("ablation.csv").string() + "'");
  csv << "case,variant,modes,depth,shared_alpha,decompose_length,seed,uvmd_val_loss,uvmd_val_relative,"
         "uvmd_best_epoch,forecast_val_mae,test_mae,test_rmse,test_mape\n";
  for (const auto& r : rows) {
    csv << r.cell.case_id << ",\"" << r.cell.variant << "\"," << r.cell.modes << ',' << r.cell.depth << ','
        << (r.cell.shared_alpha ? "true" : "false") << ',' << r.cell.decompose_length << ',' << r.seed << ','
        << num(r.val_loss) << ',' << num(r.val_relative) << ',' << r.best_epoch << ',';
    if (r.forecast) {
      csv << num(r.val_mae) << ',' << num(r.test_mae) << ',' << num(r.test_rmse) << ',' << num(r.test_mape);
    } else {
      csv << ",,,";
    }
    csv << '\n';
  }

  // Seed-averaged view of every cell.
  json summary = json::array();
  for (const auto& c : cells) {
    double loss = 0.0, rel = 0.0, vmae = 0.0, mae = 0.0, rmse = 0.0;
    for (const auto& r : rows) {
      if (r.cell.case_id != c.case_id || r.cell.variant != c.variant) continue;
      const double w = 1.0 / static_cast<double>(seeds);
      loss += w * r.val_loss;
      rel += w * r.val_relative;
      vmae += w * r.val_mae;
      mae += w * r.test_mae;
      rmse += w * r.test_rmse;
    }
    json e{{"case", c.case_id},
           {"variant", c.variant},
           {"modes", c.modes},
           {"depth", c.depth},
           {"decompose_length", c.decompose_length},
           {"uvmd_val_loss", loss},
           {"uvmd_val_relative", rel}};
    if (forecast) e["forecast"] = {{"val_mae", vmae}, {"test_mae", mae}, {"test_rmse", rmse}};
    summary.push_back(std::move(e));
  }
  write_json(ctx.output("ablation_summary.json"),
             {{"schema", kSchema}, {"kind", "vmdkit.ablation"}, {"seeds", seeds}, {"cells", std::move(summary)}});
}

}  // namespace vmdkit::cli
