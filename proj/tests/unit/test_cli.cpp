#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "cli/app.hpp"
#include "vmdkit/dataset.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using vmdkit::cli::run;

namespace {

struct Result {
  int code = 0;
  std::string out, err;
};

Result vmdkit_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Result r;
  r.code = run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() / ("vmdkit_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

json read_json(const std::string& path) { return json::parse(slurp(path)); }

void write_text(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

json without_timing(json j) {
  j.erase("timing");
  return j;
}

}  // namespace

TEST_CASE("gen is byte-identical for the same seed") {
  TempDir dir;
  REQUIRE(vmdkit_run({"--seed", "7", "--out", dir / "a", "gen"}).code == 0);
  REQUIRE(vmdkit_run({"--seed", "7", "--out", dir / "b", "gen"}).code == 0);
  for (const char* f : {"series.csv", "edges.csv", "meta.json"}) {
    CHECK(slurp(dir / (std::string("a/") + f)) == slurp(dir / (std::string("b/") + f)));
  }
  REQUIRE(vmdkit_run({"--seed", "8", "--out", dir / "c", "gen"}).code == 0);
  CHECK(slurp(dir / "a/series.csv") != slurp(dir / "c/series.csv"));
}

TEST_CASE("gen writes the declared shape and recoverable tones") {
  TempDir dir;
  REQUIRE(vmdkit_run({"--seed", "7", "--out", dir / "d", "gen"}).code == 0);
  const auto series = vmdkit::dataset::load_csv(dir / "d/series.csv");
  REQUIRE(series.size() == 8);
  for (const auto& s : series) CHECK(s.size() == 2048);

  const auto edges = vmdkit::dataset::load_edges(dir / "d/edges.csv");
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& e : edges) pairs.insert({std::min(e.src, e.dst), std::max(e.src, e.dst)});
  CHECK(pairs.size() == static_cast<std::size_t>(std::llround(0.3 * 28)));

  // Every listed tone shows up as a periodogram peak well above the median
  // power, evaluated directly at the tone frequency.
  const auto meta = read_json(dir / "d/meta.json");
  CHECK(meta["schema"] == 1);
  for (std::size_t n = 0; n < series.size(); ++n) {
    const auto& x = series[n].values;
    const double T = static_cast<double>(x.size());
    auto power = [&](double f) {
      double re = 0.0, im = 0.0;
      for (std::size_t t = 0; t < x.size(); ++t) {
        re += x[t] * std::cos(2.0 * std::numbers::pi * f * static_cast<double>(t));
        im -= x[t] * std::sin(2.0 * std::numbers::pi * f * static_cast<double>(t));
      }
      return (re * re + im * im) / T;
    };
    std::vector<double> background;
    for (std::size_t j = 1; j < 1024; j += 7) background.push_back(power(static_cast<double>(j) / T));
    std::nth_element(background.begin(), background.begin() + background.size() / 2, background.end());
    const double med = background[background.size() / 2];
    for (const auto& tone : meta["node_mixes"][n]["tones"]) {
      const double f = tone["frequency"].get<double>();
      CHECK(power(std::round(f * T) / T) > 20.0 * med);
    }
  }
}

TEST_CASE("outputs are never overwritten without --force") {
  TempDir dir;
  REQUIRE(vmdkit_run({"--out", dir / "g", "gen"}).code == 0);
  const auto before = slurp(dir / "g/series.csv");
  const auto again = vmdkit_run({"--seed", "3", "--out", dir / "g", "gen"});
  CHECK(again.code == 2);
  CHECK(again.err.find("--force") != std::string::npos);
  CHECK(slurp(dir / "g/series.csv") == before);
  CHECK(vmdkit_run({"--seed", "3", "--force", "--out", dir / "g", "gen"}).code == 0);
  CHECK(slurp(dir / "g/series.csv") != before);
}

TEST_CASE("exit codes follow the error category") {
  TempDir dir;
  CHECK(vmdkit_run({"no-such-command"}).code == 2);
  CHECK(vmdkit_run({}).code == 2);
  CHECK(vmdkit_run({"--help"}).code == 0);

  write_text(dir / "bad.json", R"({"train": {"max_epochs": "ten"}})");
  auto r = vmdkit_run({"--config", dir / "bad.json", "--out", dir / "o1", "train-uvmd"});
  CHECK(r.code == 2);
  CHECK(r.err.find("train.max_epochs") != std::string::npos);

  write_text(dir / "typo.json", R"({"train": {"mdoes": 3}})");
  r = vmdkit_run({"--config", dir / "typo.json", "--out", dir / "o2", "train-uvmd"});
  CHECK(r.code == 2);
  CHECK(r.err.find("train.mdoes") != std::string::npos);

  write_text(dir / "broken.json", "{ not json");
  CHECK(vmdkit_run({"--config", dir / "broken.json", "gen"}).code == 2);

  r = vmdkit_run({"--out", dir / "o3", "decompose", "--input", dir / "missing.csv"});
  CHECK(r.code == 3);

  write_text(dir / "nan.csv", "a\n1\n2\nnan\n4\n");
  CHECK(vmdkit_run({"--out", dir / "o4", "decompose", "--input", dir / "nan.csv"}).code == 3);

  // A config that passes validation but makes training blow up is a numeric failure.
  REQUIRE(vmdkit_run({"--out", dir / "data", "gen"}).code == 0);
  write_text(dir / "diverge.json",
             R"({"input": "data/series.csv", "train": {"modes": 2, "lr_alpha": 1e308, "max_epochs": 2}})");
  r = vmdkit_run({"--config", dir / "diverge.json", "--out", dir / "o5", "train-uvmd"});
  CHECK(r.code == 4);
}

TEST_CASE("the unfolded engine asks for train-uvmd when parameters are missing") {
  TempDir dir;
  REQUIRE(vmdkit_run({"--out", dir / "data", "gen"}).code == 0);
  auto r = vmdkit_run({"--out", dir / "m", "decompose", "--engine", "unfolded", "--input", dir / "data/series.csv"});
  CHECK(r.code == 2);
  CHECK(r.err.find("train-uvmd") != std::string::npos);

  r = vmdkit_run({"--out", dir / "m", "decompose", "--engine", "unfolded", "--input", dir / "data/series.csv",
                  "--params", dir / "nope.json"});
  CHECK(r.code == 3);
  CHECK(r.err.find("train-uvmd") != std::string::npos);
}

TEST_CASE("decompose: zero input gives zero modes, one tone converges early") {
  TempDir dir;
  std::ostringstream csv;
  csv << "zero,tone\n";
  for (int t = 0; t < 512; ++t) csv << "0," << std::cos(2.0 * std::numbers::pi * 0.1 * t) << '\n';
  write_text(dir / "s.csv", csv.str());
  write_text(dir / "k1.json", R"({"vmd": {"modes": 1}})");
  REQUIRE(vmdkit_run({"--config", dir / "k1.json", "--out", dir / "o", "decompose", "--input", dir / "s.csv"}).code ==
          0);

  const auto zero = vmdkit::dataset::read_table(dir / "o/modes_zero.csv");
  REQUIRE(zero.columns.size() == 1);
  for (double v : zero.columns[0]) CHECK(v == 0.0);

  const auto diag = read_json(dir / "o/diagnostics.json");
  CHECK(diag["schema"] == 1);
  const auto& tone = diag["series"][1];
  CHECK(tone["id"] == "tone");
  CHECK(tone["converged"] == true);
  CHECK(tone["iterations"].get<int>() < 500);
  CHECK(std::abs(tone["omegas"][0].get<double>() - 0.1) < 1.0 / 1024.0);
}

TEST_CASE("train-uvmd is deterministic, lowers its loss, and K=3 under-decomposes") {
  TempDir dir;
  auto cfg = [&](int K, double lr_alpha) {
    return json{{"synthetic", {{"count", 24}, {"length", 256}, {"noise_std", 0.05}}},
                {"train", {{"modes", K}, {"max_epochs", 6}, {"lr_alpha", lr_alpha}}}}
        .dump();
  };
  write_text(dir / "k13.json", cfg(13, 20.0));
  // With the default bandwidth rate both K end at near-zero bandwidths whose
  // all-pass modes reconstruct anything, so the K comparison uses a slow rate
  // that keeps the bandwidths near their initial value.
  write_text(dir / "k13_slow.json", cfg(13, 1e-2));
  write_text(dir / "k3_slow.json", cfg(3, 1e-2));
  REQUIRE(vmdkit_run({"--config", dir / "k13.json", "--seed", "5", "--out", dir / "a", "train-uvmd"}).code == 0);
  REQUIRE(vmdkit_run({"--config", dir / "k13.json", "--seed", "5", "--out", dir / "b", "train-uvmd"}).code == 0);
  CHECK(slurp(dir / "a/uvmd_params.json") == slurp(dir / "b/uvmd_params.json"));
  const auto ra = read_json(dir / "a/train_report.json");
  CHECK(without_timing(ra) == without_timing(read_json(dir / "b/train_report.json")));

  const auto& h = ra["history"];
  REQUIRE(h.size() >= 2);
  CHECK(h.back()["train_loss"].get<double>() < h.front()["train_loss"].get<double>());
  CHECK(ra["best_val_loss"].get<double>() <= h.front()["val_loss"].get<double>());

  REQUIRE(vmdkit_run({"--config", dir / "k3_slow.json", "--seed", "5", "--out", dir / "c", "train-uvmd"}).code == 0);
  REQUIRE(vmdkit_run({"--config", dir / "k13_slow.json", "--seed", "5", "--out", dir / "d", "train-uvmd"}).code == 0);
  const auto k3 = read_json(dir / "c/train_report.json")["history"].back()["val_loss"].get<double>();
  const auto k13 = read_json(dir / "d/train_report.json")["history"].back()["val_loss"].get<double>();
  CHECK(k3 > k13);
}

TEST_CASE("train-forecast writes the horizon grid and is seeded") {
  TempDir dir;
  REQUIRE(vmdkit_run({"--out", dir / "data", "gen"}).code == 0);
  write_text(dir / "uv.json", R"({"input": "data/series.csv", "normalize": true, "segment_length": 128,
                                  "train": {"modes": 3, "max_epochs": 2}})");
  REQUIRE(vmdkit_run({"--config", dir / "uv.json", "--out", dir / "uv", "train-uvmd"}).code == 0);
  write_text(dir / "fc.json", R"({"input": "data/series.csv", "edges": "data/edges.csv",
                                  "uvmd_params": "uv/uvmd_params.json",
                                  "features": {"mode": "causal", "stride": 16}, "train": {"max_epochs": 2}})");
  REQUIRE(vmdkit_run({"--config", dir / "fc.json", "--seed", "1", "--out", dir / "f1", "train-forecast"}).code == 0);
  REQUIRE(vmdkit_run({"--config", dir / "fc.json", "--seed", "1", "--out", dir / "f2", "train-forecast"}).code == 0);

  const auto m = read_json(dir / "f1/forecast_metrics.json");
  CHECK(m["schema"] == 1);
  CHECK(m["channels"] == 3);
  for (const char* split : {"validation", "test"}) {
    for (const char* key : {"horizon_3", "horizon_6", "horizon_12", "average"}) {
      REQUIRE(m[split].contains(key));
      for (const char* metric : {"mae", "rmse", "mape"}) CHECK(m[split][key].contains(metric));
    }
    CHECK(m[split]["per_step"].size() == 12);
  }
  CHECK(without_timing(m) == without_timing(read_json(dir / "f2/forecast_metrics.json")));
  CHECK(slurp(dir / "f1/forecaster.json") == slurp(dir / "f2/forecaster.json"));

  auto r = vmdkit_run({"--config", dir / "fc.json", "--out", dir / "f1", "eval", "--model", dir / "f1/forecaster.json"});
  REQUIRE(r.code == 0);
  const auto e = read_json(dir / "f1/eval_metrics.json");
  CHECK(e["test"]["average"]["mae"].get<double>() == doctest::Approx(m["test"]["average"]["mae"].get<double>()));

  // Parameters trained on 128-sample chunks cannot feed a 64-sample causal window.
  write_text(dir / "mismatch.json", R"({"input": "data/series.csv", "edges": "data/edges.csv",
                                        "uvmd_params": "uv/uvmd_params.json",
                                        "features": {"mode": "causal", "context": 64}})");
  r = vmdkit_run({"--config", dir / "mismatch.json", "--out", dir / "f3", "train-forecast"});
  CHECK(r.code == 2);
  CHECK(r.err.find("uvmd_params") != std::string::npos);
}

TEST_CASE("ablate emits every requested cell") {
  TempDir dir;
  write_text(dir / "a.json", R"({"data": {"length": 768}, "context": 128, "seeds": 2,
                                 "uvmd": {"max_epochs": 1},
                                 "case2": {"fractions": [1, 0.5, 0.125]},
                                 "case3": {"modes": [3, 5], "depths": [1, 2]},
                                 "forecast": {"enabled": false}})");
  REQUIRE(vmdkit_run({"--config", dir / "a.json", "--out", dir / "o", "ablate"}).code == 0);
  const auto table = slurp(dir / "o/ablation.csv");
  std::set<std::string> cells;
  std::size_t rows = 0;
  std::istringstream in(table);
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("case,variant,modes,depth", 0) == 0);
  while (std::getline(in, line)) {
    ++rows;
    cells.insert(line.substr(0, line.find("\",") + 1));
  }
  const std::set<std::string> expected{
      "I,\"alpha_k\"",         "I,\"shared_alpha\"",    "II,\"full\"",           "II,\"1/2\"",
      "II,\"1/8\"",            "III,\"K=3,depth=1\"",   "III,\"K=3,depth=2\"",   "III,\"K=5,depth=1\"",
      "III,\"K=5,depth=2\""};
  CHECK(cells == expected);
  CHECK(rows == 2 * expected.size());
  CHECK(read_json(dir / "o/ablation_summary.json")["cells"].size() == expected.size());
}

TEST_CASE("bench pairs timings with errors and counts K mode updates") {
  TempDir dir;
  write_text(dir / "b.json", R"({"lengths": [256], "modes": [3], "signals": 2, "train_signals": 6,
                                 "train": {"max_epochs": 2}, "thread_counts": [2, 1, 2],
                                 "sweep": {"length": 2048, "max_iter": [40, 80, 120, 160, 200, 240]}})");
  REQUIRE(vmdkit_run({"--config", dir / "b.json", "--threads", "1", "--out", dir / "o", "bench"}).code == 0);
  const auto b = read_json(dir / "o/bench.json");
  CHECK(b["schema"] == 1);
  CHECK(b["environment"]["threads"] == 1);
  CHECK(!b["environment"]["cpu_model"].get<std::string>().empty());
  const auto& cell = b["cells"][0];
  for (const char* engine : {"iterative", "unfolded"}) {
    CHECK(cell[engine].contains("median_ms"));
    CHECK(cell[engine].contains("reconstruction_error"));
    CHECK(cell[engine]["repetitions_ms"].size() == 5);
  }
  CHECK(cell["unfolded"]["mode_updates_per_signal"] == 3);
  CHECK(cell["speedup"].get<double>() > 0.0);
  REQUIRE(cell["by_threads"].size() == 2);
  CHECK(cell["by_threads"][0]["threads"] == 1);
  CHECK(cell["by_threads"][1]["threads"] == 2);
  CHECK(cell["by_threads"][0]["speedup"] == cell["speedup"]);
  CHECK(b["iteration_sweep"]["r2"].get<double>() >= 0.9);

  write_text(dir / "few.json", R"({"repetitions": 3})");
  CHECK(vmdkit_run({"--config", dir / "few.json", "--out", dir / "p", "bench"}).code == 2);
}
