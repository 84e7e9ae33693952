#include <algorithm>
#include <chrono>
#include <fstream>
#include <limits>
#include <thread>

#include "cli/commands.hpp"
#include "cli/settings.hpp"
#include "vmdkit/parallel.hpp"

namespace vmdkit::cli {
namespace {

constexpr int kSchema = 1;
using Clock = std::chrono::steady_clock;

std::string cpu_model() {
  std::ifstream in("/proc/cpuinfo");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) return line.substr(line.find_first_not_of(' ', colon + 1));
    }
  }
  return "unknown";
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

struct EngineTiming {
  double median_ms = 0.0;
  std::vector<double> repetitions_ms;
  std::vector<vmd::ModeSet> last;
};

/// Decomposes every signal on the worker pool per repetition; the batch is timed as a whole.
template <class Fn>
EngineTiming time_engine(const std::vector<signal::TimeSeries>& signals, std::size_t warmup, std::size_t reps,
                         std::size_t threads, Fn&& decompose) {
  EngineTiming t;
  std::vector<vmd::ModeSet> out(signals.size());
  for (std::size_t r = 0; r < warmup + reps; ++r) {
    const auto t0 = Clock::now();
    parallel_for(signals.size(), threads, [&](std::size_t i) { out[i] = decompose(signals[i].values); });
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    if (r >= warmup) t.repetitions_ms.push_back(ms);
  }
  t.median_ms = median(t.repetitions_ms);
  t.last = std::move(out);
  return t;
}

double mean_error(const std::vector<signal::TimeSeries>& signals, const std::vector<vmd::ModeSet>& sets) {
  double s = 0.0;
  for (std::size_t i = 0; i < signals.size(); ++i) s += vmd::reconstruction_error(signals[i].values, sets[i]);
  return s / static_cast<double>(signals.size());
}

struct Fit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

Fit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  Fit f;
  if (sxx == 0.0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

}  // namespace

void cmd_bench(const RunContext& ctx) {
  const auto root = ctx.root();
  root.allow_only({"lengths", "modes", "repetitions", "warmup", "signals", "max_iter", "tol", "alpha", "noise_std",
                   "tones_per_signal", "train_signals", "train", "sweep", "seed", "thread_counts"});
  const auto lengths = root.get<std::vector<std::size_t>>("lengths", {1024, 4096, 16384});
  const auto modes = root.get<std::vector<std::size_t>>("modes", {3, 13});
  const auto reps = root.get<std::size_t>("repetitions", 5);
  const auto warmup = root.get<std::size_t>("warmup", 1);
  const auto count = root.get<std::size_t>("signals", 4);
  const auto train_count = root.get<std::size_t>("train_signals", 16);
  const double noise = root.get("noise_std", 0.1);
  const auto tones = root.get<std::size_t>("tones_per_signal", 3);
  if (reps < 5) throw InvalidConfig("repetitions: at least 5 are required");
  if (count == 0) throw InvalidConfig("signals: must be >= 1");
  if (lengths.empty() || modes.empty()) throw InvalidConfig("lengths/modes: must not be empty");

  vmd::VmdConfig vcfg;
  vcfg.max_iter = root.get("max_iter", vcfg.max_iter);
  vcfg.tol = root.get("tol", vcfg.tol);
  vcfg.alpha = root.get("alpha", vcfg.alpha);
  auto tcfg = parse_uvmd_train(root.child("train"), ctx.seed(), ctx.threads);
  tcfg.depth = 1;

  const auto sweep = root.child("sweep");
  sweep.allow_only({"enabled", "length", "modes", "max_iter"});
  const bool do_sweep = sweep.get("enabled", true);
  const auto sweep_len = sweep.get<std::size_t>("length", 4096);
  const auto sweep_modes = sweep.get<std::size_t>("modes", 3);
  const auto sweep_iters =
      sweep.get<std::vector<std::size_t>>("max_iter", {50, 100, 150, 200, 250, 300, 350, 400, 450, 500});
  ctx.claim({"bench.json"});

  const std::size_t threads = ctx.resolved_threads();
  // Speedups depend on how many workers share the signals, so every cell is
  // also timed at each of these counts.
  auto thread_counts = root.get<std::vector<std::size_t>>("thread_counts", {1, threads});
  for (auto& t : thread_counts) {
    if (t == 0) t = resolve_threads(0);
  }
  std::sort(thread_counts.begin(), thread_counts.end());
  thread_counts.erase(std::unique(thread_counts.begin(), thread_counts.end()), thread_counts.end());
  const auto pool = synthetic::GraphDatasetSpec{}.tone_pool;
  json cells = json::array();
  for (std::size_t T : lengths) {
    const auto train_set = synthetic::mixed_signals(train_count, T, pool, tones, noise, ctx.seed());
    const auto test_set = synthetic::mixed_signals(count, T, pool, tones, noise, ctx.seed() + 1);
    for (std::size_t K : modes) {
      ctx.note("bench T=" + std::to_string(T) + " K=" + std::to_string(K));
      auto cfg = vcfg;
      cfg.modes = K;
      auto tc = tcfg;
      tc.modes = K;
      const auto trained = unfolded::train(train_set, tc);

      const auto it = time_engine(test_set, warmup, reps, threads,
                                  [&](const RealVec& x) { return vmd::vmd_decompose(x, cfg); });
      const auto un = time_engine(test_set, warmup, reps, threads,
                                  [&](const RealVec& x) { return unfolded::decompose_with(trained.params, x); });
      json by_threads = json::array();
      for (std::size_t tcount : thread_counts) {
        const auto a = tcount == threads ? it
                                         : time_engine(test_set, warmup, reps, tcount, [&](const RealVec& x) {
                                             return vmd::vmd_decompose(x, cfg);
                                           });
        const auto b = tcount == threads ? un
                                         : time_engine(test_set, warmup, reps, tcount, [&](const RealVec& x) {
                                             return unfolded::decompose_with(trained.params, x);
                                           });
        by_threads.push_back({{"threads", tcount},
                              {"iterative_median_ms", a.median_ms},
                              {"unfolded_median_ms", b.median_ms},
                              {"speedup", a.median_ms / b.median_ms}});
      }
      double iters = 0.0;
      for (const auto& m : it.last) iters += static_cast<double>(m.iterations_used) / static_cast<double>(count);
      const double n = static_cast<double>(count);
      cells.push_back({{"length", T},
                       {"modes", K},
                       {"signals", count},
                       {"iterative",
                        {{"median_ms", it.median_ms},
                         {"per_signal_ms", it.median_ms / n},
                         {"repetitions_ms", it.repetitions_ms},
                         {"reconstruction_error", mean_error(test_set, it.last)},
                         {"mean_iterations", iters},
                         {"max_iter", cfg.max_iter}}},
                       {"unfolded",
                        {{"median_ms", un.median_ms},
                         {"per_signal_ms", un.median_ms / n},
                         {"repetitions_ms", un.repetitions_ms},
                         {"reconstruction_error", mean_error(test_set, un.last)},
                         {"mode_updates_per_signal", un.last.front().mode_updates},
                         {"depth", 1},
                         {"training_ms", trained.report.wall_clock_ms}}},
                       {"speedup", it.median_ms / un.median_ms},
                       {"by_threads", std::move(by_threads)}});
    }
  }

  json out{{"schema", kSchema},
           {"kind", "vmdkit.bench"},
           {"environment",
            {{"cpu_model", cpu_model()},
             {"threads", threads},
             {"hardware_concurrency", std::thread::hardware_concurrency()}}},
           {"repetitions", reps},
           {"warmup", warmup},
           {"cells", std::move(cells)}};

  if (do_sweep) {
    ctx.note("bench iteration sweep at T=" + std::to_string(sweep_len));
    const auto set = synthetic::mixed_signals(count, sweep_len, pool, tones, noise, ctx.seed() + 2);
    std::vector<double> xs, ys;
    json points = json::array();
    for (std::size_t m : sweep_iters) {
      auto cfg = vcfg;
      cfg.modes = sweep_modes;
      cfg.max_iter = m;
      cfg.tol = std::numeric_limits<double>::denorm_min();  // forces exactly max_iter sweeps
      const auto t = time_engine(set, warmup, reps, threads,
                                 [&](const RealVec& x) { return vmd::vmd_decompose(x, cfg); });
      double used = 0.0;
      for (const auto& s : t.last) used += static_cast<double>(s.iterations_used) / static_cast<double>(count);
      xs.push_back(used);
      ys.push_back(t.median_ms);
      points.push_back({{"max_iter", m}, {"mean_iterations", used}, {"median_ms", t.median_ms}});
    }
    const auto fit = linear_fit(xs, ys);
    out["iteration_sweep"] = {{"length", sweep_len},
                              {"modes", sweep_modes},
                              {"points", std::move(points)},
                              {"slope_ms_per_iteration", fit.slope},
                              {"intercept_ms", fit.intercept},
                              {"r2", fit.r2}};
  }
  write_json(ctx.output("bench.json"), out);
}

}  // namespace vmdkit::cli
