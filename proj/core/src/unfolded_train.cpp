#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "vmdkit/adam.hpp"
#include "vmdkit/error.hpp"
#include "vmdkit/parallel.hpp"
#include "vmdkit/unfolded.hpp"

namespace vmdkit::unfolded {
namespace {

std::span<double> as_reals(ComplexVec& v) {
  return {reinterpret_cast<double*>(v.data()), 2 * v.size()};
}

struct Evaluation {
  double loss = 0.0;
  double relative = 0.0;
};

Evaluation evaluate(const std::vector<ComplexVec>& spectra, std::size_t begin, std::size_t end, const Params& params,
                    std::span<const double> init, std::size_t threads) {
  const std::size_t count = end - begin;
  std::vector<double> loss(count), rel(count);
  parallel_for(count, threads, [&](std::size_t i) {
    const auto& f = spectra[begin + i];
    auto trace = forward(f, params, init);
    loss[i] = reconstruction_loss(f, trace.modes);
    rel[i] = relative_reconstruction_loss(f, trace.modes);
  });
  Evaluation e;
  for (std::size_t i = 0; i < count; ++i) {
    e.loss += loss[i];
    e.relative += rel[i];
  }
  e.loss /= static_cast<double>(count);
  e.relative /= static_cast<double>(count);
  return e;
}

}  // namespace

void TrainConfig::validate() const {
  if (modes < 1) throw InvalidConfig("train.modes must be >= 1");
  if (depth < 1 || depth > kMaxDepth) throw InvalidConfig("train.depth must be 1 or 2");
  if (!(alpha_init > 0.0)) throw InvalidConfig("train.alpha_init must be > 0");
  if (!(lr_alpha > 0.0)) throw InvalidConfig("train.lr_alpha must be > 0");
  if (!(lr_multiplier > 0.0)) throw InvalidConfig("train.lr_multiplier must be > 0");
  if (max_epochs < 1) throw InvalidConfig("train.max_epochs must be >= 1");
  if (patience < 1) throw InvalidConfig("train.patience must be >= 1");
  if (batch_size < 1) throw InvalidConfig("train.batch_size must be >= 1");
  split.validate();
}

double TrainReport::best_val_loss() const {
  return val_loss.empty() ? std::numeric_limits<double>::infinity() : *std::min_element(val_loss.begin(), val_loss.end());
}

double TrainReport::best_val_relative() const {
  if (best_epoch == 0 || best_epoch > val_relative.size()) return std::numeric_limits<double>::infinity();
  return val_relative[best_epoch - 1];
}

TrainResult train(const std::vector<signal::TimeSeries>& signals, const TrainConfig& cfg) {
  if (signals.empty()) throw InvalidInput("uvmd train: at least one signal is required");
  const std::size_t length = signals.front().size();
  for (const auto& s : signals) {
    if (s.size() != length) {
      throw InvalidInput("uvmd train: signals must share one length (" + std::to_string(length) + " vs " +
                         std::to_string(s.size()) + " for '" + s.id + "')");
    }
  }
  std::vector<ComplexVec> spectra(signals.size());
  parallel_for(signals.size(), cfg.threads, [&](std::size_t i) { spectra[i] = signal::analysis(signals[i].values); });
  return train_spectra(spectra, cfg);
}

TrainResult train_spectra(const std::vector<ComplexVec>& spectra, const TrainConfig& cfg) {
  cfg.validate();
  if (spectra.empty()) throw InvalidInput("uvmd train: at least one signal is required");
  const auto started = std::chrono::steady_clock::now();
  const std::size_t n = spectra.front().size();

  TrainReport report;
  auto ranges = dataset::split(spectra.size(), cfg.split);
  if (ranges.train_size() == 0) {
    ranges.train_end = spectra.size();
  }
  std::size_t val_begin = ranges.val_begin, val_end = ranges.val_end;
  if (ranges.val_size() == 0) {
    // Too few signals for a held-out split: validate on the training signals.
    val_begin = ranges.train_begin;
    val_end = ranges.train_end;
    report.validation_reuses_train = true;
  }
  report.train_signals = ranges.train_size();
  report.val_signals = val_end - val_begin;
  report.test_signals = ranges.val_size() == 0 ? 0 : ranges.test_size();

  Params params = Params::initial(cfg.modes, cfg.depth, n, cfg.shared_alpha, cfg.alpha_init);
  const RealVec init = vmd::initial_omegas(cfg.modes, vmd::OmegaInit::Uniform);

  Adam alpha_opt(params.alpha_raw.size(), AdamConfig{cfg.lr_alpha});
  std::vector<Adam> bias_opts;
  for (std::size_t l = 0; l < cfg.depth; ++l) bias_opts.emplace_back(2 * n, AdamConfig{cfg.lr_multiplier});

  std::vector<std::size_t> order(ranges.train_size());
  std::iota(order.begin(), order.end(), ranges.train_begin);
  std::mt19937_64 rng(cfg.seed);

  Params best = params;
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  RealVec alpha_grad(params.alpha_raw.size());
  std::vector<ComplexVec> bias_grad(cfg.depth, ComplexVec(n));
  std::vector<Gradients> batch_grads;

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      batch_grads.assign(stop - start, Gradients{});
      parallel_for(stop - start, cfg.threads,
                   [&](std::size_t i) { batch_grads[i] = gradients(spectra[order[start + i]], params, init); });

      std::fill(alpha_grad.begin(), alpha_grad.end(), 0.0);
      for (auto& b : bias_grad) std::fill(b.begin(), b.end(), Complex{});
      const double scale = 1.0 / static_cast<double>(stop - start);
      for (const auto& g : batch_grads) {
        epoch_loss += g.loss;
        for (std::size_t i = 0; i < alpha_grad.size(); ++i) alpha_grad[i] += scale * g.alpha_raw[i];
        for (std::size_t l = 0; l < cfg.depth; ++l) {
          for (std::size_t j = 0; j < n; ++j) bias_grad[l][j] += scale * g.multipliers[l][j];
        }
      }
      alpha_opt.step(params.alpha_raw, alpha_grad);
      for (std::size_t l = 0; l < cfg.depth; ++l) bias_opts[l].step(as_reals(params.multipliers[l]), as_reals(bias_grad[l]));
    }

    const Evaluation val = evaluate(spectra, val_begin, val_end, params, init, cfg.threads);
    report.train_loss.push_back(epoch_loss / static_cast<double>(std::max<std::size_t>(1, order.size())));
    report.val_loss.push_back(val.loss);
    report.val_relative.push_back(val.relative);
    report.stopped_epoch = epoch;
    if (!std::isfinite(val.loss) || !std::isfinite(report.train_loss.back())) {
      throw TrainingFailure("uvmd training diverged at epoch " + std::to_string(epoch));
    }
    if (val.loss < best_val) {
      best_val = val.loss;
      best = params;
      report.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }

  report.bandwidths = best.bandwidths();
  report.wall_clock_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return TrainResult{std::move(best), std::move(report)};
}

}  // namespace vmdkit::unfolded
