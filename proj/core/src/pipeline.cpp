#include "vmdkit/pipeline.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "vmdkit/error.hpp"
#include "vmdkit/parallel.hpp"

namespace vmdkit::pipeline {

void FeatureConfig::validate() const {
  if (window == 0) throw InvalidConfig("features.window must be >= 1");
  if (horizon == 0) throw InvalidConfig("features.horizon must be >= 1");
  if (context < window) throw InvalidConfig("features.context must be >= features.window");
  if (decompose_length && (decompose_length < window || decompose_length > context)) {
    throw InvalidConfig("features.decompose_length must lie between features.window and features.context");
  }
  if (stride == 0) throw InvalidConfig("features.stride must be >= 1");
  if (time_of_day && period < 2) throw InvalidConfig("features.period must be >= 2");
  if (!(fit_frac > 0.0 && fit_frac <= 1.0)) throw InvalidConfig("features.fit_frac must be in (0, 1]");
}

graph::Matrix WindowSet::denormalize(const graph::Matrix& m) const {
  graph::Matrix out = m;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const auto& n = norms[static_cast<std::size_t>(r)];
    out.row(r) = (m.row(r).array() * n.std + n.mean).matrix();
  }
  return out;
}

WindowSet build_windows(const std::vector<RealVec>& series, const FeatureConfig& cfg, const Decomposer* decomposer) {
  cfg.validate();
  if (series.empty()) throw InvalidInput("no node series");
  const std::size_t N = series.size(), len = series.front().size();
  for (std::size_t n = 0; n < N; ++n) {
    if (series[n].size() != len) {
      throw InvalidInput("node " + std::to_string(n) + " has " + std::to_string(series[n].size()) +
                         " samples, expected " + std::to_string(len));
    }
  }
  if (cfg.mode != FeatureMode::Raw && (!decomposer || !decomposer->run || decomposer->channels == 0)) {
    throw InvalidConfig("decomposed features need a decomposer");
  }
  if (len < cfg.context + cfg.horizon) {
    throw InvalidInput("series of length " + std::to_string(len) + " is shorter than context + horizon (" +
                       std::to_string(cfg.context + cfg.horizon) + ")");
  }

  WindowSet out;
  std::vector<RealVec> z(N);
  const auto fit_len = std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(cfg.fit_frac * static_cast<double>(len))));
  for (std::size_t n = 0; n < N; ++n) {
    out.norms.push_back(dataset::fit_zscore(std::span<const double>(series[n]).first(std::min(fit_len, len))));
    z[n] = dataset::apply_zscore(series[n], out.norms.back());
  }

  const std::size_t K = cfg.mode == FeatureMode::Raw ? 1 : decomposer->channels;
  const std::size_t aux = cfg.time_of_day ? 2 : 0;
  out.channels = K + aux;
  const std::size_t T = cfg.window, H = cfg.horizon;

  std::vector<std::size_t> starts;
  for (std::size_t s = cfg.context - T; s + T + H <= len; s += cfg.stride) starts.push_back(s);

  std::vector<std::vector<RealVec>> full(N);
  if (cfg.mode == FeatureMode::Full) {
    parallel_for(N, cfg.threads, [&](std::size_t n) { full[n] = decomposer->run(z[n]); });
  }

  out.windows.resize(starts.size());
  out.targets.resize(starts.size());
  parallel_for(starts.size(), cfg.threads, [&](std::size_t w) {
    const std::size_t s = starts[w];
    auto x = graph::FeatureTensor::zeros(N, out.channels, T);
    x.start = s;
    graph::Matrix target(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(H));
    for (std::size_t n = 0; n < N; ++n) {
      switch (cfg.mode) {
        case FeatureMode::Raw:
          for (std::size_t t = 0; t < T; ++t) x.at(n, 0, t) = z[n][s + t];
          break;
        case FeatureMode::Causal: {
          const std::size_t end = s + T, tail = cfg.causal_length();
          const auto modes = decomposer->run(std::span<const double>(z[n]).subspan(end - tail, tail));
          for (std::size_t k = 0; k < K; ++k) {
            for (std::size_t t = 0; t < T; ++t) x.at(n, k, t) = modes[k][tail - T + t];
          }
          break;
        }
        case FeatureMode::Full:
          for (std::size_t k = 0; k < K; ++k) {
            for (std::size_t t = 0; t < T; ++t) x.at(n, k, t) = full[n][k][s + t];
          }
          break;
      }
      if (aux) {
        for (std::size_t t = 0; t < T; ++t) {
          const double phase =
              2.0 * std::numbers::pi * static_cast<double>((s + t) % cfg.period) / static_cast<double>(cfg.period);
          x.at(n, K, t) = std::sin(phase);
          x.at(n, K + 1, t) = std::cos(phase);
        }
      }
      for (std::size_t h = 0; h < H; ++h) {
        target(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(h)) = z[n][s + T + h];
      }
    }
    out.windows[w] = std::move(x);
    out.targets[w] = std::move(target);
  });
  return out;
}

}  // namespace vmdkit::pipeline
