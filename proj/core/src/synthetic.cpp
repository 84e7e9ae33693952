#include "vmdkit/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "vmdkit/error.hpp"

namespace vmdkit::synthetic {
namespace {

std::vector<signal::Tone> pick_tones(const std::vector<double>& pool, std::size_t count, std::mt19937_64& rng) {
  std::vector<std::size_t> idx(pool.size());
  std::iota(idx.begin(), idx.end(), 0);
  // Partial Fisher-Yates with explicit draws so results do not depend on the
  // standard library's shuffle.
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  std::uniform_real_distribution<double> amp(0.5, 1.5), phase(0.0, 2.0 * std::numbers::pi);
  std::vector<signal::Tone> tones;
  for (std::size_t i : idx) tones.push_back({pool[i], amp(rng), phase(rng)});
  return tones;
}

void check_pool(const std::vector<double>& pool, std::size_t per_signal) {
  if (pool.empty()) throw InvalidConfig("tone_pool must not be empty");
  for (double f : pool) {
    if (!(f > 0.0 && f < 0.5)) throw InvalidConfig("tone_pool frequencies must lie in (0, 0.5)");
  }
  if (per_signal < 1 || per_signal > pool.size()) {
    throw InvalidConfig("tones_per_node must be between 1 and the pool size (" + std::to_string(pool.size()) + ")");
  }
}

}  // namespace

void GraphDatasetSpec::validate() const {
  if (nodes < 1) throw InvalidConfig("gen.nodes must be >= 1");
  if (length < 4) throw InvalidConfig("gen.length must be >= 4");
  if (!(density >= 0.0 && density <= 1.0)) throw InvalidConfig("gen.density must lie in [0, 1]");
  check_pool(tone_pool, tones_per_node);
  if (!(noise_std >= 0.0)) throw InvalidConfig("gen.noise_std must be >= 0");
  if (!(broadband_std >= 0.0)) throw InvalidConfig("gen.broadband_std must be >= 0");
  if (!(std::abs(broadband_rho) < 1.0)) throw InvalidConfig("gen.broadband_rho must lie in (-1, 1)");
}

GraphDataset make_graph_dataset(const GraphDatasetSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  GraphDataset out;

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < spec.nodes; ++i)
    for (std::size_t j = i + 1; j < spec.nodes; ++j) pairs.emplace_back(i, j);
  const auto wanted = static_cast<std::size_t>(std::llround(spec.density * static_cast<double>(pairs.size())));
  for (std::size_t i = 0; i < wanted; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pairs.size() - 1);
    std::swap(pairs[i], pairs[pick(rng)]);
  }
  pairs.resize(wanted);
  std::sort(pairs.begin(), pairs.end());
  std::uniform_real_distribution<double> weight(0.5, 1.0);
  for (const auto& [i, j] : pairs) {
    const double w = weight(rng);
    out.edges.push_back({i, j, w});
    out.edges.push_back({j, i, w});
  }

  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t n = 0; n < spec.nodes; ++n) {
    NodeMix mix{pick_tones(spec.tone_pool, spec.tones_per_node, rng)};
    RealVec x(spec.length, 0.0);
    for (const auto& t : mix.tones) {
      for (std::size_t s = 0; s < spec.length; ++s) {
        x[s] += t.amplitude * std::cos(2.0 * std::numbers::pi * t.frequency * static_cast<double>(s) + t.phase);
      }
    }
    double ar = 0.0;
    for (std::size_t s = 0; s < spec.length; ++s) {
      if (spec.broadband_std > 0.0) {
        ar = spec.broadband_rho * ar + spec.broadband_std * gauss(rng);
        x[s] += ar;
      }
      if (spec.noise_std > 0.0) x[s] += spec.noise_std * gauss(rng);
    }
    out.series.push_back(signal::make_series("n" + std::to_string(n), std::move(x)));
    out.mixes.push_back(std::move(mix));
  }
  return out;
}

std::vector<signal::TimeSeries> mixed_signals(std::size_t count, std::size_t length, const std::vector<double>& pool,
                                              std::size_t tones_per_signal, double noise_std, std::uint64_t seed) {
  check_pool(pool, tones_per_signal);
  if (!(noise_std >= 0.0)) throw InvalidConfig("noise_std must be >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<signal::TimeSeries> out;
  for (std::size_t i = 0; i < count; ++i) {
    const auto tones = pick_tones(pool, tones_per_signal, rng);
    RealVec x(length, 0.0);
    for (std::size_t s = 0; s < length; ++s) {
      for (const auto& t : tones) {
        x[s] += t.amplitude * std::cos(2.0 * std::numbers::pi * t.frequency * static_cast<double>(s) + t.phase);
      }
      x[s] += noise_std * gauss(rng);
    }
    out.push_back(signal::make_series("s" + std::to_string(i), std::move(x)));
  }
  return out;
}

}  // namespace vmdkit::synthetic
