#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "vmdkit/dataset.hpp"
#include "vmdkit/forecaster.hpp"
#include "vmdkit/types.hpp"

namespace vmdkit::pipeline {

enum class FeatureMode {
  Raw,     // one channel: the normalized series itself
  Causal,  // modes of the trailing `context` samples ending at each window's last step
  Full,    // modes of the whole series; later samples influence earlier features
};

/// Splits one series into `channels()` time-domain components of equal length.
struct Decomposer {
  std::size_t channels = 0;
  std::function<std::vector<RealVec>(std::span<const double>)> run;
};

struct FeatureConfig {
  FeatureMode mode = FeatureMode::Raw;
  std::size_t window = 12;
  std::size_t horizon = 12;
  /// Samples reserved before the first window. Also the trailing length
  /// decomposed in causal mode. Every mode starts its windows at the same
  /// index so raw and decomposed features are scored on identical targets.
  std::size_t context = 128;
  /// Trailing length decomposed in causal mode when shorter than `context`;
  /// 0 means `context`.
  std::size_t decompose_length = 0;
  std::size_t stride = 1;
  /// Adds a sin/cos pair of the sample phase within `period` as auxiliary channels.
  bool time_of_day = false;
  std::size_t period = 288;
  /// Fraction of each series used to fit the z-score normalization.
  double fit_frac = 0.6;
  std::size_t threads = 1;

  std::size_t causal_length() const noexcept { return decompose_length ? decompose_length : context; }
  void validate() const;
};

struct WindowSet {
  std::vector<graph::FeatureTensor> windows;
  std::vector<graph::Matrix> targets;  // normalized, N x horizon
  std::vector<dataset::Normalization> norms;
  std::size_t channels = 0;

  /// Undo the per-node normalization of an N x H block.
  graph::Matrix denormalize(const graph::Matrix& m) const;
};

/// Builds chronological windows/targets from N equal-length node series.
/// `decomposer` is required for Causal and Full modes.
WindowSet build_windows(const std::vector<RealVec>& series, const FeatureConfig& cfg,
                        const Decomposer* decomposer = nullptr);

}  // namespace vmdkit::pipeline
