#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "vmdkit/dataset.hpp"
#include "vmdkit/signal.hpp"

namespace vmdkit::synthetic {

/// A reproducible graph dataset: every node mixes a node-specific subset of
/// a shared tone pool, optional broadband AR(1) noise, and white noise.
struct GraphDatasetSpec {
  std::size_t nodes = 8;
  std::size_t length = 2048;
  double density = 0.3;  // fraction of unordered node pairs joined by an edge
  std::vector<double> tone_pool{0.004, 0.011, 0.027, 0.052, 0.09, 0.14, 0.21, 0.32};
  std::size_t tones_per_node = 3;
  double noise_std = 0.1;
  double broadband_std = 0.0;  // innovation std of the AR(1) component
  double broadband_rho = 0.9;
  std::uint64_t seed = 0;

  void validate() const;
};

struct NodeMix {
  std::vector<signal::Tone> tones;
};

struct GraphDataset {
  std::vector<signal::TimeSeries> series;
  std::vector<dataset::Edge> edges;  // undirected: each pair appears in both directions
  std::vector<NodeMix> mixes;
};

GraphDataset make_graph_dataset(const GraphDatasetSpec& spec);

/// `count` single-series signals of `length` samples, each a random mix of
/// tones drawn from `pool` plus white noise. Used to train and test UVMD.
std::vector<signal::TimeSeries> mixed_signals(std::size_t count, std::size_t length, const std::vector<double>& pool,
                                              std::size_t tones_per_signal, double noise_std, std::uint64_t seed);

}  // namespace vmdkit::synthetic
