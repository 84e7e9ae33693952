#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vmdkit/signal.hpp"

namespace vmdkit::dataset {

/// Chronological (never shuffled) three-way split.
struct SplitConfig {
  double train_frac = 0.7;
  double val_frac = 0.15;
  double test_frac = 0.15;

  void validate() const;
};

struct SplitRanges {
  std::size_t train_begin = 0, train_end = 0;
  std::size_t val_begin = 0, val_end = 0;
  std::size_t test_begin = 0, test_end = 0;

  std::size_t train_size() const noexcept { return train_end - train_begin; }
  std::size_t val_size() const noexcept { return val_end - val_begin; }
  std::size_t test_size() const noexcept { return test_end - test_begin; }
};

/// Train gets floor(n * train_frac), validation round(n * val_frac), test the rest.
SplitRanges split(std::size_t n, const SplitConfig& cfg);

struct Normalization {
  double mean = 0.0;
  double std = 1.0;  // population standard deviation
};

/// Fits mean/std on `fit_range` (e.g. the training split only).
Normalization fit_zscore(std::span<const double> fit_range);
RealVec apply_zscore(std::span<const double> x, const Normalization& n);
RealVec denormalize(std::span<const double> z, const Normalization& n);

struct Normalized {
  signal::TimeSeries series;
  Normalization norm;
};
Normalized zscore_normalize(const signal::TimeSeries& series);

/// Wide CSV: header of node ids, one row per timestep.
/// `columns` selects by header name; empty selects every column.
std::vector<signal::TimeSeries> load_csv(const std::filesystem::path& path,
                                         const std::vector<std::string>& columns = {});
void write_csv(const std::filesystem::path& path, const std::vector<signal::TimeSeries>& series);

/// Loads every column as-is without truncation or length checks.
struct Table {
  std::vector<std::string> header;
  std::vector<RealVec> columns;
};
Table read_table(const std::filesystem::path& path);

struct Edge {
  std::size_t src = 0;
  std::size_t dst = 0;
  double weight = 1.0;
};
std::vector<Edge> load_edges(const std::filesystem::path& path);
void write_edges(const std::filesystem::path& path, const std::vector<Edge>& edges);

}  // namespace vmdkit::dataset
