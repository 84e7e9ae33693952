#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vmdkit/dataset.hpp"
#include "vmdkit/signal.hpp"
#include "vmdkit/types.hpp"
#include "vmdkit/vmd.hpp"

namespace vmdkit::unfolded {

inline constexpr std::size_t kMaxDepth = 2;

struct NamedNormalization {
  std::string id;
  dataset::Normalization norm;
};

/// Trainable state of the unfolded network.
///
/// One raw bandwidth per mode (or a single shared one) is reused by every
/// layer and mapped through softplus before use. Each layer owns its own
/// complex multiplier over the one-sided grid.
struct Params {
  std::size_t modes = 0;
  std::size_t depth = 1;
  std::size_t grid_length = 0;
  bool shared_alpha = false;
  RealVec alpha_raw;
  std::vector<ComplexVec> multipliers;
  std::vector<NamedNormalization> normalization;

  static Params initial(std::size_t modes, std::size_t depth, std::size_t grid_length, bool shared_alpha = false,
                        double alpha_init = 2000.0);

  void validate() const;
  /// Throws InvalidInput unless a signal of `length` samples fits this grid.
  void check_signal_length(std::size_t length) const;

  /// softplus(alpha_raw) for mode k.
  double bandwidth(std::size_t k) const;
  RealVec bandwidths() const;

  /// FNV-1a over the numeric state; used to prove inference is read-only.
  std::uint64_t checksum() const;
};

struct ForwardTrace {
  std::vector<ComplexVec> modes;
  RealVec omegas;                        // centers after the final layer
  std::vector<RealVec> centers;          // centers used by each layer
  std::size_t mode_updates = 0;
  std::size_t stalls = 0;
  // Wiener-filter inputs per (layer, mode); filled when requested for backprop.
  std::vector<std::vector<ComplexVec>> numerators;
};

struct ForwardOptions {
  /// When set, layer n uses these centers instead of the running centroids.
  const std::vector<RealVec>* fixed_centers = nullptr;
  bool keep_numerators = false;
};

/// Exactly `depth` Gauss-Seidel sweeps from zero modes, no convergence test.
ForwardTrace forward(std::span<const Complex> f_hat, const Params& params, std::span<const double> omega_init,
                     const ForwardOptions& options = {});

/// ||f - sum_k modes[k]||_2 over the one-sided grid.
double reconstruction_loss(std::span<const Complex> f_hat, const std::vector<ComplexVec>& modes);
double relative_reconstruction_loss(std::span<const Complex> f_hat, const std::vector<ComplexVec>& modes);

/// Gradients of the reconstruction loss. Complex entries hold
/// (dL/dRe, dL/dIm). Center frequencies are stop-gradient: they enter the
/// backward pass as the constants the forward pass used.
struct Gradients {
  double loss = 0.0;
  RealVec alpha_raw;
  std::vector<ComplexVec> multipliers;
  ForwardTrace trace;
};

Gradients gradients(std::span<const Complex> f_hat, const Params& params, std::span<const double> omega_init);

/// Loss with every layer's centers pinned; the function the gradients differentiate.
double loss_with_centers(std::span<const Complex> f_hat, const Params& params, std::span<const double> omega_init,
                         const std::vector<RealVec>& centers);

struct TrainConfig {
  std::size_t modes = 13;
  std::size_t depth = 1;
  bool shared_alpha = false;
  double alpha_init = 2000.0;
  double lr_alpha = 20.0;
  double lr_multiplier = 1e-3;
  std::size_t max_epochs = 30;
  std::size_t patience = 10;
  dataset::SplitConfig split{0.7, 0.15, 0.15};
  std::size_t batch_size = 1;
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  void validate() const;
};

struct TrainReport {
  std::vector<double> train_loss;       // mean L_rec over the epoch's optimizer steps
  std::vector<double> val_loss;         // mean L_rec on the validation split
  std::vector<double> val_relative;     // mean L_rec / ||f|| on the validation split
  RealVec bandwidths;                   // softplus(alpha_raw) of the returned parameters
  std::size_t stopped_epoch = 0;
  std::size_t best_epoch = 0;
  std::size_t train_signals = 0;
  std::size_t val_signals = 0;
  std::size_t test_signals = 0;
  bool validation_reuses_train = false;
  double wall_clock_ms = 0.0;

  double best_val_loss() const;
  double best_val_relative() const;
};

struct TrainResult {
  Params params;
  TrainReport report;
};

/// Trains global parameters over every signal in the training split (one
/// optimizer step per batch), early-stops on validation L_rec and returns the
/// best-validation parameters.
TrainResult train(const std::vector<signal::TimeSeries>& signals, const TrainConfig& cfg);
TrainResult train_spectra(const std::vector<ComplexVec>& spectra, const TrainConfig& cfg);

/// Frozen-parameter inference: mirror, transform, forward, back to time domain.
/// Modes keep the parameter order (mode k uses bandwidth k).
vmd::ModeSet decompose_with(const Params& params, std::span<const double> signal);
vmd::ModeSet decompose_with(const Params& params, const signal::TimeSeries& signal);

inline constexpr int kParamsSchema = 1;

void save_params(const std::filesystem::path& path, const Params& params);
Params load_params(const std::filesystem::path& path);

}  // namespace vmdkit::unfolded
