#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "vmdkit/signal.hpp"
#include "vmdkit/types.hpp"

namespace vmdkit::vmd {

enum class OmegaInit { Uniform, Zero };

struct VmdConfig {
  std::size_t modes = 3;
  double alpha = 2000.0;
  double tau = 0.0;
  double tol = 1e-7;
  std::size_t max_iter = 500;
  OmegaInit omega_init = OmegaInit::Uniform;

  void validate() const;
};

/// Time-domain decomposition result shared by both engines.
struct ModeSet {
  std::vector<RealVec> modes;
  RealVec omegas;  // normalized center frequencies in [0, 0.5)
  std::size_t iterations_used = 0;
  bool converged = false;
  std::size_t stalls = 0;        // zero-energy centroid updates that kept the old center
  std::size_t mode_updates = 0;  // Wiener-filter applications performed

  std::size_t size() const noexcept { return modes.size(); }
};

/// Uniform init puts center k at the midpoint of the k-th of K equal bands of
/// [0, 0.5): (k + 0.5) * 0.5 / K.
RealVec initial_omegas(std::size_t modes, OmegaInit init);

/// 1 / (1 + 2 alpha (omega - center)^2)
inline double wiener_kernel(double alpha, double omega, double center) noexcept {
  const double d = omega - center;
  return 1.0 / (1.0 + 2.0 * alpha * d * d);
}

/// Single Wiener-filtered mode update, reading the supplied mode spectra as-is:
/// (f - sum_{i != k} modes[i] + lambda / 2) * kernel(alpha, omega, omega_k).
ComplexVec mode_update(std::span<const Complex> f_hat, const std::vector<ComplexVec>& modes,
                       std::span<const Complex> lambda_hat, std::size_t k, double alpha, double omega_k,
                       std::span<const double> grid);

/// Power-weighted centroid of a mode spectrum; nullopt for a zero-energy mode.
std::optional<double> omega_update(std::span<const Complex> mode_hat, std::span<const double> grid);

/// lambda += tau * (f - sum_k modes[k])
void lambda_update(std::span<Complex> lambda_hat, std::span<const Complex> f_hat,
                   const std::vector<ComplexVec>& modes, double tau);

namespace detail {

/// In-place Gauss-Seidel update of mode k given the running sum of all modes.
/// `bias` is added as bias/2 (the dual variable or its learned replacement).
/// Both engines call this so their sweeps are arithmetically identical.
void update_mode_in_place(std::span<const Complex> f_hat, std::span<Complex> sum,
                          std::span<Complex> mode, std::span<const Complex> bias, double alpha,
                          double center, std::span<const double> grid);

}  // namespace detail

/// Iterate state of the ADMM loop on the one-sided grid.
struct SweepState {
  std::vector<ComplexVec> modes;
  RealVec omegas;
  ComplexVec lambda_hat;
  std::size_t stalls = 0;
  std::size_t mode_updates = 0;

  static SweepState initial(std::size_t modes, std::size_t grid_length, OmegaInit init);
};

/// One Gauss-Seidel sweep: mode updates k = 0..K-1, then every center
/// frequency. The dual variable is left for lambda_update.
void sweep(std::span<const Complex> f_hat, std::span<const double> grid, double alpha, SweepState& state);

struct SpectralModes {
  std::vector<ComplexVec> modes;
  RealVec omegas;
  std::size_t iterations_used = 0;
  bool converged = false;
  std::size_t stalls = 0;
  std::size_t mode_updates = 0;
};

SpectralModes decompose_spectrum(std::span<const Complex> f_hat, const VmdConfig& cfg);

/// Full pipeline: mirror, transform, ADMM loop, back to time domain. Modes are
/// returned sorted by ascending center frequency.
ModeSet vmd_decompose(std::span<const double> signal, const VmdConfig& cfg);
ModeSet vmd_decompose(const signal::TimeSeries& signal, const VmdConfig& cfg);

/// Converts spectral modes to time-domain modes (no reordering).
ModeSet to_time_domain(const SpectralModes& spectral);

void sort_by_frequency(ModeSet& set);

/// ||signal - sum(modes)|| / ||signal||; 0 for an all-zero signal reproduced exactly.
double reconstruction_error(std::span<const double> signal, const std::vector<RealVec>& modes);
double reconstruction_error(std::span<const double> signal, const ModeSet& set);

}  // namespace vmdkit::vmd
