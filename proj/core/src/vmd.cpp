#include "vmdkit/vmd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "vmdkit/error.hpp"

namespace vmdkit::vmd {

void VmdConfig::validate() const {
  if (modes < 1) throw InvalidConfig("vmd.modes must be >= 1");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidConfig("vmd.alpha must be > 0");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw InvalidConfig("vmd.tau must be >= 0");
  if (!(tol > 0.0)) throw InvalidConfig("vmd.tol must be > 0");
  if (max_iter < 1) throw InvalidConfig("vmd.max_iter must be >= 1");
}

RealVec initial_omegas(std::size_t modes, OmegaInit init) {
  RealVec omegas(modes, 0.0);
  if (init == OmegaInit::Uniform) {
    for (std::size_t k = 0; k < modes; ++k) {
      omegas[k] = (static_cast<double>(k) + 0.5) * 0.5 / static_cast<double>(modes);
    }
  }
  return omegas;
}

ComplexVec mode_update(std::span<const Complex> f_hat, const std::vector<ComplexVec>& modes,
                       std::span<const Complex> lambda_hat, std::size_t k, double alpha, double omega_k,
                       std::span<const double> grid) {
  if (!(alpha > 0.0)) throw InvalidConfig("mode_update: alpha must be > 0");
  if (k >= modes.size()) throw InvalidInput("mode_update: mode index out of range");
  const std::size_t n = f_hat.size();
  if (grid.size() != n || lambda_hat.size() != n) throw InvalidInput("mode_update: grid/lambda length mismatch");
  for (const auto& m : modes) {
    if (m.size() != n) throw InvalidInput("mode_update: mode length mismatch");
  }
  ComplexVec out(n);
  for (std::size_t j = 0; j < n; ++j) {
    Complex residual = f_hat[j];
    for (std::size_t i = 0; i < modes.size(); ++i) {
      if (i != k) residual -= modes[i][j];
    }
    out[j] = (residual + lambda_hat[j] / 2.0) * wiener_kernel(alpha, grid[j], omega_k);
  }
  return out;
}

std::optional<double> omega_update(std::span<const Complex> mode_hat, std::span<const double> grid) {
  if (grid.size() != mode_hat.size()) throw InvalidInput("omega_update: grid length mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < mode_hat.size(); ++j) {
    const double p = std::norm(mode_hat[j]);
    num += grid[j] * p;
    den += p;
  }
  if (!(den > 0.0)) return std::nullopt;
  return num / den;
}

void lambda_update(std::span<Complex> lambda_hat, std::span<const Complex> f_hat,
                   const std::vector<ComplexVec>& modes, double tau) {
  if (tau == 0.0) return;
  for (std::size_t j = 0; j < lambda_hat.size(); ++j) {
    Complex residual = f_hat[j];
    for (const auto& m : modes) residual -= m[j];
    lambda_hat[j] += tau * residual;
  }
}

namespace detail {

void update_mode_in_place(std::span<const Complex> f_hat, std::span<Complex> sum, std::span<Complex> mode,
                          std::span<const Complex> bias, double alpha, double center,
                          std::span<const double> grid) {
  const std::size_t n = f_hat.size();
  for (std::size_t j = 0; j < n; ++j) {
    const Complex others = sum[j] - mode[j];
    const double d = grid[j] - center;
    const Complex updated = (f_hat[j] - others + bias[j] / 2.0) / (1.0 + 2.0 * alpha * d * d);
    mode[j] = updated;
    sum[j] = others + updated;
  }
}

}  // namespace detail

SweepState SweepState::initial(std::size_t modes, std::size_t grid_length, OmegaInit init) {
  SweepState s;
  s.modes.assign(modes, ComplexVec(grid_length, Complex{}));
  s.omegas = initial_omegas(modes, init);
  s.lambda_hat.assign(grid_length, Complex{});
  return s;
}

namespace {

ComplexVec mode_sum(const std::vector<ComplexVec>& modes, std::size_t n) {
  ComplexVec sum(n, Complex{});
  for (const auto& m : modes) {
    for (std::size_t j = 0; j < n; ++j) sum[j] += m[j];
  }
  return sum;
}

}  // namespace

void sweep(std::span<const Complex> f_hat, std::span<const double> grid, double alpha, SweepState& state) {
  const std::size_t n = f_hat.size();
  ComplexVec sum = mode_sum(state.modes, n);
  for (std::size_t k = 0; k < state.modes.size(); ++k) {
    detail::update_mode_in_place(f_hat, sum, state.modes[k], state.lambda_hat, alpha, state.omegas[k], grid);
    ++state.mode_updates;
  }
  for (std::size_t k = 0; k < state.modes.size(); ++k) {
    if (auto w = omega_update(state.modes[k], grid)) {
      state.omegas[k] = *w;
    } else {
      ++state.stalls;
    }
  }
}

SpectralModes decompose_spectrum(std::span<const Complex> f_hat, const VmdConfig& cfg) {
  cfg.validate();
  const std::size_t n = f_hat.size();
  const RealVec grid = signal::frequency_grid(n);
  SweepState state = SweepState::initial(cfg.modes, n, cfg.omega_init);

  SpectralModes result;
  std::vector<ComplexVec> previous;
  for (std::size_t iter = 1; iter <= cfg.max_iter; ++iter) {
    previous = state.modes;
    sweep(f_hat, grid, cfg.alpha, state);
    lambda_update(state.lambda_hat, f_hat, state.modes, cfg.tau);

    double change = 0.0;
    for (std::size_t k = 0; k < cfg.modes; ++k) {
      double diff = 0.0, base = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        diff += std::norm(state.modes[k][j] - previous[k][j]);
        base += std::norm(previous[k][j]);
      }
      if (base > 0.0) {
        change += diff / base;
      } else if (diff > 0.0) {
        change = std::numeric_limits<double>::infinity();
      }
      if (std::isnan(diff) || !std::isfinite(state.omegas[k])) {
        throw NumericFailure("vmd: non-finite mode " + std::to_string(k) + " at iteration " + std::to_string(iter));
      }
    }
    result.iterations_used = iter;
    if (change < cfg.tol) {
      result.converged = true;
      break;
    }
  }
  result.modes = std::move(state.modes);
  result.omegas = std::move(state.omegas);
  result.stalls = state.stalls;
  result.mode_updates = state.mode_updates;
  return result;
}

ModeSet to_time_domain(const SpectralModes& spectral) {
  ModeSet set;
  set.modes.reserve(spectral.modes.size());
  for (const auto& m : spectral.modes) set.modes.push_back(signal::synthesis(m));
  set.omegas = spectral.omegas;
  set.iterations_used = spectral.iterations_used;
  set.converged = spectral.converged;
  set.stalls = spectral.stalls;
  set.mode_updates = spectral.mode_updates;
  return set;
}

void sort_by_frequency(ModeSet& set) {
  std::vector<std::size_t> order(set.modes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return set.omegas[a] < set.omegas[b]; });
  std::vector<RealVec> modes;
  RealVec omegas;
  for (auto i : order) {
    modes.push_back(std::move(set.modes[i]));
    omegas.push_back(set.omegas[i]);
  }
  set.modes = std::move(modes);
  set.omegas = std::move(omegas);
}

ModeSet vmd_decompose(std::span<const double> signal, const VmdConfig& cfg) {
  cfg.validate();
  const ComplexVec f_hat = signal::analysis(signal);
  ModeSet set = to_time_domain(decompose_spectrum(f_hat, cfg));
  for (std::size_t k = 0; k < set.modes.size(); ++k) {
    for (double v : set.modes[k]) {
      if (!std::isfinite(v)) {
        throw NumericFailure("vmd: non-finite time-domain mode " + std::to_string(k) + " at iteration " +
                             std::to_string(set.iterations_used));
      }
    }
  }
  sort_by_frequency(set);
  return set;
}

ModeSet vmd_decompose(const signal::TimeSeries& signal, const VmdConfig& cfg) {
  return vmd_decompose(std::span<const double>(signal.values), cfg);
}

double reconstruction_error(std::span<const double> signal, const std::vector<RealVec>& modes) {
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < signal.size(); ++t) {
    double s = 0.0;
    for (const auto& m : modes) {
      if (m.size() != signal.size()) throw InvalidInput("reconstruction_error: mode length mismatch");
      s += m[t];
    }
    num += (signal[t] - s) * (signal[t] - s);
    den += signal[t] * signal[t];
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(num / den);
}

double reconstruction_error(std::span<const double> signal, const ModeSet& set) {
  return reconstruction_error(signal, set.modes);
}

}  // namespace vmdkit::vmd
