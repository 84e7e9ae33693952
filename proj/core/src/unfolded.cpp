#include "vmdkit/unfolded.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "vmdkit/error.hpp"
#include "vmdkit/softplus.hpp"

namespace vmdkit::unfolded {

Params Params::initial(std::size_t modes, std::size_t depth, std::size_t grid_length, bool shared_alpha,
                       double alpha_init) {
  Params p;
  p.modes = modes;
  p.depth = depth;
  p.grid_length = grid_length;
  p.shared_alpha = shared_alpha;
  p.alpha_raw.assign(shared_alpha ? 1 : modes, softplus_inverse(alpha_init));
  p.multipliers.assign(depth, ComplexVec(grid_length, Complex{}));
  p.validate();
  return p;
}

void Params::validate() const {
  if (modes < 1) throw InvalidConfig("uvmd: modes must be >= 1");
  if (depth < 1 || depth > kMaxDepth) {
    throw InvalidConfig("uvmd: depth must be 1 or 2, got " + std::to_string(depth));
  }
  if (grid_length < 2) throw InvalidConfig("uvmd: grid_length must be >= 2");
  if (alpha_raw.size() != (shared_alpha ? 1 : modes)) throw InvalidConfig("uvmd: alpha_raw has the wrong length");
  for (double a : alpha_raw) {
    if (!std::isfinite(a)) throw NumericFailure("uvmd: non-finite alpha_raw");
  }
  if (multipliers.size() != depth) throw InvalidConfig("uvmd: expected one multiplier per layer");
  for (const auto& h : multipliers) {
    if (h.size() != grid_length) throw InvalidConfig("uvmd: multiplier length does not match grid_length");
    for (const auto& v : h) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw NumericFailure("uvmd: non-finite multiplier");
    }
  }
}

void Params::check_signal_length(std::size_t length) const {
  if (length != grid_length) {
    throw InvalidInput("uvmd parameters were trained for signals of length " + std::to_string(grid_length) +
                       ", got " + std::to_string(length));
  }
}

double Params::bandwidth(std::size_t k) const { return softplus(alpha_raw[shared_alpha ? 0 : k]); }

RealVec Params::bandwidths() const {
  RealVec out(modes);
  for (std::size_t k = 0; k < modes; ++k) out[k] = bandwidth(k);
  return out;
}

std::uint64_t Params::checksum() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  mix(&modes, sizeof modes);
  mix(&depth, sizeof depth);
  mix(&grid_length, sizeof grid_length);
  mix(alpha_raw.data(), alpha_raw.size() * sizeof(double));
  for (const auto& m : multipliers) mix(m.data(), m.size() * sizeof(Complex));
  return h;
}

ForwardTrace forward(std::span<const Complex> f_hat, const Params& params, std::span<const double> omega_init,
                     const ForwardOptions& options) {
  const std::size_t n = f_hat.size(), K = params.modes;
  params.check_signal_length(n);
  if (omega_init.size() != K) throw InvalidInput("uvmd forward: omega_init must have one entry per mode");
  if (options.fixed_centers && options.fixed_centers->size() != params.depth) {
    throw InvalidInput("uvmd forward: fixed centers must cover every layer");
  }
  const RealVec grid = signal::frequency_grid(n);

  ForwardTrace trace;
  trace.modes.assign(K, ComplexVec(n, Complex{}));
  trace.omegas.assign(omega_init.begin(), omega_init.end());
  if (options.keep_numerators) trace.numerators.assign(params.depth, std::vector<ComplexVec>(K));
  ComplexVec sum(n, Complex{});

  for (std::size_t layer = 0; layer < params.depth; ++layer) {
    const RealVec& centers = options.fixed_centers ? (*options.fixed_centers)[layer] : trace.omegas;
    trace.centers.push_back(centers);
    const ComplexVec& bias = params.multipliers[layer];
    for (std::size_t k = 0; k < K; ++k) {
      auto& mode = trace.modes[k];
      if (options.keep_numerators) {
        ComplexVec& x = trace.numerators[layer][k];
        x.resize(n);
        for (std::size_t j = 0; j < n; ++j) x[j] = f_hat[j] - (sum[j] - mode[j]) + bias[j] / 2.0;
      }
      vmd::detail::update_mode_in_place(f_hat, sum, mode, bias, params.bandwidth(k), trace.centers.back()[k], grid);
      ++trace.mode_updates;
    }
    for (std::size_t k = 0; k < K; ++k) {
      for (const auto& v : trace.modes[k]) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
          throw NumericFailure("uvmd forward: non-finite output at layer " + std::to_string(layer) + ", mode " +
                               std::to_string(k));
        }
      }
      if (auto w = vmd::omega_update(trace.modes[k], grid)) {
        trace.omegas[k] = *w;
      } else {
        ++trace.stalls;
      }
    }
  }
  return trace;
}

double reconstruction_loss(std::span<const Complex> f_hat, const std::vector<ComplexVec>& modes) {
  double s = 0.0;
  for (std::size_t j = 0; j < f_hat.size(); ++j) {
    Complex r = f_hat[j];
    for (const auto& m : modes) r -= m[j];
    s += std::norm(r);
  }
  return std::sqrt(s);
}

double relative_reconstruction_loss(std::span<const Complex> f_hat, const std::vector<ComplexVec>& modes) {
  const double base = std::sqrt(signal::energy(f_hat));
  const double loss = reconstruction_loss(f_hat, modes);
  if (base == 0.0) return loss == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return loss / base;
}

Gradients gradients(std::span<const Complex> f_hat, const Params& params, std::span<const double> omega_init) {
  const std::size_t n = f_hat.size(), K = params.modes;
  ForwardOptions opts;
  opts.keep_numerators = true;

  Gradients g;
  g.trace = forward(f_hat, params, omega_init, opts);
  g.alpha_raw.assign(params.alpha_raw.size(), 0.0);
  g.multipliers.assign(params.depth, ComplexVec(n, Complex{}));

  ComplexVec residual(f_hat.begin(), f_hat.end());
  for (const auto& m : g.trace.modes) {
    for (std::size_t j = 0; j < n; ++j) residual[j] -= m[j];
  }
  g.loss = std::sqrt(signal::energy(residual));
  if (!(g.loss > 0.0)) return g;  // loss is identically zero here; zero subgradient

  // Adjoint of every mode is -r/||r||. `shift` is added lazily to every mode
  // adjoint so that "subtract from all modes but k" stays O(n).
  std::vector<ComplexVec> adj(K, ComplexVec(n, Complex{}));
  ComplexVec shift(n);
  for (std::size_t j = 0; j < n; ++j) shift[j] = -residual[j] / g.loss;

  const RealVec grid = signal::frequency_grid(n);
  for (std::size_t layer = params.depth; layer-- > 0;) {
    const RealVec& centers = g.trace.centers[layer];
    ComplexVec& bias_grad = g.multipliers[layer];
    for (std::size_t k = K; k-- > 0;) {
      const double a = params.bandwidth(k);
      const ComplexVec& x = g.trace.numerators[layer][k];
      double da = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const Complex y = adj[k][j] + shift[j];
        const double d = grid[j] - centers[k];
        const double kern = 1.0 / (1.0 + 2.0 * a * d * d);
        const Complex xbar = kern * y;
        da += (y.real() * x[j].real() + y.imag() * x[j].imag()) * (-2.0 * d * d * kern * kern);
        bias_grad[j] += xbar / 2.0;
        shift[j] -= xbar;
        adj[k][j] = -shift[j];  // mode k was overwritten here: its incoming adjoint is zero
      }
      const std::size_t slot = params.shared_alpha ? 0 : k;
      g.alpha_raw[slot] += da * softplus_derivative(params.alpha_raw[slot]);
    }
  }

  for (std::size_t i = 0; i < g.alpha_raw.size(); ++i) {
    if (!std::isfinite(g.alpha_raw[i])) throw NumericFailure("uvmd: non-finite gradient for alpha_raw[" + std::to_string(i) + "]");
  }
  for (std::size_t l = 0; l < g.multipliers.size(); ++l) {
    for (const auto& v : g.multipliers[l]) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw NumericFailure("uvmd: non-finite gradient for multiplier layer " + std::to_string(l));
      }
    }
  }
  return g;
}

double loss_with_centers(std::span<const Complex> f_hat, const Params& params, std::span<const double> omega_init,
                         const std::vector<RealVec>& centers) {
  ForwardOptions opts;
  opts.fixed_centers = &centers;
  return reconstruction_loss(f_hat, forward(f_hat, params, omega_init, opts).modes);
}

vmd::ModeSet decompose_with(const Params& params, std::span<const double> signal) {
  params.check_signal_length(signal.size());
  const ComplexVec f_hat = signal::analysis(signal);
  const RealVec init = vmd::initial_omegas(params.modes, vmd::OmegaInit::Uniform);
  ForwardTrace trace = forward(f_hat, params, init);

  vmd::SpectralModes spectral;
  spectral.modes = std::move(trace.modes);
  spectral.omegas = std::move(trace.omegas);
  spectral.iterations_used = params.depth;
  spectral.stalls = trace.stalls;
  spectral.mode_updates = trace.mode_updates;
  return vmd::to_time_domain(spectral);
}

vmd::ModeSet decompose_with(const Params& params, const signal::TimeSeries& signal) {
  return decompose_with(params, std::span<const double>(signal.values));
}

}  // namespace vmdkit::unfolded
