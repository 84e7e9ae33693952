#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vmdkit/types.hpp"

namespace vmdkit::signal {

/// One node's real-valued series. Construct through make_series(), which
/// enforces finiteness, T >= 4 and even T (odd inputs lose their last sample).
struct TimeSeries {
  std::string id;
  RealVec values;
  double sample_interval = 1.0;
  bool truncated = false;

  std::size_t size() const noexcept { return values.size(); }
};

TimeSeries make_series(std::string id, RealVec values, double sample_interval = 1.0);

/// Half-reflected extension of a length-T signal to length 2T:
///   [reverse(x[0, T/2)), x, reverse(x[T/2, T))]
class MirroredSignal {
 public:
  MirroredSignal(RealVec values, std::size_t origin_length);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t origin_length() const noexcept { return origin_length_; }

 private:
  RealVec values_;
  std::size_t origin_length_;
};

/// 2T-point DFT of a mirrored signal in centered order: index t holds
/// normalized frequency (t - T) / (2T), so index T is DC and the upper half
/// [T, 2T) is the nonnegative-frequency grid.
class Spectrum {
 public:
  Spectrum(ComplexVec coeffs, std::size_t origin_length);

  std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  std::size_t origin_length() const noexcept { return origin_length_; }
  double frequency(std::size_t index) const noexcept;

  /// Largest |c[T+j] - conj(c[T-j])| relative to the largest coefficient.
  double symmetry_defect() const;

 private:
  ComplexVec coeffs_;
  std::size_t origin_length_;
};

/// Nonnegative-frequency half of a spectrum: coeffs[j] sits at grid[j] = j/(2T).
struct OneSided {
  ComplexVec coeffs;
  RealVec grid;
};

MirroredSignal mirror_extend(std::span<const double> values);
MirroredSignal mirror_extend(const TimeSeries& series);
RealVec unmirror(std::span<const double> mirrored);

Spectrum to_spectrum(const MirroredSignal& mirrored);

struct InverseResult {
  RealVec values;
  double imag_residue = 0.0;  // max |imag| relative to max |real|, before discarding
};
InverseResult from_spectrum_checked(const Spectrum& spec);
RealVec from_spectrum(const Spectrum& spec);

OneSided one_sided(const Spectrum& spec);
RealVec frequency_grid(std::size_t origin_length);

/// Rebuilds the conjugate-symmetric 2T spectrum from its nonnegative half.
/// The Nyquist bin is not represented on the one-sided grid and is set to 0.
Spectrum from_one_sided(std::span<const Complex> half);

/// Convenience pipelines used by both decomposers.
ComplexVec analysis(std::span<const double> values);            // mirror -> DFT -> one-sided
RealVec synthesis(std::span<const Complex> half);               // symmetrize -> inverse -> unmirror

double energy(std::span<const double> x);
double energy(std::span<const Complex> x);

struct Tone {
  double frequency = 0.0;  // normalized, in (0, 0.5)
  double amplitude = 1.0;
  double phase = 0.0;
};

struct SyntheticSpec {
  std::vector<Tone> tones;
  double noise_std = 0.0;
  std::size_t length = 0;
  std::uint64_t seed = 0;
  std::string id = "synthetic";

  void validate() const;
};

TimeSeries gen_synthetic(const SyntheticSpec& spec);

}  // namespace vmdkit::signal
