#include "vmdkit/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "vmdkit/error.hpp"
#include "vmdkit/fft.hpp"

namespace vmdkit::signal {
namespace {

void check_length(std::size_t n) {
  if (n < 4 || n % 2 != 0) {
    throw InvalidInput("signal length must be even and >= 4, got " + std::to_string(n));
  }
}

}  // namespace

TimeSeries make_series(std::string id, RealVec values, double sample_interval) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw InvalidInput("series '" + id + "' has a non-finite value at index " + std::to_string(i));
    }
  }
  bool truncated = false;
  if (values.size() % 2 != 0) {
    values.pop_back();
    truncated = true;
  }
  check_length(values.size());
  if (!(sample_interval > 0.0)) throw InvalidInput("sample_interval must be positive");
  return TimeSeries{std::move(id), std::move(values), sample_interval, truncated};
}

MirroredSignal::MirroredSignal(RealVec values, std::size_t origin_length)
    : values_(std::move(values)), origin_length_(origin_length) {
  if (values_.size() != 2 * origin_length_) {
    throw InvalidInput("mirrored length " + std::to_string(values_.size()) + " is not twice " +
                       std::to_string(origin_length_));
  }
}

Spectrum::Spectrum(ComplexVec coeffs, std::size_t origin_length)
    : coeffs_(std::move(coeffs)), origin_length_(origin_length) {
  if (coeffs_.size() != 2 * origin_length_) {
    throw InvalidInput("spectrum length " + std::to_string(coeffs_.size()) + " is not twice " +
                       std::to_string(origin_length_));
  }
}

double Spectrum::frequency(std::size_t index) const noexcept {
  const auto t = static_cast<double>(origin_length_);
  return (static_cast<double>(index) - t) / (2.0 * t);
}

double Spectrum::symmetry_defect() const {
  const std::size_t t = origin_length_;
  double scale = 0.0, defect = 0.0;
  for (const auto& c : coeffs_) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) return 0.0;
  for (std::size_t j = 0; j < t; ++j) {
    defect = std::max(defect, std::abs(coeffs_[t + j] - std::conj(coeffs_[t - j])));
  }
  return defect / scale;
}

MirroredSignal mirror_extend(std::span<const double> x) {
  check_length(x.size());
  const std::size_t t = x.size(), half = t / 2;
  RealVec out;
  out.reserve(2 * t);
  out.insert(out.end(), std::make_reverse_iterator(x.begin() + half), std::make_reverse_iterator(x.begin()));
  out.insert(out.end(), x.begin(), x.end());
  out.insert(out.end(), std::make_reverse_iterator(x.end()), std::make_reverse_iterator(x.begin() + half));
  return MirroredSignal(std::move(out), t);
}

MirroredSignal mirror_extend(const TimeSeries& series) { return mirror_extend(series.values); }

RealVec unmirror(std::span<const double> mirrored) {
  if (mirrored.size() % 2 != 0) {
    throw InvalidInput("mirrored length must be even, got " + std::to_string(mirrored.size()));
  }
  const std::size_t t = mirrored.size() / 2;
  return RealVec(mirrored.begin() + t / 2, mirrored.begin() + t / 2 + t);
}

Spectrum to_spectrum(const MirroredSignal& mirrored) {
  const std::size_t t = mirrored.origin_length();
  ComplexVec raw = fft::forward(mirrored.values());
  // fftshift: DFT bin j lands at index (j + T) mod 2T.
  ComplexVec centered(2 * t);
  for (std::size_t j = 0; j < 2 * t; ++j) centered[(j + t) % (2 * t)] = raw[j];
  return Spectrum(std::move(centered), t);
}

InverseResult from_spectrum_checked(const Spectrum& spec) {
  const std::size_t t = spec.origin_length(), n = 2 * t;
  const auto c = spec.coeffs();
  ComplexVec natural(n);
  for (std::size_t i = 0; i < n; ++i) natural[(i + t) % n] = c[i];
  ComplexVec time = fft::inverse(natural);

  InverseResult result;
  result.values.resize(n);
  double max_re = 0.0, max_im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    result.values[i] = time[i].real();
    max_re = std::max(max_re, std::abs(time[i].real()));
    max_im = std::max(max_im, std::abs(time[i].imag()));
  }
  result.imag_residue = max_re > 0.0 ? max_im / max_re : max_im;
  return result;
}

RealVec from_spectrum(const Spectrum& spec) { return from_spectrum_checked(spec).values; }

OneSided one_sided(const Spectrum& spec) {
  const std::size_t t = spec.origin_length();
  const auto c = spec.coeffs();
  return OneSided{ComplexVec(c.begin() + t, c.end()), frequency_grid(t)};
}

RealVec frequency_grid(std::size_t origin_length) {
  RealVec grid(origin_length);
  const double denom = 2.0 * static_cast<double>(origin_length);
  for (std::size_t j = 0; j < origin_length; ++j) grid[j] = static_cast<double>(j) / denom;
  return grid;
}

Spectrum from_one_sided(std::span<const Complex> half) {
  const std::size_t t = half.size();
  ComplexVec full(2 * t, Complex{});
  full[t] = Complex(half[0].real(), 0.0);
  for (std::size_t j = 1; j < t; ++j) {
    full[t + j] = half[j];
    full[t - j] = std::conj(half[j]);
  }
  return Spectrum(std::move(full), t);
}

ComplexVec analysis(std::span<const double> values) {
  return one_sided(to_spectrum(mirror_extend(values))).coeffs;
}

RealVec synthesis(std::span<const Complex> half) { return unmirror(from_spectrum(from_one_sided(half))); }

double energy(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

double energy(std::span<const Complex> x) {
  double s = 0.0;
  for (const auto& v : x) s += std::norm(v);
  return s;
}

void SyntheticSpec::validate() const {
  if (tones.empty()) throw InvalidConfig("synthetic spec needs at least one tone");
  for (std::size_t i = 0; i < tones.size(); ++i) {
    const auto& tone = tones[i];
    if (!(tone.frequency > 0.0 && tone.frequency < 0.5)) {
      throw InvalidConfig("tones[" + std::to_string(i) + "].frequency must lie in (0, 0.5)");
    }
    if (i > 0 && !(tone.frequency > tones[i - 1].frequency)) {
      throw InvalidConfig("tone frequencies must be strictly increasing");
    }
  }
  if (!(noise_std >= 0.0)) throw InvalidConfig("noise_std must be >= 0");
  if (length < 4) throw InvalidConfig("synthetic length must be >= 4");
}

TimeSeries gen_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  RealVec values(spec.length, 0.0);
  for (std::size_t t = 0; t < spec.length; ++t) {
    const double tt = static_cast<double>(t);
    for (const auto& tone : spec.tones) {
      values[t] += tone.amplitude * std::cos(2.0 * std::numbers::pi * tone.frequency * tt + tone.phase);
    }
  }
  if (spec.noise_std > 0.0) {
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, spec.noise_std);
    for (auto& v : values) v += noise(rng);
  }
  return make_series(spec.id, std::move(values));
}

}  // namespace vmdkit::signal
