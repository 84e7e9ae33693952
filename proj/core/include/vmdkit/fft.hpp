#pragma once

#include <span>

#include "vmdkit/types.hpp"

namespace vmdkit::fft {

// Thin wrappers over FFTW. Plans are cached per length and shared between
// threads; execution is reentrant.
//
// Convention: forward is unnormalized, inverse carries the 1/n factor.
void forward(std::span<const Complex> in, std::span<Complex> out);
void inverse(std::span<const Complex> in, std::span<Complex> out);

ComplexVec forward(std::span<const double> in);
ComplexVec inverse(std::span<const Complex> in);

}  // namespace vmdkit::fft
