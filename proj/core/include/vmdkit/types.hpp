#pragma once

#include <complex>
#include <vector>

namespace vmdkit {

using Complex = std::complex<double>;
using RealVec = std::vector<double>;
using ComplexVec = std::vector<Complex>;

}  // namespace vmdkit
