#include "vmdkit/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "vmdkit/error.hpp"

namespace vmdkit::fft {
namespace {

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

// The FFTW planner is not thread safe; execution of an existing plan on
// fresh arrays is.
fftw_plan plan_for(std::size_t n, int sign) {
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, int>, PlanHandle> cache;

  std::lock_guard lock(mutex);
  auto key = std::make_pair(n, sign);
  if (auto it = cache.find(key); it != cache.end()) return it->second.get();

  ComplexVec scratch_in(n), scratch_out(n);
  fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n),
                                 reinterpret_cast<fftw_complex*>(scratch_in.data()),
                                 reinterpret_cast<fftw_complex*>(scratch_out.data()), sign,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (p == nullptr) throw NumericFailure("fftw could not plan a transform of length " + std::to_string(n));
  cache.emplace(key, PlanHandle(p));
  return p;
}

void execute(std::span<const Complex> in, std::span<Complex> out, int sign) {
  if (in.size() != out.size()) throw InvalidInput("fft: input and output lengths differ");
  if (in.empty()) return;
  fftw_plan p = plan_for(in.size(), sign);
  // FFTW's new-array execute never writes the input for out-of-place plans.
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace

void forward(std::span<const Complex> in, std::span<Complex> out) { execute(in, out, FFTW_FORWARD); }

void inverse(std::span<const Complex> in, std::span<Complex> out) {
  execute(in, out, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(out.size());
  for (auto& v : out) v *= scale;
}

ComplexVec forward(std::span<const double> in) {
  ComplexVec buf(in.begin(), in.end());
  ComplexVec out(in.size());
  forward(buf, out);
  return out;
}

ComplexVec inverse(std::span<const Complex> in) {
  ComplexVec out(in.size());
  inverse(in, out);
  return out;
}

}  // namespace vmdkit::fft
