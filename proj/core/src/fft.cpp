#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "kflow/error.hpp"

namespace kflow::detail {
namespace {

struct PlanCache {
  std::mutex mutex;
  std::map<std::tuple<int, int, int>, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }

  fftw_plan get(int rows, int cols, int sign) {
    std::lock_guard lock(mutex);
    const auto key = std::make_tuple(rows, cols, sign);
    if (auto it = plans.find(key); it != plans.end()) return it->second;
    // Planning with FFTW_ESTIMATE does not touch the buffers' contents.
    std::vector<std::complex<double>> a(static_cast<std::size_t>(rows) * cols);
    std::vector<std::complex<double>> b(a.size());
    auto* pa = reinterpret_cast<fftw_complex*>(a.data());
    auto* pb = reinterpret_cast<fftw_complex*>(b.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = rows == 1 ? fftw_plan_dft_1d(cols, pa, pb, sign, flags)
                               : fftw_plan_dft_2d(rows, cols, pa, pb, sign, flags);
    if (plan == nullptr) throw NumericalError("fftw: plan creation failed");
    plans.emplace(key, plan);
    return plan;
  }
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void dft2d(int rows, int cols, std::span<const std::complex<double>> in,
           std::span<std::complex<double>> out, int sign) {
  const auto n = static_cast<std::size_t>(rows) * cols;
  if (in.size() != n || out.size() != n) throw ValidationError("fft: buffer size mismatch");
  fftw_plan plan = cache().get(rows, cols, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
  if (in.data() == out.data()) {
    std::vector<std::complex<double>> copy(in.begin(), in.end());
    dft2d(rows, cols, copy, out, sign);
    return;
  }
  // FFTW never writes through the input pointer for out-of-place c2c plans.
  auto* pin = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data()));
  fftw_execute_dft(plan, pin, reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace kflow::detail
