#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace radonlab::detail {
namespace {

// FFTW planning is not thread-safe; execution with new-array execute is.
class PlanCache {
public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_)
      fftw_destroy_plan(plan);
  }

  fftw_plan get(int rank, int n, bool inverse) {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto key = std::make_tuple(rank, n, inverse);
    if (auto it = plans_.find(key); it != plans_.end())
      return it->second;
    const size_t total = rank == 1 ? static_cast<size_t>(n) : static_cast<size_t>(n) * n;
    std::vector<std::complex<double>> scratch(total);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    const int sign = inverse ? FFTW_BACKWARD : FFTW_FORWARD;
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = rank == 1 ? fftw_plan_dft_1d(n, buf, buf, sign, flags)
                               : fftw_plan_dft_2d(n, n, buf, buf, sign, flags);
    plans_.emplace(key, plan);
    return plan;
  }

private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, bool>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

} // namespace

void fft_inplace(std::span<std::complex<double>> data, bool inverse) {
  if (data.size() <= 1)
    return;
  fftw_plan plan = cache().get(1, static_cast<int>(data.size()), inverse);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, buf, buf);
}

void fft2_inplace(std::span<std::complex<double>> data, int n, bool inverse) {
  fftw_plan plan = cache().get(2, n, inverse);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, buf, buf);
}

} // namespace radonlab::detail
