#include "ngi/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace ngi::fft {

namespace {

// Plans are created once per (n0, n1, sign) with FFTW_ESTIMATE|FFTW_UNALIGNED,
// so the chosen algorithm depends only on the size, never on runtime
// measurement or buffer alignment. Execution via fftw_execute_dft is
// thread-safe; only creation is locked.
struct PlanCache {
  std::mutex mu;
  std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> plans;

  fftw_plan get(std::size_t n0, std::size_t n1, int sign) {
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(n0, n1, sign);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    std::vector<std::complex<double>> tmp(n0 * (n1 ? n1 : 1));
    auto* buf = reinterpret_cast<fftw_complex*>(tmp.data());
    int fsign = sign > 0 ? FFTW_BACKWARD : FFTW_FORWARD;
    fftw_plan p;
    if (n1 == 0) {
      p = fftw_plan_dft_1d(static_cast<int>(n0), buf, buf, fsign,
                           FFTW_ESTIMATE | FFTW_UNALIGNED);
    } else {
      p = fftw_plan_dft_2d(static_cast<int>(n0), static_cast<int>(n1), buf, buf, fsign,
                           FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    if (!p) throw std::runtime_error("fftw plan creation failed");
    plans.emplace(key, p);
    return p;
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace

void transform(std::complex<double>* data, std::size_t n, int sign) {
  if (n == 0) return;
  fftw_plan p = cache().get(n, 0, sign);
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(p, buf, buf);
}

void transform2d(std::complex<double>* data, std::size_t n0, std::size_t n1, int sign) {
  if (n0 == 0 || n1 == 0) return;
  fftw_plan p = cache().get(n0, n1, sign);
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(p, buf, buf);
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace ngi::fft
