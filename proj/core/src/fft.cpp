#include "mitf/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "mitf/errors.hpp"

namespace mitf {

namespace {

struct PlanCache {
  std::mutex mu;
  std::map<std::pair<size_t, int>, fftw_plan> plans;

  fftw_plan get(size_t n, int sign) {
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(n, sign);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    // Plan on scratch buffers; executed later with the new-array interface.
    fftw_complex* buf = fftw_alloc_complex(n);
    fftw_plan p = fftw_plan_dft_1d(int(n), buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (!p) raise(Errc::Internal, "fftw plan failed");
    plans.emplace(key, p);
    return p;
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace

void fft(std::vector<std::complex<double>>& data, bool inverse) {
  size_t n = data.size();
  if (n == 0) return;
  if ((n & (n - 1)) != 0) raise(Errc::ConfigInvalid, "fft size must be a power of two");
  fftw_plan p = cache().get(n, inverse ? FFTW_BACKWARD : FFTW_FORWARD);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(p, ptr, ptr);
  if (inverse) {
    double s = 1.0 / double(n);
    for (auto& z : data) z *= s;
  }
}

std::vector<std::complex<double>> fft_copy(const std::vector<std::complex<double>>& data,
                                           bool inverse) {
  auto out = data;
  fft(out, inverse);
  return out;
}

}  // namespace mitf
