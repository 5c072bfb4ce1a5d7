#include "edgecalc/fft.hpp"

#include <fftw3.h>

#include <cassert>
#include <mutex>
#include <unordered_map>
#include <vector>

namespace edgecalc {

namespace {

// Plan creation is not thread-safe in FFTW; executing a cached plan on
// caller-provided buffers via fftw_execute_dft is.
class PlanCache {
 public:
  fftw_plan get(int n, int sign) {
    const long key = static_cast<long>(n) * 4 + (sign == FFTW_FORWARD ? 0 : 1);
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<cd> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
    fftw_plan p = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(a.data()),
                                   reinterpret_cast<fftw_complex*>(b.data()), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, p);
    return p;
  }

  ~PlanCache() {
    for (auto& [k, p] : plans_) fftw_destroy_plan(p);
  }

 private:
  std::mutex mutex_;
  std::unordered_map<long, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void run(std::span<const cd> in, std::span<cd> out, int sign) {
  assert(in.size() == out.size());
  const int n = static_cast<int>(in.size());
  fftw_plan p = cache().get(n, sign);
  std::vector<cd> tmp(in.begin(), in.end());
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(tmp.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace

void dft_forward(std::span<const cd> in, std::span<cd> out) { run(in, out, FFTW_FORWARD); }
void dft_inverse(std::span<const cd> in, std::span<cd> out) { run(in, out, FFTW_BACKWARD); }

}  // namespace edgecalc
