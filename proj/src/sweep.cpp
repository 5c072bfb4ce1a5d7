#include "edgecalc/sweep.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>

namespace edgecalc {

FitResult fit_loglog(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 3)
    throw std::invalid_argument("fit_loglog: need at least 3 points");
  const int n = static_cast<int>(xs.size());
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_loglog: degenerate abscissa");
  FitResult fit;
  fit.exponent = sxy / sxx;
  fit.used_rows = n;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dev = std::abs(ys[i] - (my + fit.exponent * (xs[i] - mx)));
    worst = std::max(worst, dev);
  }
  fit.residual = worst;
  return fit;
}

FitResult fit_exponent(std::span<const SweepRow> rows) {
  std::vector<double> xs, ys;
  for (const auto& row : rows) {
    if (row.value > 0.0) {
      xs.push_back(std::log(row.param));
      ys.push_back(std::log(row.value));
    }
  }
  if (xs.empty()) throw std::invalid_argument("fit_exponent: degenerate sweep");
  if (xs.size() < 3) throw std::invalid_argument("fit_exponent: need at least 3 positive rows");
  return fit_loglog(xs, ys);
}

SweepReport make_sweep_report(std::vector<SweepRow> rows) {
  SweepReport report;
  report.rows = std::move(rows);
  std::vector<double> xs, ys;
  for (const auto& row : report.rows) {
    if (row.value > 0.0) {
      xs.push_back(std::log(angle_bracket(row.param)));
      ys.push_back(std::log(row.value));
    } else {
      ++report.zero_rows;
    }
  }
  if (xs.empty()) {
    report.degenerate = true;
    return report;
  }
  if (xs.size() < 3) throw std::invalid_argument("sweep fit refused: fewer than 3 positive points");
  const FitResult fit = fit_loglog(xs, ys);
  report.fitted_exponent = fit.exponent;
  report.fit_residual = fit.residual;
  return report;
}

void parallel_for_index(int n, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

int default_jobs() {
  if (const char* env = std::getenv("EDGECALC_JOBS")) {
    const int j = std::atoi(env);
    if (j >= 1) return j;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

}  // namespace edgecalc
