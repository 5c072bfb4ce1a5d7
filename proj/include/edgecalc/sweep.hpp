#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace edgecalc {

inline double angle_bracket(double t) { return std::sqrt(1.0 + t * t); }

struct SweepRow {
  double param = 0.0;  // raw parameter magnitude (|lambda| or |eta|)
  double value = 0.0;  // measured norm / defect / ratio
};

struct FitResult {
  double exponent = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();  // max |log deviation|
  int used_rows = 0;
};

/// Ordinary least squares of log(value) against the given log-abscissas.
FitResult fit_loglog(std::span<const double> log_params, std::span<const double> log_values);

/// Fit against log(param) directly (the `fit` CLI path). Zero-value rows are
/// excluded; fewer than 3 positive rows or an all-zero sweep is refused.
FitResult fit_exponent(std::span<const SweepRow> rows);

/// Parameter-dependent family sweeps fit against log<param> so that families
/// with exact <param>-power norms fit with zero residual.
struct SweepReport {
  std::vector<SweepRow> rows;
  double fitted_exponent = std::numeric_limits<double>::quiet_NaN();
  double fit_residual = std::numeric_limits<double>::quiet_NaN();
  int zero_rows = 0;
  bool degenerate = false;  // every row was zero; no fit
  bool pass = false;        // set by the experiment that owns the report

  bool has_fit() const { return !degenerate && std::isfinite(fitted_exponent); }
};

/// Assembles a report from measured rows; fits log(value) vs log<param>.
SweepReport make_sweep_report(std::vector<SweepRow> rows);

/// Evaluates fn(i) for i in [0, n) on up to `jobs` threads; results land in
/// index order. fn must be pure.
void parallel_for_index(int n, int jobs, const std::function<void(int)>& fn);

/// --jobs default: EDGECALC_JOBS if set, else hardware concurrency.
int default_jobs();

}  // namespace edgecalc
