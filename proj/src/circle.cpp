#include "edgecalc/circle.hpp"

#include <Eigen/SVD>

#include <memory>
#include <stdexcept>

#include "edgecalc/fft.hpp"
#include "edgecalc/powerpoly.hpp"
#include "edgecalc/rng.hpp"

namespace edgecalc {

CircleGrid make_circle_grid(int n_modes) {
  if (n_modes < 1) throw std::invalid_argument("make_circle_grid: need at least one mode");
  CircleGrid grid;
  grid.n_modes = n_modes;
  grid.n_points = 2 * n_modes + 2;
  return grid;
}

Eigen::VectorXcd circle_coefficients(const CircleGrid& grid, std::span<const cd> values) {
  if (static_cast<int>(values.size()) != grid.n_points)
    throw std::invalid_argument("circle_coefficients: value count does not match grid");
  std::vector<cd> bins(values.size());
  dft_forward(values, bins);
  Eigen::VectorXcd modes(grid.n_retained());
  const int n = grid.n_points;
  for (int idx = 0; idx < grid.n_retained(); ++idx) {
    const int xi = grid.mode_of_index(idx);
    const int bin = ((xi % n) + n) % n;
    modes(idx) = bins[static_cast<std::size_t>(bin)] / static_cast<double>(n);
  }
  return modes;
}

Eigen::VectorXcd circle_values(const CircleGrid& grid, const Eigen::VectorXcd& modes) {
  if (modes.size() != grid.n_retained())
    throw std::invalid_argument("circle_values: mode count does not match grid");
  const int n = grid.n_points;
  std::vector<cd> bins(static_cast<std::size_t>(n), cd{0.0, 0.0});
  for (int idx = 0; idx < grid.n_retained(); ++idx) {
    const int xi = grid.mode_of_index(idx);
    const int bin = ((xi % n) + n) % n;
    bins[static_cast<std::size_t>(bin)] = modes(idx);
  }
  std::vector<cd> out(static_cast<std::size_t>(n));
  dft_inverse(bins, out);
  return Eigen::Map<Eigen::VectorXcd>(out.data(), n);
}

double sobolev_norm_circle(const Eigen::VectorXcd& modes, double s) {
  const int n_modes = static_cast<int>((modes.size() - 1) / 2);
  double acc = 0.0;
  for (int idx = 0; idx < modes.size(); ++idx) {
    const double xi = idx - n_modes;
    acc += std::pow(1.0 + xi * xi, s) * std::norm(modes(idx));
  }
  return std::sqrt(acc);
}

OperatorMatrix quantize_circle(const CircleGrid& grid, const CircleSymbol& p,
                               std::span<const double> lambda) {
  if (static_cast<int>(lambda.size()) != p.param_dim)
    throw std::invalid_argument("quantize_circle: lambda dimension mismatch");
  const int nret = grid.n_retained();
  OperatorMatrix m;
  m.basis = "circle-fourier";
  m.entries = Eigen::MatrixXcd::Zero(nret, nret);
  if (p.is_multiplier) {
    for (int c = 0; c < nret; ++c) {
      const double xi = grid.mode_of_index(c);
      m.entries(c, c) = p.eval(0.0, xi, lambda);
    }
    return m;
  }
  const int n = grid.n_points;
  std::vector<cd> col(static_cast<std::size_t>(n)), bins(static_cast<std::size_t>(n));
  for (int c = 0; c < nret; ++c) {
    const double xi = grid.mode_of_index(c);
    for (int j = 0; j < n; ++j) col[static_cast<std::size_t>(j)] = p.eval(grid.point(j), xi, lambda);
    dft_forward(col, bins);
    for (int r = 0; r < nret; ++r) {
      const int k = grid.mode_of_index(r) - grid.mode_of_index(c);
      const int bin = ((k % n) + n) % n;
      m.entries(r, c) = bins[static_cast<std::size_t>(bin)] / static_cast<double>(n);
    }
  }
  return m;
}

CircleSymbol order_reducing_family(double s, int param_dim) {
  const int nvars = 1 + param_dim;  // (xi, lambda_1..lambda_l)
  auto derivs = std::make_shared<PowerPolyDerivs>(PowerPoly::angle_power(nvars, s), 8);
  CircleSymbol sym;
  sym.order = s;
  sym.param_dim = param_dim;
  sym.is_multiplier = true;
  sym.eval = [derivs, nvars](double, double xi, std::span<const double> lambda) -> cd {
    std::vector<double> w(static_cast<std::size_t>(nvars));
    w[0] = xi;
    for (std::size_t i = 0; i < lambda.size(); ++i) w[i + 1] = lambda[i];
    std::vector<int> zero(static_cast<std::size_t>(nvars), 0);
    return derivs->eval(zero, w);
  };
  sym.deriv = [derivs, nvars](int dx, int dxi, std::span<const int> dlambda, double, double xi,
                              std::span<const double> lambda) -> cd {
    if (dx > 0) return cd{0.0, 0.0};
    std::vector<double> w(static_cast<std::size_t>(nvars));
    std::vector<int> order(static_cast<std::size_t>(nvars));
    w[0] = xi;
    order[0] = dxi;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
      w[i + 1] = lambda[i];
      order[i + 1] = dlambda[i];
    }
    return derivs->eval(order, w);
  };
  return sym;
}

namespace {

constexpr int kSpectralNormSvdMaxDim = 600;

bool exactly_diagonal(const Eigen::MatrixXcd& m) {
  for (int c = 0; c < m.cols(); ++c)
    for (int r = 0; r < m.rows(); ++r)
      if (r != c && m(r, c) != cd{0.0, 0.0}) return false;
  return true;
}

// Block subspace iteration with Rayleigh-Ritz on M^H M; deterministic start.
double subspace_norm(const Eigen::MatrixXcd& m) {
  const int n = static_cast<int>(m.cols());
  const int block = std::min(4, n);
  CounterRng rng(0x5eedu, static_cast<std::uint64_t>(n));
  Eigen::MatrixXcd q(n, block);
  for (int c = 0; c < block; ++c)
    for (int r = 0; r < n; ++r) {
      const auto ctr = static_cast<std::uint64_t>(c) * n + r;
      q(r, c) = cd{rng.symmetric(2 * ctr), rng.symmetric(2 * ctr + 1)};
    }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(q);
  q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, block);
  double lam_prev = -1.0;
  for (int it = 0; it < 800; ++it) {
    const Eigen::MatrixXcd y = m.adjoint() * (m * q);
    const Eigen::MatrixXcd b = q.adjoint() * y;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(b);
    const double lam = es.eigenvalues().maxCoeff();
    if (it > 4 && std::abs(lam - lam_prev) <= 1e-13 * std::max(std::abs(lam), 1e-300))
      return std::sqrt(std::max(lam, 0.0));
    lam_prev = lam;
    Eigen::HouseholderQR<Eigen::MatrixXcd> step(y);
    q = step.householderQ() * Eigen::MatrixXcd::Identity(n, block);
  }
  return std::sqrt(std::max(lam_prev, 0.0));
}

}  // namespace

double spectral_norm(const Eigen::MatrixXcd& m) {
  if (m.rows() == 0) return 0.0;
  if (exactly_diagonal(m)) {
    double best = 0.0;
    for (int i = 0; i < m.rows(); ++i) best = std::max(best, std::abs(m(i, i)));
    return best;
  }
  if (m.rows() <= kSpectralNormSvdMaxDim) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues()(0);
  }
  return subspace_norm(m);
}

double operator_norm_circle(const OperatorMatrix& m, const SobolevPair& sp,
                            const CircleGrid& grid) {
  const int nret = grid.n_retained();
  if (m.entries.rows() != nret || m.entries.cols() != nret)
    throw std::invalid_argument("operator_norm_circle: matrix does not match grid");
  Eigen::VectorXd w_out(nret), w_in_inv(nret);
  for (int idx = 0; idx < nret; ++idx) {
    const double xi = grid.mode_of_index(idx);
    w_out(idx) = std::pow(1.0 + xi * xi, sp.s_out / 2.0);
    w_in_inv(idx) = std::pow(1.0 + xi * xi, -sp.s_in / 2.0);
  }
  const Eigen::MatrixXcd weighted =
      w_out.asDiagonal() * m.entries * w_in_inv.asDiagonal();
  return spectral_norm(weighted);
}

namespace {

SweepReport run_family_sweep(const CircleGrid& grid, const CircleSymbol& p,
                             const SobolevPair& sp,
                             std::span<const std::vector<double>> lambda_values, int jobs) {
  if (lambda_values.empty()) throw std::invalid_argument("family sweep: empty lambda list");
  const int n = static_cast<int>(lambda_values.size());
  std::vector<SweepRow> rows(static_cast<std::size_t>(n));
  parallel_for_index(n, jobs, [&](int i) {
    const auto& lam = lambda_values[static_cast<std::size_t>(i)];
    const OperatorMatrix m = quantize_circle(grid, p, lam);
    double mag = 0.0;
    for (double v : lam) mag += v * v;
    rows[static_cast<std::size_t>(i)] = {std::sqrt(mag), operator_norm_circle(m, sp, grid)};
  });
  return make_sweep_report(std::move(rows));
}

}  // namespace

SweepReport family_norm_sweep(const CircleGrid& grid, const CircleSymbol& p,
                              const SobolevPair& sp,
                              std::span<const std::vector<double>> lambda_values, int jobs) {
  return run_family_sweep(grid, p, sp, lambda_values, jobs);
}

CircleSymbol derivative_symbol(const CircleSymbol& p, int direction) {
  if (direction < 0 || direction >= p.param_dim)
    throw std::invalid_argument("derivative_symbol: direction out of range");
  if (!p.deriv) throw std::invalid_argument("derivative_symbol: symbol lacks an oracle");
  CircleSymbol d = p;
  d.order = p.order - 1.0;
  d.eval = [base = p.deriv, direction, l = p.param_dim](double x, double xi,
                                                        std::span<const double> lambda) -> cd {
    std::vector<int> dl(static_cast<std::size_t>(l), 0);
    dl[static_cast<std::size_t>(direction)] = 1;
    return base(0, 0, dl, x, xi, lambda);
  };
  d.deriv = [base = p.deriv, direction](int dx, int dxi, std::span<const int> dlambda, double x,
                                        double xi, std::span<const double> lambda) -> cd {
    std::vector<int> dl(dlambda.begin(), dlambda.end());
    dl[static_cast<std::size_t>(direction)] += 1;
    return base(dx, dxi, dl, x, xi, lambda);
  };
  return d;
}

SweepReport family_derivative_sweep(const CircleGrid& grid, const CircleSymbol& p,
                                    const SobolevPair& sp, int direction,
                                    std::span<const std::vector<double>> lambda_values,
                                    int jobs) {
  const CircleSymbol d = derivative_symbol(p, direction);
  const int n = static_cast<int>(lambda_values.size());
  if (n == 0) throw std::invalid_argument("family sweep: empty lambda list");
  std::vector<SweepRow> rows(static_cast<std::size_t>(n));
  parallel_for_index(n, jobs, [&](int i) {
    const auto& lam = lambda_values[static_cast<std::size_t>(i)];
    const OperatorMatrix m = quantize_circle(grid, d, lam);
    double mag = 0.0;
    for (double v : lam) mag += v * v;
    rows[static_cast<std::size_t>(i)] = {std::sqrt(mag), operator_norm_circle(m, sp, grid)};
  });
  return make_sweep_report(std::move(rows));
}

}  // namespace edgecalc
