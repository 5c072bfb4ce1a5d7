#include "edgecalc/cylinder.hpp"

#include <Eigen/QR>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "edgecalc/bracket.hpp"
#include "edgecalc/fft.hpp"
#include "edgecalc/rng.hpp"

namespace edgecalc {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void check_eta(const EdgeSymbol& a, std::span<const double> eta) {
  if (static_cast<int>(eta.size()) != a.q())
    throw std::invalid_argument("eta dimension does not match symbol");
  double mag = 0.0;
  for (double e : eta) mag += e * e;
  if (mag == 0.0 && a.covariable_dependent())
    throw std::invalid_argument("eta = 0 rejected for edge-degenerate symbols");
}

}  // namespace

CylinderGrid CylinderGrid::make(double half_length, int n_r, int n_modes) {
  if (!(half_length > 0.0)) throw std::invalid_argument("CylinderGrid: half_length must be positive");
  if (!power_of_two(n_r) || n_r < 4)
    throw std::invalid_argument("CylinderGrid: n_r must be a power of two >= 4");
  CylinderGrid grid;
  grid.half_length = half_length;
  grid.n_r = n_r;
  grid.circle = make_circle_grid(n_modes);
  if (grid.dr() > 0.25 + 1e-12)
    throw std::invalid_argument("CylinderGrid: spacing 2L/n_r must be <= 0.25");
  return grid;
}

CylinderFunction::CylinderFunction(CylinderGrid grid, Eigen::MatrixXcd values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.rows() != grid_.n_r || values_.cols() != grid_.circle.n_points)
    throw std::invalid_argument("CylinderFunction: value shape does not match grid");
}

CylinderFunction CylinderFunction::zero(const CylinderGrid& grid) {
  return CylinderFunction(grid, Eigen::MatrixXcd::Zero(grid.n_r, grid.circle.n_points));
}

CylinderFunction CylinderFunction::from_x_modes(const CylinderGrid& grid,
                                                const Eigen::MatrixXcd& modes) {
  if (modes.rows() != grid.n_r || modes.cols() != grid.circle.n_retained())
    throw std::invalid_argument("from_x_modes: shape does not match grid");
  Eigen::MatrixXcd values(grid.n_r, grid.circle.n_points);
  for (int j = 0; j < grid.n_r; ++j)
    values.row(j) = circle_values(grid.circle, modes.row(j).transpose()).transpose();
  return CylinderFunction(grid, std::move(values));
}

Eigen::MatrixXcd CylinderFunction::x_modes() const {
  Eigen::MatrixXcd modes(grid_.n_r, grid_.circle.n_retained());
  std::vector<cd> row(static_cast<std::size_t>(grid_.circle.n_points));
  for (int j = 0; j < grid_.n_r; ++j) {
    for (int m = 0; m < grid_.circle.n_points; ++m) row[static_cast<std::size_t>(m)] = values_(j, m);
    modes.row(j) = circle_coefficients(grid_.circle, row).transpose();
  }
  return modes;
}

CylinderFunction gaussian_mode(const CylinderGrid& grid, double width, double center, int x_mode,
                               cd amplitude) {
  if (std::abs(x_mode) > grid.circle.n_modes)
    throw std::invalid_argument("gaussian_mode: x mode outside retained band");
  Eigen::MatrixXcd values(grid.n_r, grid.circle.n_points);
  for (int j = 0; j < grid.n_r; ++j) {
    const double r = grid.r_point(j);
    const double bump = std::exp(-(r - center) * (r - center) / (2.0 * width * width));
    for (int m = 0; m < grid.circle.n_points; ++m) {
      values(j, m) = amplitude * bump * std::exp(cd{0.0, 1.0} * (x_mode * grid.circle.point(m)));
    }
  }
  return CylinderFunction(grid, std::move(values));
}

Eigen::MatrixXcd r_forward(const CylinderGrid& grid, const Eigen::MatrixXcd& rows) {
  const int n = grid.n_r;
  Eigen::MatrixXcd out(n, rows.cols());
  std::vector<cd> in(static_cast<std::size_t>(n)), bins(static_cast<std::size_t>(n));
  for (int c = 0; c < rows.cols(); ++c) {
    for (int j = 0; j < n; ++j) in[static_cast<std::size_t>(j)] = rows(j, c);
    dft_forward(in, bins);
    for (int b = 0; b < n; ++b) {
      const double sign = (grid.signed_mode(b) % 2 == 0) ? 1.0 : -1.0;
      out(b, c) = sign * bins[static_cast<std::size_t>(b)] / static_cast<double>(n);
    }
  }
  return out;
}

Eigen::MatrixXcd r_inverse(const CylinderGrid& grid, const Eigen::MatrixXcd& rows) {
  const int n = grid.n_r;
  Eigen::MatrixXcd out(n, rows.cols());
  std::vector<cd> in(static_cast<std::size_t>(n)), vals(static_cast<std::size_t>(n));
  for (int c = 0; c < rows.cols(); ++c) {
    for (int b = 0; b < n; ++b) {
      const double sign = (grid.signed_mode(b) % 2 == 0) ? 1.0 : -1.0;
      in[static_cast<std::size_t>(b)] = sign * rows(b, c);
    }
    dft_inverse(in, vals);
    for (int j = 0; j < n; ++j) out(j, c) = vals[static_cast<std::size_t>(j)];
  }
  return out;
}

// ---- operator container ------------------------------------------------------

CylinderOperator CylinderOperator::block_diagonal(std::vector<Eigen::MatrixXcd> blocks) {
  CylinderOperator op;
  op.is_block_ = true;
  op.blocks_ = std::move(blocks);
  return op;
}

CylinderOperator CylinderOperator::dense(Eigen::MatrixXcd entries) {
  CylinderOperator op;
  op.is_block_ = false;
  op.dense_ = std::move(entries);
  return op;
}

CylinderOperator CylinderOperator::identity_like(const CylinderOperator& shape) {
  if (shape.is_block_) {
    std::vector<Eigen::MatrixXcd> blocks;
    for (const auto& b : shape.blocks_)
      blocks.push_back(Eigen::MatrixXcd::Identity(b.rows(), b.cols()));
    return block_diagonal(std::move(blocks));
  }
  return dense(Eigen::MatrixXcd::Identity(shape.dense_.rows(), shape.dense_.cols()));
}

int CylinderOperator::dim() const {
  if (!is_block_) return static_cast<int>(dense_.rows());
  int d = 0;
  for (const auto& b : blocks_) d += static_cast<int>(b.rows());
  return d;
}

CylinderOperator CylinderOperator::multiply(const CylinderOperator& rhs) const {
  if (is_block_ && rhs.is_block_) {
    if (blocks_.size() != rhs.blocks_.size())
      throw std::invalid_argument("CylinderOperator: block count mismatch");
    std::vector<Eigen::MatrixXcd> blocks(blocks_.size());
    for (std::size_t i = 0; i < blocks_.size(); ++i) blocks[i] = blocks_[i] * rhs.blocks_[i];
    return block_diagonal(std::move(blocks));
  }
  return dense(to_dense() * rhs.to_dense());
}

CylinderOperator CylinderOperator::subtract(const CylinderOperator& rhs) const {
  if (is_block_ && rhs.is_block_) {
    if (blocks_.size() != rhs.blocks_.size())
      throw std::invalid_argument("CylinderOperator: block count mismatch");
    std::vector<Eigen::MatrixXcd> blocks(blocks_.size());
    for (std::size_t i = 0; i < blocks_.size(); ++i) blocks[i] = blocks_[i] - rhs.blocks_[i];
    return block_diagonal(std::move(blocks));
  }
  return dense(to_dense() - rhs.to_dense());
}

CylinderOperator CylinderOperator::subtract_identity() const {
  return subtract(identity_like(*this));
}

CylinderOperator CylinderOperator::add_identity() const {
  CylinderOperator id = identity_like(*this);
  if (is_block_) {
    std::vector<Eigen::MatrixXcd> blocks(blocks_.size());
    for (std::size_t i = 0; i < blocks_.size(); ++i) blocks[i] = blocks_[i] + id.blocks_[i];
    return block_diagonal(std::move(blocks));
  }
  return dense(dense_ + id.dense_);
}

CylinderOperator CylinderOperator::inverse() const {
  if (is_block_) {
    std::vector<Eigen::MatrixXcd> blocks(blocks_.size());
    for (std::size_t i = 0; i < blocks_.size(); ++i)
      blocks[i] = blocks_[i].partialPivLu().inverse();
    return block_diagonal(std::move(blocks));
  }
  return dense(dense_.partialPivLu().inverse());
}

double CylinderOperator::spectral_norm() const {
  if (is_block_) {
    double best = 0.0;
    for (const auto& b : blocks_) best = std::max(best, edgecalc::spectral_norm(b));
    return best;
  }
  return edgecalc::spectral_norm(dense_);
}

bool CylinderOperator::full_column_rank() const {
  const auto check = [](const Eigen::MatrixXcd& m) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(m);
    return qr.rank() == m.cols();
  };
  if (is_block_) {
    for (const auto& b : blocks_)
      if (!check(b)) return false;
    return true;
  }
  return check(dense_);
}

Eigen::MatrixXcd CylinderOperator::to_dense() const {
  if (!is_block_) return dense_;
  // interleaved layout: flat index = bin * n_x + mode index
  const int n_x = static_cast<int>(blocks_.size());
  const int n_r = static_cast<int>(blocks_.empty() ? 0 : blocks_[0].rows());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n_r * n_x, n_r * n_x);
  for (int m = 0; m < n_x; ++m)
    for (int b2 = 0; b2 < n_r; ++b2)
      for (int b1 = 0; b1 < n_r; ++b1)
        out(b1 * n_x + m, b2 * n_x + m) = blocks_[static_cast<std::size_t>(m)](b1, b2);
  return out;
}

// ---- quantized application ----------------------------------------------------

CylinderFunction op_apply(const EdgeSymbol& a, std::span<const double> eta,
                          const CylinderFunction& u) {
  check_eta(a, eta);
  const CylinderGrid& grid = u.grid();
  const int n_r = grid.n_r;
  const int n_x = grid.circle.n_retained();
  const Eigen::MatrixXcd uhat = r_forward(grid, u.x_modes());

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n_r, n_x);
  const bool mult = a.multiplier();
  std::vector<double> eta_t(eta.size());
  for (int j = 0; j < n_r; ++j) {
    const double r = grid.r_point(j);
    const double br = bracket(r);
    for (std::size_t i = 0; i < eta.size(); ++i) eta_t[i] = br * eta[i];
    for (int b = 0; b < n_r; ++b) {
      const double rho = grid.rho_mode(b);
      const cd phase = std::exp(cd{0.0, 1.0} * (rho * r));
      if (mult) {
        for (int m = 0; m < n_x; ++m) {
          const double xi = grid.circle.mode_of_index(m);
          const cd q = a.tilde_eval(r, br * rho, eta_t, 0.0, xi);
          out(j, m) += phase * q * uhat(b, m);
        }
      } else {
        CircleSymbol view;
        view.order = a.mu();
        view.param_dim = 0;
        view.is_multiplier = false;
        view.eval = [&](double x, double xi, std::span<const double>) {
          return a.tilde_eval(r, br * rho, eta_t, x, xi);
        };
        const OperatorMatrix q = quantize_circle(grid.circle, view, {});
        out.row(j) += phase * (q.entries * uhat.row(b).transpose()).transpose();
      }
    }
  }
  return CylinderFunction::from_x_modes(grid, out);
}

CylinderFunction op_apply_adjoint(const EdgeSymbol& a, std::span<const double> eta,
                                  const CylinderFunction& v) {
  check_eta(a, eta);
  const CylinderGrid& grid = v.grid();
  const int n_r = grid.n_r;
  const int n_x = grid.circle.n_retained();
  const Eigen::MatrixXcd vrows = v.x_modes();  // values of v per r row, in x modes

  Eigen::MatrixXcd what = Eigen::MatrixXcd::Zero(n_r, n_x);  // indexed by rho bin
  const bool mult = a.multiplier();
  std::vector<double> eta_t(eta.size());
  for (int j = 0; j < n_r; ++j) {
    const double r = grid.r_point(j);
    const double br = bracket(r);
    for (std::size_t i = 0; i < eta.size(); ++i) eta_t[i] = br * eta[i];
    for (int b = 0; b < n_r; ++b) {
      const double rho = grid.rho_mode(b);
      const cd phase = std::exp(cd{0.0, -1.0} * (rho * r)) / static_cast<double>(n_r);
      if (mult) {
        for (int m = 0; m < n_x; ++m) {
          const double xi = grid.circle.mode_of_index(m);
          const cd q = std::conj(a.tilde_eval(r, br * rho, eta_t, 0.0, xi));
          what(b, m) += phase * q * vrows(j, m);
        }
      } else {
        CircleSymbol view;
        view.order = a.mu();
        view.param_dim = 0;
        view.is_multiplier = false;
        view.eval = [&](double x, double xi, std::span<const double>) {
          return a.tilde_eval(r, br * rho, eta_t, x, xi);
        };
        const OperatorMatrix q = quantize_circle(grid.circle, view, {});
        what.row(b) += phase * (q.entries.adjoint() * vrows.row(j).transpose()).transpose();
      }
    }
  }
  return CylinderFunction::from_x_modes(grid, r_inverse(grid, what));
}

// ---- assembly ------------------------------------------------------------------

namespace {

void check_cap(const CylinderGrid& grid, int cap) {
  if (grid.dim() > cap)
    throw std::length_error("matrix cap exceeded: reduce grid or modes");
}

}  // namespace

CylinderOperator assemble_operator(const EdgeSymbol& a, std::span<const double> eta,
                                   const CylinderGrid& grid, int cap) {
  check_eta(a, eta);
  check_cap(grid, cap);
  const int n_r = grid.n_r;
  const int n_x = grid.circle.n_retained();
  std::vector<double> eta_t(eta.size());
  std::vector<double> brs(static_cast<std::size_t>(n_r));
  for (int j = 0; j < n_r; ++j) brs[static_cast<std::size_t>(j)] = bracket(grid.r_point(j));

  if (a.multiplier()) {
    std::vector<Eigen::MatrixXcd> blocks(static_cast<std::size_t>(n_x),
                                         Eigen::MatrixXcd(n_r, n_r));
    std::vector<cd> profile(static_cast<std::size_t>(n_r)), bins(static_cast<std::size_t>(n_r));
    for (int m = 0; m < n_x; ++m) {
      const double xi = grid.circle.mode_of_index(m);
      for (int b = 0; b < n_r; ++b) {
        const double rho = grid.rho_mode(b);
        for (int j = 0; j < n_r; ++j) {
          const double r = grid.r_point(j);
          const double br = brs[static_cast<std::size_t>(j)];
          for (std::size_t i = 0; i < eta.size(); ++i) eta_t[i] = br * eta[i];
          profile[static_cast<std::size_t>(j)] = a.tilde_eval(r, br * rho, eta_t, 0.0, xi);
        }
        dft_forward(profile, bins);
        const int mb = grid.signed_mode(b);
        for (int b1 = 0; b1 < n_r; ++b1) {
          const int k = b1 - b;
          const int bin = ((k % n_r) + n_r) % n_r;
          const int diff = grid.signed_mode(b1) - mb;
          const double sign = (diff % 2 == 0) ? 1.0 : -1.0;
          blocks[static_cast<std::size_t>(m)](b1, b) =
              sign * bins[static_cast<std::size_t>(bin)] / static_cast<double>(n_r);
        }
      }
    }
    return CylinderOperator::block_diagonal(std::move(blocks));
  }

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(grid.dim(), grid.dim());
  // per (r_j, rho_b): circle quantization, then r-DFT per (m', m) entry
  std::vector<Eigen::MatrixXcd> q_slices(static_cast<std::size_t>(n_r));
  std::vector<cd> profile(static_cast<std::size_t>(n_r)), bins(static_cast<std::size_t>(n_r));
  for (int b = 0; b < n_r; ++b) {
    const double rho = grid.rho_mode(b);
    for (int j = 0; j < n_r; ++j) {
      const double r = grid.r_point(j);
      const double br = brs[static_cast<std::size_t>(j)];
      for (std::size_t i = 0; i < eta.size(); ++i) eta_t[i] = br * eta[i];
      CircleSymbol view;
      view.order = a.mu();
      view.param_dim = 0;
      view.is_multiplier = false;
      view.eval = [&](double x, double xi, std::span<const double>) {
        return a.tilde_eval(r, br * rho, eta_t, x, xi);
      };
      q_slices[static_cast<std::size_t>(j)] = quantize_circle(grid.circle, view, {}).entries;
    }
    const int mb = grid.signed_mode(b);
    for (int m1 = 0; m1 < n_x; ++m1) {
      for (int m2 = 0; m2 < n_x; ++m2) {
        for (int j = 0; j < n_r; ++j)
          profile[static_cast<std::size_t>(j)] = q_slices[static_cast<std::size_t>(j)](m1, m2);
        dft_forward(profile, bins);
        for (int b1 = 0; b1 < n_r; ++b1) {
          const int k = b1 - b;
          const int bin = ((k % n_r) + n_r) % n_r;
          const int diff = grid.signed_mode(b1) - mb;
          const double sign = (diff % 2 == 0) ? 1.0 : -1.0;
          out(b1 * n_x + m1, b * n_x + m2) =
              sign * bins[static_cast<std::size_t>(bin)] / static_cast<double>(n_r);
        }
      }
    }
  }
  return CylinderOperator::dense(std::move(out));
}

OperatorMatrix assemble_matrix(const EdgeSymbol& a, std::span<const double> eta,
                               const CylinderGrid& grid, int cap) {
  OperatorMatrix m;
  m.basis = "cylinder-tensor-fourier";
  m.entries = assemble_operator(a, eta, grid, cap).to_dense();
  return m;
}

// ---- norms ---------------------------------------------------------------------

double l2_norm_cyl(const CylinderFunction& u) {
  const Eigen::MatrixXcd modes = u.x_modes();
  return std::sqrt(u.grid().dr() * modes.squaredNorm());
}

double weighted_norm_cyl(const CylinderFunction& u, double weight_exponent) {
  CylinderFunction w = u;
  for (int j = 0; j < u.grid().n_r; ++j)
    w.values().row(j) *= std::pow(bracket(u.grid().r_point(j)), weight_exponent);
  return l2_norm_cyl(w);
}

cd l2_inner_cyl(const CylinderFunction& u, const CylinderFunction& v) {
  if (!(u.grid() == v.grid())) throw std::invalid_argument("l2_inner_cyl: grid mismatch");
  const Eigen::MatrixXcd mu = u.x_modes();
  const Eigen::MatrixXcd mv = v.x_modes();
  return u.grid().dr() * (mv.conjugate().cwiseProduct(mu)).sum();
}

double operator_norm_cyl(const EdgeSymbol& a, std::span<const double> eta,
                         const CylinderGrid& grid, int cap) {
  return assemble_operator(a, eta, grid, cap).spectral_norm();
}

double adjoint_defect(const EdgeSymbol& a, std::span<const double> eta, const CylinderGrid& grid,
                      int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("adjoint_defect: trials must be >= 1");
  CounterRng rng(seed, 0x00adULL);
  const int max_mode = std::min(3, grid.circle.n_modes);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const auto mk = [&](std::uint64_t stream) {
      CylinderFunction f = CylinderFunction::zero(grid);
      for (int piece = 0; piece < 2; ++piece) {
        const std::uint64_t c0 = (static_cast<std::uint64_t>(t) * 8 + stream * 4 +
                                  static_cast<std::uint64_t>(piece)) * 8;
        const double width = rng.range(c0, 1.0, 4.0);
        const double center = rng.range(c0 + 1, -4.0, 4.0);
        const int mode = static_cast<int>(std::round(rng.range(c0 + 2, -max_mode, max_mode)));
        const cd amp{rng.symmetric(c0 + 3), rng.symmetric(c0 + 4)};
        const CylinderFunction g = gaussian_mode(grid, width, center, mode, amp);
        f.values() += g.values();
      }
      return f;
    };
    const CylinderFunction u = mk(0);
    const CylinderFunction v = mk(1);
    const CylinderFunction au = op_apply(a, eta, u);
    const CylinderFunction astar_v = op_apply_adjoint(a, eta, v);
    const cd lhs = l2_inner_cyl(au, v);
    const cd rhs = l2_inner_cyl(u, astar_v);
    const double denom = l2_norm_cyl(u) * l2_norm_cyl(v);
    if (denom > 0.0) worst = std::max(worst, std::abs(lhs - rhs) / denom);
  }
  return worst;
}

// ---- Schwartz seminorms ----------------------------------------------------------

double schwartz_seminorm(const CylinderFunction& u, int m, int s) {
  if (m < 0 || m > 8) throw std::invalid_argument("schwartz_seminorm: derivative order too high");
  const CylinderGrid& grid = u.grid();
  const Eigen::MatrixXcd uhat = r_forward(grid, u.x_modes());
  double best = 0.0;
  for (int beta = 0; beta <= m; ++beta) {
    Eigen::MatrixXcd dhat = uhat;
    for (int b = 0; b < grid.n_r; ++b) {
      const cd factor = std::pow(cd{0.0, 1.0} * grid.rho_mode(b), beta);
      dhat.row(b) *= factor;
    }
    const Eigen::MatrixXcd drows = r_inverse(grid, dhat);
    for (int alpha = 0; alpha + beta <= m; ++alpha) {
      double sup = 0.0;
      for (int j = 0; j < grid.n_r; ++j) {
        const double w = std::pow(bracket(grid.r_point(j)), alpha);
        const double h = sobolev_norm_circle(drows.row(j).transpose(), s);
        sup = std::max(sup, w * h);
      }
      best = std::max(best, sup);
    }
  }
  return best;
}

SeminormProbeReport seminorm_ratio_probe(const EdgeSymbol& a, std::span<const double> eta,
                                         const CylinderGrid& grid,
                                         std::span<const double> widths, double spread_bound) {
  if (widths.empty()) throw std::invalid_argument("seminorm_ratio_probe: no widths");
  SeminormProbeReport report;
  const int s_src = static_cast<int>(std::ceil(a.mu()));
  report.min_ratio = std::numeric_limits<double>::infinity();
  for (double w : widths) {
    const CylinderFunction u = gaussian_mode(grid, w, 0.0, std::min(1, grid.circle.n_modes));
    const CylinderFunction au = op_apply(a, eta, u);
    const double num = schwartz_seminorm(au, 0, 0);
    const double den = schwartz_seminorm(u, 6, s_src);
    const double ratio = num / den;
    report.rows.push_back({w, ratio});
    report.max_ratio = std::max(report.max_ratio, ratio);
    report.min_ratio = std::min(report.min_ratio, ratio);
  }
  report.pass = report.min_ratio > 0.0 && report.max_ratio / report.min_ratio <= spread_bound;
  return report;
}

double wraparound_energy(const CylinderFunction& u, double margin) {
  const CylinderGrid& grid = u.grid();
  double tail = 0.0, total = 0.0;
  for (int j = 0; j < grid.n_r; ++j) {
    const double e = u.values().row(j).squaredNorm();
    total += e;
    if (std::abs(grid.r_point(j)) > grid.half_length - margin) tail += e;
  }
  return total > 0.0 ? tail / total : 0.0;
}

}  // namespace edgecalc
