#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "edgecalc/circle.hpp"
#include "edgecalc/symbols.hpp"

namespace edgecalc {

inline constexpr int kMatrixCapDefault = 8192;

/// Truncated cylinder [-L, L] x S^1 with a periodic r-grid (n_r a power of
/// two, spacing <= 1/4) and the spectral circle grid in x. The dual r-grid
/// carries rho = m * pi / L for signed modes m in [-n_r/2, n_r/2).
struct CylinderGrid {
  double half_length = 32.0;
  int n_r = 512;
  CircleGrid circle;

  static CylinderGrid make(double half_length, int n_r, int n_modes);

  double dr() const { return 2.0 * half_length / n_r; }
  double r_point(int j) const { return -half_length + j * dr(); }
  int signed_mode(int bin) const { return bin < n_r / 2 ? bin : bin - n_r; }
  double rho_mode(int bin) const { return signed_mode(bin) * M_PI / half_length; }
  int dim() const { return n_r * circle.n_retained(); }
  bool operator==(const CylinderGrid&) const = default;
};

/// Complex grid function u(r_j, x_m), stored as point values (n_r x n_points).
class CylinderFunction {
 public:
  CylinderFunction(CylinderGrid grid, Eigen::MatrixXcd values);
  static CylinderFunction zero(const CylinderGrid& grid);
  /// From an x-mode tensor (n_r x n_retained).
  static CylinderFunction from_x_modes(const CylinderGrid& grid, const Eigen::MatrixXcd& modes);

  const CylinderGrid& grid() const { return grid_; }
  const Eigen::MatrixXcd& values() const { return values_; }
  Eigen::MatrixXcd& values() { return values_; }

  /// Per-row circle coefficients (n_r x n_retained).
  Eigen::MatrixXcd x_modes() const;

 private:
  CylinderGrid grid_;
  Eigen::MatrixXcd values_;
};

/// Gaussian bump times a single circle mode; the standard probe input.
CylinderFunction gaussian_mode(const CylinderGrid& grid, double width, double center, int x_mode,
                               cd amplitude = cd{1.0, 0.0});

// r-direction transforms of x-mode tensors. Forward includes the 1/n_r
// normalization: u_hat(m) = (1/n_r) sum_j u(r_j) exp(-i rho_m r_j).
Eigen::MatrixXcd r_forward(const CylinderGrid& grid, const Eigen::MatrixXcd& x_mode_rows);
Eigen::MatrixXcd r_inverse(const CylinderGrid& grid, const Eigen::MatrixXcd& rho_mode_rows);

/// Finite section of a quantized operator in the tensor Fourier basis,
/// stored blockwise over x-modes when the amplitude is an x-multiplier.
class CylinderOperator {
 public:
  static CylinderOperator block_diagonal(std::vector<Eigen::MatrixXcd> blocks);
  static CylinderOperator dense(Eigen::MatrixXcd entries);
  static CylinderOperator identity_like(const CylinderOperator& shape);

  bool is_block() const { return is_block_; }
  int dim() const;
  int n_blocks() const { return static_cast<int>(blocks_.size()); }

  CylinderOperator multiply(const CylinderOperator& rhs) const;
  CylinderOperator subtract(const CylinderOperator& rhs) const;
  CylinderOperator subtract_identity() const;
  CylinderOperator add_identity() const;
  CylinderOperator inverse() const;  // LU per block / dense

  double spectral_norm() const;
  bool full_column_rank() const;  // rank-revealing QR
  Eigen::MatrixXcd to_dense() const;

 private:
  bool is_block_ = false;
  std::vector<Eigen::MatrixXcd> blocks_;  // one per retained x-mode
  Eigen::MatrixXcd dense_;
};

/// Discrete Kohn-Nirenberg action Op_r(a)(eta) on a grid function.
/// eta must be nonzero for covariable-dependent symbols.
CylinderFunction op_apply(const EdgeSymbol& a, std::span<const double> eta,
                          const CylinderFunction& u);

/// Action of the exact adjoint of the finite section (conjugate transpose),
/// equal to the right-symbol quantization of the pointwise adjoint amplitude.
CylinderFunction op_apply_adjoint(const EdgeSymbol& a, std::span<const double> eta,
                                  const CylinderFunction& v);

/// Finite section in the tensor Fourier basis. Throws when
/// n_r * (2 n_modes + 1) exceeds cap.
CylinderOperator assemble_operator(const EdgeSymbol& a, std::span<const double> eta,
                                   const CylinderGrid& grid, int cap = kMatrixCapDefault);

/// Dense view of the finite section (same cap rule).
OperatorMatrix assemble_matrix(const EdgeSymbol& a, std::span<const double> eta,
                               const CylinderGrid& grid, int cap = kMatrixCapDefault);

double l2_norm_cyl(const CylinderFunction& u);
double weighted_norm_cyl(const CylinderFunction& u, double weight_exponent);
cd l2_inner_cyl(const CylinderFunction& u, const CylinderFunction& v);

/// L^2 operator norm of the finite section.
double operator_norm_cyl(const EdgeSymbol& a, std::span<const double> eta,
                         const CylinderGrid& grid, int cap = kMatrixCapDefault);

/// max over random Schwartz-type pairs of |(Au,v) - (u,A*v)| / (|u||v|).
double adjoint_defect(const EdgeSymbol& a, std::span<const double> eta, const CylinderGrid& grid,
                      int trials, std::uint64_t seed = 2309);

/// pi_{m,s}(u) = max_{alpha+beta<=m} sup_r |[r]^alpha d_r^beta u(r)|_{H^s(X)}.
/// m <= 8 (spectral r-derivatives).
double schwartz_seminorm(const CylinderFunction& u, int m, int s);

struct SeminormProbeRow {
  double width = 0.0;
  double ratio = 0.0;  // pi_{0,0}(A u) / pi_{6, ceil(mu)}(u)
};

struct SeminormProbeReport {
  std::vector<SeminormProbeRow> rows;
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  bool pass = false;
};

/// Ratio probe over Gaussian widths; PASS iff max/min <= spread_bound.
SeminormProbeReport seminorm_ratio_probe(const EdgeSymbol& a, std::span<const double> eta,
                                         const CylinderGrid& grid,
                                         std::span<const double> widths,
                                         double spread_bound = 1e2);

/// Fraction of squared mass at |r| > half_length - margin (periodization probe).
double wraparound_energy(const CylinderFunction& u, double margin);

}  // namespace edgecalc
