#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "edgecalc/sweep.hpp"

namespace edgecalc {

using cd = std::complex<double>;

// Fourier conventions used throughout:
//   u_hat(xi) = (1/N) sum_j u(x_j) exp(-i xi x_j),   x_j = 2 pi j / N.
// This matches u_hat(xi) = (2 pi)^{-1} integral of u exp(-i x xi); the factor
// 2 pi relating sum |u_hat|^2 to the L^2(S^1) integral is folded into one
// global constant and never appears in operator norms or exponent fits.

/// Spectral grid on S^1 holding modes |xi| <= n_modes on 2*n_modes + 2
/// uniform collocation points.
struct CircleGrid {
  int n_modes = 0;
  int n_points = 0;

  bool operator==(const CircleGrid&) const = default;

  int n_retained() const { return 2 * n_modes + 1; }
  double point(int j) const { return 2.0 * M_PI * j / n_points; }
  int mode_of_index(int idx) const { return idx - n_modes; }
  int index_of_mode(int xi) const { return xi + n_modes; }
};

/// Rejects n_modes < 1 ("need at least one mode").
CircleGrid make_circle_grid(int n_modes);

struct SobolevPair {
  double s_in = 0.0;   // s'
  double s_out = 0.0;  // s''
};

/// Parameter-dependent symbol p(x, xi, lambda) on the circle with a
/// derivative oracle over (x, xi, lambda) multi-indices.
struct CircleSymbol {
  double order = 0.0;
  int param_dim = 0;
  bool is_multiplier = false;  // x-independent
  std::function<cd(double x, double xi, std::span<const double> lambda)> eval;
  // dx, dxi: orders in x and xi; dlambda: one order per parameter component.
  std::function<cd(int dx, int dxi, std::span<const int> dlambda, double x, double xi,
                   std::span<const double> lambda)>
      deriv;
};

/// Dense operator in the retained Fourier basis.
struct OperatorMatrix {
  Eigen::MatrixXcd entries;
  std::string basis;
};

/// Grid Fourier coefficients of point values (length n_points in, n_retained out).
Eigen::VectorXcd circle_coefficients(const CircleGrid& grid, std::span<const cd> values);

/// Point values from retained-mode coefficients.
Eigen::VectorXcd circle_values(const CircleGrid& grid, const Eigen::VectorXcd& modes);

/// Weighted l2 norm (sum over modes of <xi>^{2s} |u_hat|^2)^{1/2}.
double sobolev_norm_circle(const Eigen::VectorXcd& modes, double s);

/// Kohn-Nirenberg quantization on the grid:
///   (M u_hat)(xi') = sum_xi p_hat(xi' - xi; xi, lambda) u_hat(xi)
/// with p_hat the grid Fourier coefficient in x. Multipliers quantize to
/// exactly diagonal matrices.
OperatorMatrix quantize_circle(const CircleGrid& grid, const CircleSymbol& p,
                               std::span<const double> lambda);

/// R^s(lambda)(xi) = (1 + xi^2 + |lambda|^2)^{s/2}; order-reducing family with
/// exact inverse R^{-s}.
CircleSymbol order_reducing_family(double s, int param_dim = 1);

/// Largest singular value of D_{s''} M D_{s'}^{-1} with D_s = diag <xi>^s.
double operator_norm_circle(const OperatorMatrix& m, const SobolevPair& sp,
                            const CircleGrid& grid);

/// Largest singular value of a square matrix (SVD at desk sizes, subspace
/// iteration above; see spectral_norm_max_dim_svd).
double spectral_norm(const Eigen::MatrixXcd& m);

/// Per-lambda operator norms of quantize(p)(lambda) plus a log<lambda> fit.
/// lambda_values holds parameter vectors of length p.param_dim.
SweepReport family_norm_sweep(const CircleGrid& grid, const CircleSymbol& p,
                              const SobolevPair& sp,
                              std::span<const std::vector<double>> lambda_values,
                              int jobs = 1);

/// Same sweep for the lambda-derivative of the family in one direction.
SweepReport family_derivative_sweep(const CircleGrid& grid, const CircleSymbol& p,
                                    const SobolevPair& sp, int direction,
                                    std::span<const std::vector<double>> lambda_values,
                                    int jobs = 1);

/// Derivative view of a symbol: the symbol d/dlambda_direction p.
CircleSymbol derivative_symbol(const CircleSymbol& p, int direction);

}  // namespace edgecalc
