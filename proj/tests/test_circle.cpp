#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "edgecalc/circle.hpp"

using namespace edgecalc;

TEST_CASE("grid construction") {
  const CircleGrid g8 = make_circle_grid(8);
  CHECK(g8.n_points == 18);
  CHECK(g8.n_retained() == 17);
  const CircleGrid g1 = make_circle_grid(1);
  CHECK(g1.n_points == 4);
  CHECK_THROWS_WITH_AS(make_circle_grid(0), "make_circle_grid: need at least one mode",
                       std::invalid_argument);
}

TEST_CASE("sobolev norm on single and paired modes") {
  const CircleGrid grid = make_circle_grid(8);
  Eigen::VectorXcd u = Eigen::VectorXcd::Zero(grid.n_retained());
  u(grid.index_of_mode(0)) = 1.0;
  CHECK(sobolev_norm_circle(u, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sobolev_norm_circle(u, 7.5) == doctest::Approx(1.0).epsilon(1e-15));

  u.setZero();
  u(grid.index_of_mode(3)) = 1.0;
  CHECK(sobolev_norm_circle(u, 2.0) == doctest::Approx(10.0).epsilon(1e-15));

  u(grid.index_of_mode(-3)) = 1.0;
  CHECK(sobolev_norm_circle(u, 1.0) == doctest::Approx(std::sqrt(20.0)).epsilon(1e-15));
}

TEST_CASE("coefficients round-trip through values") {
  const CircleGrid grid = make_circle_grid(5);
  Eigen::VectorXcd modes = Eigen::VectorXcd::Zero(grid.n_retained());
  modes(grid.index_of_mode(2)) = cd{0.5, -0.25};
  modes(grid.index_of_mode(-4)) = cd{-1.0, 2.0};
  const Eigen::VectorXcd values = circle_values(grid, modes);
  const Eigen::VectorXcd back = circle_coefficients(
      grid, std::span<const cd>(values.data(), static_cast<std::size_t>(values.size())));
  CHECK((back - modes).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("quantization of the constant symbol is the identity") {
  const CircleGrid grid = make_circle_grid(6);
  const CircleSymbol one = order_reducing_family(0.0);
  const std::vector<double> lam = {2.5};
  const OperatorMatrix m = quantize_circle(grid, one, lam);
  CHECK((m.entries - Eigen::MatrixXcd::Identity(13, 13)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("multiplier quantization is diagonal with symbol values") {
  const CircleGrid grid = make_circle_grid(4);
  const CircleSymbol r2 = order_reducing_family(2.0);
  const std::vector<double> lam = {3.0};
  const OperatorMatrix m = quantize_circle(grid, r2, lam);
  for (int idx = 0; idx < grid.n_retained(); ++idx) {
    const double xi = grid.mode_of_index(idx);
    CHECK(std::abs(m.entries(idx, idx) - cd{1.0 + xi * xi + 9.0, 0.0}) < 1e-14);
  }
  CHECK(m.entries.cwiseAbs().sum() ==
        doctest::Approx(m.entries.diagonal().cwiseAbs().sum()).epsilon(1e-15));
  // order-reduce:2 at xi = 1, lambda = 2 -> 1 + 1 + 4
  const std::vector<double> lam2 = {2.0};
  CHECK(std::abs(r2.eval(0.0, 1.0, lam2) - cd{6.0, 0.0}) < 1e-15);
}

TEST_CASE("cos(x) quantizes to the half shift matrix") {
  const CircleGrid grid = make_circle_grid(8);
  CircleSymbol cosx;
  cosx.order = 0.0;
  cosx.param_dim = 0;
  cosx.is_multiplier = false;
  cosx.eval = [](double x, double, std::span<const double>) { return cd{std::cos(x), 0.0}; };
  const OperatorMatrix m = quantize_circle(grid, cosx, {});
  for (int r = 0; r < grid.n_retained(); ++r) {
    for (int c = 0; c < grid.n_retained(); ++c) {
      const double expected = std::abs(r - c) == 1 ? 0.5 : 0.0;
      CHECK(std::abs(m.entries(r, c) - cd{expected, 0.0}) < 1e-14);
    }
  }
}

TEST_CASE("order reduction inverts exactly") {
  const CircleGrid grid = make_circle_grid(8);
  for (double s : {1.0, 2.0, -3.0}) {
    const CircleSymbol plus = order_reducing_family(s);
    const CircleSymbol minus = order_reducing_family(-s);
    for (double lam : {0.0, 1.0, 7.5}) {
      const std::vector<double> lv = {lam};
      const Eigen::MatrixXcd prod =
          quantize_circle(grid, plus, lv).entries * quantize_circle(grid, minus, lv).entries;
      CHECK((prod - Eigen::MatrixXcd::Identity(17, 17)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("operator norms of weighted diagonals") {
  const CircleGrid grid = make_circle_grid(8);
  const CircleSymbol one = order_reducing_family(0.0);
  const std::vector<double> lam = {0.0};
  const OperatorMatrix identity = quantize_circle(grid, one, lam);
  CHECK(operator_norm_circle(identity, {3.0, 3.0}, grid) == doctest::Approx(1.0).epsilon(1e-12));

  // diag(<xi>) with sp = (1, 0): weights cancel
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(17, 17);
  for (int idx = 0; idx < 17; ++idx) {
    const double xi = grid.mode_of_index(idx);
    d(idx, idx) = std::sqrt(1.0 + xi * xi);
  }
  CHECK(operator_norm_circle({d, "circle-fourier"}, {1.0, 0.0}, grid) ==
        doctest::Approx(1.0).epsilon(1e-12));

  // R^{-1}(lambda) at sp (0,0): max over retained modes is at xi = 0
  const CircleSymbol rm1 = order_reducing_family(-1.0);
  for (double lam1 : {1.0, 4.0, 100.0}) {
    const std::vector<double> lv = {lam1};
    const OperatorMatrix m = quantize_circle(grid, rm1, lv);
    CHECK(operator_norm_circle(m, {0.0, 0.0}, grid) ==
          doctest::Approx(1.0 / std::sqrt(1.0 + lam1 * lam1)).epsilon(1e-12));
  }
}

TEST_CASE("spectral norm agrees with dense SVD on a random matrix") {
  const int n = 40;
  Eigen::MatrixXcd m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      m(r, c) = cd{std::sin(0.1 * r * c + 0.3), std::cos(0.2 * r - 0.05 * c)};
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
  CHECK(spectral_norm(m) == doctest::Approx(svd.singularValues()(0)).epsilon(1e-12));
}

TEST_CASE("family sweep of R^{-1} fits exponent -1 with closed-form norms") {
  const CircleGrid grid = make_circle_grid(8);
  const CircleSymbol rm1 = order_reducing_family(-1.0);
  std::vector<std::vector<double>> lambdas;
  for (double v = 1.0; v <= 256.0; v *= 2.0) lambdas.push_back({v});
  const SweepReport report = family_norm_sweep(grid, rm1, {0.0, 0.0}, lambdas);
  CHECK(report.fitted_exponent == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(report.fit_residual < 1e-9);
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double lam = lambdas[i][0];
    CHECK(report.rows[i].value ==
          doctest::Approx(1.0 / std::sqrt(1.0 + lam * lam)).epsilon(1e-12));
  }
}

TEST_CASE("constant family sweeps flat") {
  const CircleGrid grid = make_circle_grid(4);
  const CircleSymbol one = order_reducing_family(0.0);
  std::vector<std::vector<double>> lambdas = {{1.0}, {4.0}, {16.0}, {64.0}};
  const SweepReport report = family_norm_sweep(grid, one, {0.0, 0.0}, lambdas);
  CHECK(std::abs(report.fitted_exponent) < 1e-12);
  for (const auto& row : report.rows) CHECK(row.value == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("derivative sweep decays one extra order") {
  const CircleGrid grid = make_circle_grid(8);
  std::vector<std::vector<double>> lambdas;
  for (double v = 1.0; v <= 256.0; v *= 2.0) lambdas.push_back({v});
  const CircleSymbol rm1 = order_reducing_family(-1.0);
  const SweepReport d1 = family_derivative_sweep(grid, rm1, {0.0, 0.0}, 0, lambdas);
  CHECK(d1.fitted_exponent <= -1.85);  // family exponent -1, one extra order
  CHECK(d1.fitted_exponent >= -2.1);
  // closed form: |d/dlam <xi,lam>^{-1}| maximized at xi=0 -> lam <lam>^{-3}
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double lam = lambdas[i][0];
    const double expected = lam * std::pow(1.0 + lam * lam, -1.5);
    CHECK(d1.rows[i].value == doctest::Approx(expected).epsilon(1e-10));
  }

  const CircleSymbol one = order_reducing_family(0.0);
  const SweepReport d0 = family_derivative_sweep(grid, one, {0.0, 0.0}, 0, lambdas);
  CHECK(d0.degenerate);
  for (const auto& row : d0.rows) CHECK(row.value == 0.0);
}

TEST_CASE("sweep with fewer than 3 points is refused") {
  const CircleGrid grid = make_circle_grid(2);
  const CircleSymbol rm1 = order_reducing_family(-1.0);
  std::vector<std::vector<double>> lambdas = {{1.0}, {2.0}};
  CHECK_THROWS_AS(family_norm_sweep(grid, rm1, {0.0, 0.0}, lambdas), std::invalid_argument);
}

TEST_CASE("classical symbol estimate spot-check for the order-reducing family") {
  // |d_xi^j d_lam^a R^s| <= C <xi,lam>^{s-j-a} on a sample grid
  const CircleSymbol r2 = order_reducing_family(2.0);
  for (int j = 0; j <= 2; ++j) {
    for (int al = 0; al <= 2; ++al) {
      double worst = 0.0;
      for (double xi : {0.0, 3.0, -7.0, 12.0}) {
        for (double lam : {0.5, 2.0, 32.0}) {
          const std::vector<double> lv = {lam};
          const std::vector<int> da = {al};
          const double bracket_sq = 1.0 + xi * xi + lam * lam;
          const double bound = std::pow(bracket_sq, (2.0 - j - al) / 2.0);
          const double val = std::abs(r2.deriv(0, j, da, 0.0, xi, lv));
          worst = std::max(worst, val / bound);
        }
      }
      CHECK(worst <= 8.0);  // modest constant, order arithmetic is what matters
    }
  }
}

TEST_CASE("derivative oracle of the family matches finite differences") {
  const CircleSymbol r2 = order_reducing_family(-2.0);
  const double h = 1e-5;
  for (double xi : {0.0, 2.0, -5.0}) {
    for (double lam : {0.7, 3.0, 11.0}) {
      const std::vector<double> lo = {lam - h}, hi = {lam + h}, mid = {lam};
      const cd fd = (r2.eval(0.0, xi, hi) - r2.eval(0.0, xi, lo)) / (2.0 * h);
      const std::vector<int> da = {1};
      const cd oracle = r2.deriv(0, 0, da, 0.0, xi, mid);
      CHECK(std::abs(fd - oracle) <= 1e-7 * std::max(1.0, std::abs(oracle)));
    }
  }
}
