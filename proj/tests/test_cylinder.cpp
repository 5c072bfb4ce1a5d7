#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "edgecalc/bracket.hpp"
#include "edgecalc/cylinder.hpp"
#include "edgecalc/rng.hpp"

using namespace edgecalc;

namespace {

const std::vector<double> kEta4 = {4.0};

Eigen::VectorXcd tensor_coefficients(const CylinderFunction& u) {
  const Eigen::MatrixXcd uhat = r_forward(u.grid(), u.x_modes());
  Eigen::VectorXcd flat(uhat.size());
  const int n_x = static_cast<int>(uhat.cols());
  for (int b = 0; b < uhat.rows(); ++b)
    for (int m = 0; m < n_x; ++m) flat(b * n_x + m) = uhat(b, m);
  return flat;
}

CylinderFunction random_function(const CylinderGrid& grid, std::uint64_t seed) {
  CounterRng rng(seed);
  CylinderFunction f = CylinderFunction::zero(grid);
  for (int piece = 0; piece < 3; ++piece) {
    const auto c0 = static_cast<std::uint64_t>(piece) * 8;
    const CylinderFunction g = gaussian_mode(
        grid, rng.range(c0, 0.5, 3.0), rng.range(c0 + 1, -3.0, 3.0),
        static_cast<int>(std::round(rng.range(c0 + 2, -grid.circle.n_modes, grid.circle.n_modes))),
        cd{rng.symmetric(c0 + 3), rng.symmetric(c0 + 4)});
    f.values() += g.values();
  }
  return f;
}

}  // namespace

TEST_CASE("grid invariants") {
  CHECK_THROWS_AS(CylinderGrid::make(16.0, 100, 4), std::invalid_argument);  // not a power of two
  CHECK_THROWS_AS(CylinderGrid::make(16.0, 64, 4), std::invalid_argument);   // spacing 0.5
  const CylinderGrid grid = CylinderGrid::make(16.0, 128, 4);
  CHECK(grid.dr() == doctest::Approx(0.25));
  CHECK(grid.r_point(64) == doctest::Approx(0.0));
  CHECK(grid.rho_mode(0) == 0.0);
  CHECK(grid.rho_mode(1) == doctest::Approx(M_PI / 16.0));
  CHECK(grid.rho_mode(64) == doctest::Approx(-64.0 * M_PI / 16.0));  // wrap to negative
  CHECK(grid.dim() == 128 * 9);
}

TEST_CASE("r transforms round-trip") {
  const CylinderGrid grid = CylinderGrid::make(4.0, 32, 2);
  const CylinderFunction u = random_function(grid, 5);
  const Eigen::MatrixXcd modes = u.x_modes();
  const Eigen::MatrixXcd back = r_inverse(grid, r_forward(grid, modes));
  CHECK((back - modes).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("identity symbol acts as identity") {
  const CylinderGrid grid = CylinderGrid::make(8.0, 64, 3);
  const EdgeSymbol one = registry_symbol("one");
  const CylinderFunction u = random_function(grid, 17);
  const CylinderFunction au = op_apply(one, kEta4, u);
  CHECK((au.values() - u.values()).cwiseAbs().maxCoeff() /
            u.values().cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("rho-independent radial multiplier acts pointwise") {
  const CylinderGrid grid = CylinderGrid::make(8.0, 64, 2);
  const EdgeSymbol m = registry_symbol("weighted-elliptic:0:-1");  // [r]^{-1}
  const CylinderFunction u = random_function(grid, 23);
  const CylinderFunction mu = op_apply(m, kEta4, u);
  for (int j = 0; j < grid.n_r; ++j) {
    const double w = 1.0 / bracket(grid.r_point(j));
    CHECK((mu.values().row(j) - w * u.values().row(j)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("linearity of the quantized action") {
  const CylinderGrid grid = CylinderGrid::make(8.0, 64, 2);
  const EdgeSymbol a = registry_symbol("elliptic:-1");
  const CylinderFunction u = random_function(grid, 31);
  const CylinderFunction v = random_function(grid, 37);
  const cd alpha{0.3, -1.1}, beta{-0.9, 0.4};
  CylinderFunction combo = CylinderFunction::zero(grid);
  combo.values() = alpha * u.values() + beta * v.values();
  const CylinderFunction lhs = op_apply(a, kEta4, combo);
  const CylinderFunction au = op_apply(a, kEta4, u);
  const CylinderFunction av = op_apply(a, kEta4, v);
  const Eigen::MatrixXcd rhs = alpha * au.values() + beta * av.values();
  CHECK((lhs.values() - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("eta = 0 is rejected for covariable-dependent symbols only") {
  const CylinderGrid grid = CylinderGrid::make(4.0, 32, 1);
  const CylinderFunction u = random_function(grid, 3);
  const std::vector<double> zero = {0.0};
  CHECK_THROWS_AS(op_apply(registry_symbol("elliptic:-1"), zero, u), std::invalid_argument);
  CHECK_NOTHROW(op_apply(registry_symbol("one"), zero, u));
  CHECK_NOTHROW(op_apply(registry_symbol("weighted-elliptic:0:1"), zero, u));
}

TEST_CASE("gaussian L2 norm matches the closed form") {
  const CylinderGrid grid = CylinderGrid::make(32.0, 512, 2);
  const CylinderFunction u = gaussian_mode(grid, 1.0, 0.0, 1);
  CHECK(l2_norm_cyl(u) == doctest::Approx(std::pow(M_PI, 0.25)).epsilon(1e-8));
  CHECK(l2_norm_cyl(CylinderFunction::zero(grid)) == 0.0);
}

TEST_CASE("weight exponent doubles the growth slope of translated bumps") {
  const CylinderGrid grid = CylinderGrid::make(32.0, 512, 1);
  const auto slope = [&](double w) {
    std::vector<double> xs, ys;
    for (double c : {4.0, 8.0, 16.0}) {
      const CylinderFunction u = gaussian_mode(grid, 0.5, c, 0);
      xs.push_back(std::log(c));
      ys.push_back(std::log(weighted_norm_cyl(u, w)));
    }
    return fit_loglog(xs, ys).exponent;
  };
  const double s1 = slope(1.0);
  const double s2 = slope(2.0);
  CHECK(s2 == doctest::Approx(2.0 * s1).epsilon(0.02));
  CHECK(s1 == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("assembled sections reproduce the action") {
  for (const char* id : {"elliptic:-1", "weighted-elliptic:-1:1", "cosx-perturbed:-1"}) {
    const CylinderGrid grid = CylinderGrid::make(4.0, 32, 2);
    const EdgeSymbol a = registry_symbol(id);
    const CylinderOperator op = assemble_operator(a, kEta4, grid);
    const Eigen::MatrixXcd dense = op.to_dense();
    for (std::uint64_t seed : {41u, 43u}) {
      const CylinderFunction u = random_function(grid, seed);
      const Eigen::VectorXcd via_matrix = dense * tensor_coefficients(u);
      const Eigen::VectorXcd via_apply = tensor_coefficients(op_apply(a, kEta4, u));
      INFO("symbol ", id);
      CHECK((via_matrix - via_apply).norm() <= 1e-10 * tensor_coefficients(u).norm());
    }
  }
}

TEST_CASE("assembly of the identity is the identity") {
  const CylinderGrid grid = CylinderGrid::make(4.0, 32, 2);
  const CylinderOperator op = assemble_operator(registry_symbol("one"), kEta4, grid);
  CHECK(op.subtract_identity().spectral_norm() < 1e-13);
  CHECK(op.is_block());
}

TEST_CASE("matrix cap is enforced") {
  const CylinderGrid grid = CylinderGrid::make(32.0, 512, 8);  // dim 8704 > 8192
  CHECK_THROWS_WITH_AS(assemble_matrix(registry_symbol("one"), kEta4, grid),
                       "matrix cap exceeded: reduce grid or modes", std::length_error);
}

TEST_CASE("operator norms: identity and contractive multipliers") {
  const CylinderGrid grid = CylinderGrid::make(8.0, 64, 2);
  CHECK(operator_norm_cyl(registry_symbol("one"), kEta4, grid) ==
        doctest::Approx(1.0).epsilon(1e-10));
  const double norm = operator_norm_cyl(registry_symbol("weighted-elliptic:0:-1"), kEta4, grid);
  CHECK(norm <= 1.0 + 1e-8);
  CHECK(norm > 0.9);  // [r]^{-1} reaches 1 at r = 0
}

TEST_CASE("operator norm is monotone under grid refinement") {
  const EdgeSymbol a = registry_symbol("elliptic:-1");
  const double base = operator_norm_cyl(a, kEta4, CylinderGrid::make(4.0, 32, 2));
  const double finer_r = operator_norm_cyl(a, kEta4, CylinderGrid::make(4.0, 64, 2));
  const double finer_x = operator_norm_cyl(a, kEta4, CylinderGrid::make(4.0, 32, 4));
  CHECK(finer_r >= base - 1e-6);
  CHECK(finer_x >= base - 1e-6);
}

TEST_CASE("adjoint defect floors") {
  const CylinderGrid grid = CylinderGrid::make(16.0, 128, 3);
  CHECK(adjoint_defect(registry_symbol("one"), kEta4, grid, 3) < 1e-12);
  CHECK(adjoint_defect(registry_symbol("weighted-elliptic:0:-1"), kEta4, grid, 3) < 1e-10);
  CHECK(adjoint_defect(registry_symbol("elliptic:-1"), kEta4, grid, 3) < 1e-6);
  CHECK(adjoint_defect(registry_symbol("cosx-perturbed:-1"), kEta4, grid, 2) < 1e-6);
  CHECK_THROWS_AS(adjoint_defect(registry_symbol("one"), kEta4, grid, 0), std::invalid_argument);
}

TEST_CASE("periodization is negligible for admissible inputs") {
  const CylinderGrid grid = CylinderGrid::make(32.0, 512, 2);
  const CylinderFunction u = gaussian_mode(grid, 4.0, 0.0, 1);
  CHECK(wraparound_energy(u, 4.0) < 1e-10);
  const CylinderFunction au = op_apply(registry_symbol("elliptic:-1"), kEta4, u);
  CHECK(wraparound_energy(au, 4.0) < 1e-10);
}

TEST_CASE("schwartz seminorms") {
  const CylinderGrid grid = CylinderGrid::make(16.0, 128, 2);
  const CylinderFunction u = gaussian_mode(grid, 1.0, 0.0, 1);
  CHECK(schwartz_seminorm(u, 0, 0) == doctest::Approx(1.0).epsilon(1e-10));
  // for a width-4 bump the [r]-weighted term dominates: max [r] e^{-r^2/32} at r = 4
  const CylinderFunction wide = gaussian_mode(grid, 4.0, 0.0, 1);
  CHECK(schwartz_seminorm(wide, 1, 0) == doctest::Approx(4.0 * std::exp(-0.5)).epsilon(1e-10));
  // H^s weight on the single mode: <1>^s = 2^{s/2}
  CHECK(schwartz_seminorm(u, 0, 2) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK_THROWS_AS(schwartz_seminorm(u, 9, 0), std::invalid_argument);
}

TEST_CASE("seminorm probe ratios are flat for the identity") {
  const CylinderGrid grid = CylinderGrid::make(16.0, 128, 2);
  const std::vector<double> widths = {0.5, 1.0, 2.0};
  const SeminormProbeReport probe =
      seminorm_ratio_probe(registry_symbol("one"), kEta4, grid, widths);
  CHECK(probe.pass);
  CHECK(probe.max_ratio / probe.min_ratio < 1e2);
}

TEST_CASE("operator norm of the model family decays in eta") {
  const CylinderGrid grid = CylinderGrid::make(8.0, 64, 2);
  const EdgeSymbol a = registry_symbol("elliptic:-1");
  double prev = 1e300;
  for (double eta = 1.0; eta <= 64.0; eta *= 4.0) {
    const std::vector<double> ev = {eta};
    const double norm = operator_norm_cyl(a, ev, grid);
    CHECK(norm < prev);
    prev = norm;
  }
}
