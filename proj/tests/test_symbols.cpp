#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "edgecalc/bracket.hpp"
#include "edgecalc/rng.hpp"
#include "edgecalc/symbols.hpp"

using namespace edgecalc;

namespace {

double angle3(double xi, double rho, double eta) {
  return std::sqrt(1.0 + xi * xi + rho * rho + eta * eta);
}

cd eval_edge(const EdgeSymbol& a, double r, double rho, double eta, double x, double xi) {
  const std::vector<double> ev = {eta};
  return a.eval(r, rho, ev, x, xi);
}

}  // namespace

TEST_CASE("registry evaluations") {
  const EdgeSymbol one = registry_symbol("one");
  CHECK(one.mu() == 0.0);
  CHECK(one.nu() == 0.0);
  CHECK(std::abs(eval_edge(one, 3.0, 2.0, 1.0, 0.7, 4.0) - cd{1.0, 0.0}) < 1e-15);

  const EdgeSymbol ell = registry_symbol("elliptic:-1");
  CHECK(ell.mu() == -1.0);
  CHECK(ell.multiplier());
  // a(r, rho, eta) = <xi, [r] rho, [r] eta>^{-1}
  const double r = 5.0;  // [5] = 5
  const double expected = 1.0 / angle3(2.0, 5.0 * 0.5, 5.0 * 1.0);
  CHECK(std::abs(eval_edge(ell, r, 0.5, 1.0, 0.0, 2.0) - cd{expected, 0.0}) < 1e-14);

  const EdgeSymbol wtd = registry_symbol("weighted-elliptic:2:1");
  CHECK(wtd.mu() == 2.0);
  CHECK(wtd.nu() == 1.0);
  const double expected_w = 5.0 * std::pow(angle3(1.0, 5.0 * 2.0, 5.0 * 3.0), 2.0);
  CHECK(std::abs(eval_edge(wtd, 5.0, 2.0, 3.0, 0.0, 1.0) - cd{expected_w, 0.0}) < 1e-12);

  const EdgeSymbol pert = registry_symbol("cosx-perturbed:0");
  CHECK(!pert.multiplier());
  CHECK(std::abs(eval_edge(pert, 1.0, 1.0, 1.0, 0.0, 0.0) - cd{1.5, 0.0}) < 1e-14);
  CHECK(std::abs(eval_edge(pert, 1.0, 1.0, 1.0, M_PI, 0.0) - cd{0.5, 0.0}) < 1e-14);

  CHECK_THROWS_AS(registry_symbol("unknown:1"), std::invalid_argument);
  CHECK_THROWS_AS(registry_symbol("elliptic:abc"), std::invalid_argument);
  CHECK(registry_has("order-reduce:-1"));
  CHECK(!registry_has("noise"));
}

TEST_CASE("make_edge_symbol construction cases") {
  // tilde = <xi, rho~, eta~>^s model, orders (s, 0)
  const double s = -1.0;
  const EdgeSymbol user = make_edge_symbol(
      [s](double, double rho_t, std::span<const double> eta_t, double, double xi) {
        return cd{std::pow(angle3(xi, rho_t, eta_t[0]), s), 0.0};
      },
      s, 0.0);
  const EdgeSymbol builtin = registry_symbol("elliptic:-1");
  for (double r : {0.0, 1.3, 6.0}) {
    const cd u = eval_edge(user, r, 0.7, 2.0, 0.0, 1.0);
    const cd b = eval_edge(builtin, r, 0.7, 2.0, 0.0, 1.0);
    CHECK(std::abs(u - b) < 1e-13);
  }

  // tilde multiplied by [r]^g carries orders (s, g)
  const EdgeSymbol weighted = edge_multiply(bracket_power_symbol(2.5), builtin);
  CHECK(weighted.mu() == -1.0);
  CHECK(weighted.nu() == 2.5);

  const EdgeSymbol one = registry_symbol("one");
  CHECK(std::abs(eval_edge(one, -3.0, 9.0, 0.1, 1.0, 2.0) - cd{1.0, 0.0}) < 1e-15);
}

TEST_CASE("edge derivative implements the chain rule through the bracket") {
  const double h = 1e-6;
  for (const char* id : {"elliptic:-1", "weighted-elliptic:-1:1", "cosx-perturbed:-1"}) {
    const EdgeSymbol a = registry_symbol(id);
    const EdgeSymbol dr = edge_deriv(a, 1, 0);
    const EdgeSymbol drho = edge_deriv(a, 0, 1);
    std::vector<int> alpha = {1};
    const EdgeSymbol deta = edge_deriv(a, 0, 0, alpha);
    CounterRng rng(7);
    for (int i = 0; i < 25; ++i) {
      const double r = rng.range(4 * i, -4.0, 4.0);
      const double rho = rng.range(4 * i + 1, -3.0, 3.0);
      const double eta = rng.range(4 * i + 2, 0.5, 4.0);
      const double x = rng.range(4 * i + 3, 0.0, 2.0 * M_PI);
      const double xi = 2.0;

      const cd fd_r =
          (eval_edge(a, r + h, rho, eta, x, xi) - eval_edge(a, r - h, rho, eta, x, xi)) / (2 * h);
      CHECK(std::abs(fd_r - eval_edge(dr, r, rho, eta, x, xi)) <=
            1e-6 * std::max(1.0, std::abs(fd_r)));

      const cd fd_rho =
          (eval_edge(a, r, rho + h, eta, x, xi) - eval_edge(a, r, rho - h, eta, x, xi)) / (2 * h);
      CHECK(std::abs(fd_rho - eval_edge(drho, r, rho, eta, x, xi)) <=
            1e-6 * std::max(1.0, std::abs(fd_rho)));

      const cd fd_eta =
          (eval_edge(a, r, rho, eta + h, x, xi) - eval_edge(a, r, rho, eta - h, x, xi)) / (2 * h);
      CHECK(std::abs(fd_eta - eval_edge(deta, r, rho, eta, x, xi)) <=
            1e-6 * std::max(1.0, std::abs(fd_eta)));
    }
  }
}

TEST_CASE("derivative order bookkeeping") {
  const EdgeSymbol a = registry_symbol("weighted-elliptic:-1:1");  // orders (-1, 1)
  const EdgeSymbol dr = edge_deriv(a, 1, 0);
  CHECK(dr.mu() == -1.0);
  CHECK(dr.nu() == 0.0);
  const EdgeSymbol drho = edge_deriv(a, 0, 1);
  CHECK(drho.mu() == -2.0);
  CHECK(drho.nu() == 2.0);
  const std::vector<int> alpha = {2};
  const EdgeSymbol deta2 = edge_deriv(a, 0, 0, alpha);
  CHECK(deta2.mu() == -3.0);
  CHECK(deta2.nu() == 3.0);

  const EdgeSymbol one = registry_symbol("one");
  const EdgeSymbol zero = edge_deriv(one, 1, 1);
  for (double r : {0.2, 2.0}) CHECK(std::abs(eval_edge(zero, r, 1.0, 1.0, 0.0, 1.0)) < 1e-15);
}

TEST_CASE("mixed edge partials commute") {
  const EdgeSymbol a = registry_symbol("weighted-elliptic:-1:1");
  const EdgeSymbol d_rj = edge_deriv(edge_deriv(a, 1, 0), 0, 1);
  const EdgeSymbol d_jr = edge_deriv(edge_deriv(a, 0, 1), 1, 0);
  CounterRng rng(11);
  for (int i = 0; i < 30; ++i) {
    const double r = rng.range(4 * i, -4.0, 4.0);
    const double rho = rng.range(4 * i + 1, -2.0, 2.0);
    const double eta = rng.range(4 * i + 2, 0.5, 3.0);
    const cd u = eval_edge(d_rj, r, rho, eta, 0.0, 1.0);
    const cd v = eval_edge(d_jr, r, rho, eta, 0.0, 1.0);
    CHECK(std::abs(u - v) <= 1e-10 * std::max(1.0, std::abs(u)));
  }
}

TEST_CASE("edge products add orders and match pointwise values") {
  const EdgeSymbol a = registry_symbol("elliptic:-1");
  const EdgeSymbol b = registry_symbol("weighted-elliptic:2:1");
  const EdgeSymbol ab = edge_multiply(a, b);
  CHECK(ab.mu() == 1.0);
  CHECK(ab.nu() == 1.0);
  const cd va = eval_edge(a, 1.5, 1.0, 2.0, 0.3, 1.0);
  const cd vb = eval_edge(b, 1.5, 1.0, 2.0, 0.3, 1.0);
  CHECK(std::abs(eval_edge(ab, 1.5, 1.0, 2.0, 0.3, 1.0) - va * vb) < 1e-13);

  const EdgeSymbol one = registry_symbol("one");
  const EdgeSymbol a1 = edge_multiply(a, one);
  CHECK(std::abs(eval_edge(a1, 2.0, 0.5, 1.0, 0.0, 3.0) - eval_edge(a, 2.0, 0.5, 1.0, 0.0, 3.0)) <
        1e-15);

  // [r]^g [r]^{-g} p recovers p's orders and values
  const EdgeSymbol recovered =
      edge_multiply(bracket_power_symbol(3.0), edge_multiply(bracket_power_symbol(-3.0), a));
  CHECK(recovered.mu() == a.mu());
  CHECK(recovered.nu() == a.nu());
  CHECK(std::abs(eval_edge(recovered, 1.2, 0.5, 1.0, 0.0, 1.0) -
                 eval_edge(a, 1.2, 0.5, 1.0, 0.0, 1.0)) < 1e-13);
}

TEST_CASE("composite of rho- and r-derivatives follows the product corollary") {
  const EdgeSymbol a = registry_symbol("elliptic:-1");  // (-1, 0)
  const EdgeSymbol b = registry_symbol("elliptic:2");   // (2, 0)
  const int k = 2;
  const EdgeSymbol composite = edge_multiply(edge_deriv(a, 0, k), edge_deriv(b, k, 0));
  CHECK(composite.mu() == -1.0 + 2.0 - k);
  CHECK(composite.nu() == 0.0);
}

TEST_CASE("q mismatch is rejected") {
  const EdgeSymbol a = registry_symbol("elliptic:-1");
  const EdgeSymbol user_q2 = make_edge_symbol(
      [](double, double, std::span<const double>, double, double) { return cd{1.0, 0.0}; }, 0.0,
      0.0, 2);
  CHECK_THROWS_AS(edge_multiply(a, user_q2), std::invalid_argument);
}

TEST_CASE("oracle depth is enforced") {
  const EdgeSymbol user = make_edge_symbol(
      [](double, double, std::span<const double>, double, double) { return cd{1.0, 0.0}; }, 0.0,
      0.0, 1, 2);
  CHECK_THROWS_AS(edge_deriv(user, 2, 1), std::out_of_range);
}

TEST_CASE("seminorm check passes for built-ins with declared orders") {
  for (const char* id :
       {"one", "elliptic:-1", "elliptic:1", "weighted-elliptic:-1:1", "cosx-perturbed:-1"}) {
    const EdgeSymbol a = registry_symbol(id);
    SeminormSampleSpec spec;
    spec.n_modes = 4;
    const CheckReport report = seminorm_check(a, spec);
    INFO("symbol ", id);
    CHECK(report.passed);
  }
}

TEST_CASE("seminorm check covariable exponent matches the order for the model") {
  const EdgeSymbol a = registry_symbol("elliptic:-1");
  SeminormSampleSpec spec;
  spec.n_modes = 4;
  const CheckReport report = seminorm_check(a, spec);
  CHECK(report.cov_exponent == doctest::Approx(-1.0).epsilon(0.02));
}

TEST_CASE("seminorm profile of the pure weight [r]") {
  const EdgeSymbol w = bracket_power_symbol(1.0);  // orders (0, 1)
  SeminormSampleSpec spec;
  spec.n_modes = 2;
  const CheckReport report = seminorm_check(w, spec);
  CHECK(report.passed);
  // k = 0 profile grows like [r]^1, k = 1 profile is flat
  CHECK(report.per_k[0].r_exponent == doctest::Approx(1.0).epsilon(0.05));
  CHECK(std::abs(report.per_k[1].r_exponent) <= 0.1);
}

TEST_CASE("constant symbol seminorm ratios stay at one") {
  const EdgeSymbol one = registry_symbol("one");
  SeminormSampleSpec spec;
  spec.n_modes = 2;
  const CheckReport report = seminorm_check(one, spec);
  CHECK(report.passed);
  CHECK(report.per_k[0].max_ratio <= 1.0 + 1e-12);
}

TEST_CASE("derivative oracle consistency across the registry") {
  for (const std::string& id : registry_canonical_ids()) {
    const EdgeSymbol a = registry_symbol(id);
    INFO("symbol ", id);
    CHECK(derivative_oracle_defect(a, 100, 1234) <= 1e-4);
  }
}

TEST_CASE("asymptotic sum saturates where the excision is one") {
  AsymptoticSumPlan plan;
  plan.terms = {registry_symbol("elliptic:0"), registry_symbol("elliptic:-1")};
  const AsymptoticSumResult result = asymptotic_sum(plan);
  CHECK(result.constants.size() == 2);
  CHECK(result.constants[0] < result.constants[1]);
  // far outside every excision ball the sum equals term0 + term1 exactly
  const double big = 4.0 * result.constants[1];
  const std::vector<double> eta_t = {big / M_SQRT2};
  const double rho_t = big / M_SQRT2;
  const cd sum = result.sum.tilde_eval(1.0, rho_t, eta_t, 0.0, 0.0);
  const cd expected = plan.terms[0].tilde_eval(1.0, rho_t, eta_t, 0.0, 0.0) +
                      plan.terms[1].tilde_eval(1.0, rho_t, eta_t, 0.0, 0.0);
  CHECK(std::abs(sum - expected) < 1e-12);
  // near the origin the excision removes every term
  const std::vector<double> tiny = {0.1};
  CHECK(std::abs(result.sum.tilde_eval(1.0, 0.1, tiny, 0.0, 0.0)) < 1e-15);
}

TEST_CASE("asymptotic sum tail decays at the truncation order") {
  AsymptoticSumPlan plan;
  plan.terms = {registry_symbol("elliptic:0"), registry_symbol("elliptic:-1"),
                registry_symbol("elliptic:-2")};
  const AsymptoticSumResult result = asymptotic_sum(plan);
  // tail after the first term: (sum - chi_0 a_0) should decay like mu - 1
  std::vector<double> xs, ys;
  for (double mag = 8.0; mag <= 512.0; mag *= 2.0) {
    const double rho_t = mag / M_SQRT2;
    const std::vector<double> eta_t = {mag / M_SQRT2};
    const cd total = result.sum.tilde_eval(0.0, rho_t, eta_t, 0.0, 0.0);
    const double chi0 = excision_profile(mag / result.constants[0]);
    const cd head = chi0 * plan.terms[0].tilde_eval(0.0, rho_t, eta_t, 0.0, 0.0);
    const double tail = std::abs(total - head);
    if (tail > 0.0) {
      xs.push_back(std::log(angle_bracket(mag)));
      ys.push_back(std::log(tail));
    }
  }
  REQUIRE(xs.size() >= 3);
  const FitResult fit = fit_loglog(xs, ys);
  CHECK(fit.exponent <= -1.0 + 0.15);
}

TEST_CASE("asymptotic sum rejects non-decreasing orders") {
  AsymptoticSumPlan plan;
  plan.terms = {registry_symbol("elliptic:-1"), registry_symbol("elliptic:0")};
  CHECK_THROWS_WITH_AS(asymptotic_sum(plan), "asymptotic_sum: term order not decreasing",
                       std::invalid_argument);
}

TEST_CASE("excision multiply keeps values outside the ball and kills the origin") {
  const EdgeSymbol a = registry_symbol("elliptic:-1");
  const EdgeSymbol cut = excise_multiply(a, 2.0);
  const std::vector<double> far = {8.0};
  CHECK(std::abs(cut.tilde_eval(0.0, 0.0, far, 0.0, 0.0) - a.tilde_eval(0.0, 0.0, far, 0.0, 0.0)) <
        1e-15);
  const std::vector<double> near = {0.5};
  CHECK(std::abs(cut.tilde_eval(0.0, 0.0, near, 0.0, 0.0)) < 1e-15);
}
