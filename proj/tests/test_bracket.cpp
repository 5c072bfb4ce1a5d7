#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "edgecalc/bracket.hpp"
#include "edgecalc/jet.hpp"
#include "edgecalc/rng.hpp"

using namespace edgecalc;

TEST_CASE("bracket equals |r| outside the transition radius") {
  CHECK(bracket(5.0) == 5.0);
  CHECK(bracket(-5.0) == 5.0);
  CHECK(bracket(2.0) == 2.0);
  CHECK(bracket(-311.25) == 311.25);
  CHECK(bracket_deriv(-5.0, 1) == -1.0);
  CHECK(bracket_deriv(5.0, 1) == 1.0);
  CHECK(bracket_deriv(7.0, 2) == 0.0);
}

TEST_CASE("bracket value at the origin and positivity") {
  CHECK(bracket(0.0) == doctest::Approx(1.0).epsilon(1e-14));
  double min_val = 1e300;
  for (double r = -2.0; r <= 2.0; r += 1.0 / 256.0) min_val = std::min(min_val, bracket(r));
  CHECK(min_val >= 0.5);
  CHECK(min_val >= bracket(0.0) - 1e-12);  // [0] is the minimum
}

TEST_CASE("bracket is even") {
  for (double r : {0.3, 0.9, 1.2, 1.7, 1.95, 2.5}) {
    CHECK(bracket(r) == doctest::Approx(bracket(-r)).epsilon(1e-15));
  }
}

TEST_CASE("bracket derivatives match finite differences") {
  const double h = 1e-5;
  CounterRng rng(42);
  for (int i = 0; i < 60; ++i) {
    const double r = rng.range(i, -3.0, 3.0);
    for (int k = 1; k <= 3; ++k) {
      const double fd = (bracket_deriv(r + h, k - 1) - bracket_deriv(r - h, k - 1)) / (2.0 * h);
      const double oracle = bracket_deriv(r, k);
      CHECK(std::abs(fd - oracle) <= 1e-6 * std::max(1.0, std::abs(oracle)));
    }
  }
}

TEST_CASE("smooth step endpoints are flat") {
  CHECK(smooth_step(-0.5) == 0.0);
  CHECK(smooth_step(1.5) == 1.0);
  CHECK(smooth_step(0.5) == doctest::Approx(0.5).epsilon(1e-12));  // symmetric bump
  const Jet j = smooth_step_jet(0.999999, 6);
  for (int k = 1; k <= 6; ++k) CHECK(std::abs(j.deriv(k)) < 1e-3);
}

TEST_CASE("jet arithmetic reproduces closed-form derivatives") {
  // f(r) = (1+r^2)^{3/2}: f'(r) = 3r(1+r^2)^{1/2}
  const double r = 0.7;
  const Jet rj = Jet::variable(r, 4);
  const Jet f = (rj * rj + 1.0).pow(1.5);
  CHECK(f.value() == doctest::Approx(std::pow(1.49, 1.5)).epsilon(1e-14));
  CHECK(f.deriv(1) == doctest::Approx(3.0 * r * std::sqrt(1.49)).epsilon(1e-14));
  const Jet g = f.reciprocal() * f;
  CHECK(g.value() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(g.deriv(1)) < 1e-12);
  const Jet e = rj.exp();
  CHECK(e.deriv(3) == doctest::Approx(std::exp(r)).epsilon(1e-13));
}

TEST_CASE("excision profile saturates") {
  CHECK(excision_profile(0.4) == 0.0);
  CHECK(excision_profile(0.5) == 0.0);
  CHECK(excision_profile(1.0) == 1.0);
  CHECK(excision_profile(3.0) == 1.0);
  CHECK(excision_profile(0.75) > 0.0);
  CHECK(excision_profile(0.75) < 1.0);
}
