#include "edgecalc/bracket.hpp"

#include <cmath>
#include <stdexcept>

namespace edgecalc {

namespace {

// e(t) = exp(-1/t) for t > 0, else 0.
Jet bump_jet(double t, int order) {
  if (t <= 0.0) return Jet(order);  // identically zero, all derivatives 0
  Jet tj = Jet::variable(t, order);
  return (tj.reciprocal() * -1.0).exp();
}

}  // namespace

double smooth_step(double t) { return smooth_step_jet(t, 0).value(); }

Jet smooth_step_jet(double t, int order) {
  if (t <= 0.0) return Jet(order);
  if (t >= 1.0) return Jet::constant(1.0, order);
  Jet num = bump_jet(t, order);
  // e(1-t) as a jet in t: reflection flips the sign of odd coefficients
  Jet refl = bump_jet(1.0 - t, order);
  for (int k = 1; k <= order; k += 2) refl.coeff(k) = -refl.coeff(k);
  Jet den = num + refl;
  return num * den.reciprocal();
}

Jet bracket_jet(double r, int order) {
  const double a = std::abs(r);
  if (a >= kBracketTransitionRadius) {
    // exactly |r|
    Jet j(order);
    j.coeff(0) = a;
    if (order >= 1) j.coeff(1) = (r > 0.0 ? 1.0 : -1.0);
    return j;
  }
  Jet rj = Jet::variable(r, order);
  Jet sq = rj * rj + 1.0;        // 1 + r^2
  Jet smooth = sq.pow(0.5);      // (1 + r^2)^{1/2}
  if (a < 1.0) return smooth;    // beta == 1 here
  // 1 <= |r| < 2: blend with |r| (smooth in this annulus)
  Jet absr(order);
  absr.coeff(0) = a;
  if (order >= 1) absr.coeff(1) = (r > 0.0 ? 1.0 : -1.0);
  Jet beta = smooth_step_jet(2.0 - a, order);
  // beta is a jet in t = 2-|r|; convert to a jet in r (d t/d r = -sign(r))
  Jet beta_r(order);
  const double sgn = (r > 0.0 ? 1.0 : -1.0);
  double s = 1.0;
  for (int k = 0; k <= order; ++k) {
    beta_r.coeff(k) = s * beta.coeff(k);
    s *= -sgn;
  }
  return beta_r * smooth + (Jet::constant(1.0, order) - beta_r) * absr;
}

double bracket(double r) {
  const double a = std::abs(r);
  if (a >= kBracketTransitionRadius) return a;
  return bracket_jet(r, 0).value();
}

double bracket_deriv(double r, int k) {
  if (k < 0 || k > kBracketMaxDeriv)
    throw std::invalid_argument("bracket_deriv: order out of range");
  return bracket_jet(r, k).deriv(k);
}

double excision_profile(double t) { return smooth_step(2.0 * t - 1.0); }

}  // namespace edgecalc
