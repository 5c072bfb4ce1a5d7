#pragma once

#include <span>
#include <vector>

#include "edgecalc/cylinder.hpp"
#include "edgecalc/symbols.hpp"

namespace edgecalc {

struct LeibnizPlan {
  int truncation = 3;  // N
};

/// Terms c_k = (1/k!) d_rho^k a D_r^k b for k = 0..N, with D_r = -i d_r.
/// Term k carries orders (mu_a + mu_b - k, nu_a + nu_b).
std::vector<EdgeSymbol> leibniz_terms(const EdgeSymbol& a, const EdgeSymbol& b, int n);

/// The truncated Leibniz product sum_{k<=N} c_k as one symbol.
EdgeSymbol leibniz_compose(const EdgeSymbol& a, const EdgeSymbol& b, int n);

/// | Op(a) Op(b) - sum_{k<=N} Op(c_k) | on the finite section; this measures
/// Op(r_N) without touching the oscillatory integral.
double composition_defect(const EdgeSymbol& a, const EdgeSymbol& b, int n,
                          std::span<const double> eta, const CylinderGrid& grid,
                          int cap = kMatrixCapDefault);

struct WeightCommutation {
  EdgeSymbol b;        // [r]^{-w} sum_{k<=N} (1/k!) d_rho^k a D_r^k [r]^w, orders (mu, nu)
  double defect = 0.0; // |Op(a) phi - phi Op(b)| at the probed eta
};

/// Prop-style commutation through phi = [r]^w.
WeightCommutation commute_weight(const EdgeSymbol& a, double weight_exponent, int n,
                                 std::span<const double> eta, const CylinderGrid& grid,
                                 int cap = kMatrixCapDefault);

/// Excised pointwise reciprocal with auto-calibrated excision constant.
/// Orders (-mu, -nu). Throws when the ellipticity probe fails.
EdgeSymbol parametrix(const EdgeSymbol& p);

/// Smallest dyadic C such that |tilde| >= lower_bound/2 * <z>^mu outside |z| >= C
/// on the probe grid.
double parametrix_excision_constant(const EdgeSymbol& p);

/// |Op(a) Op(b) - I| for a = [r]^mu p~^(-1), b = [r]^{-mu} p~ built with the
/// N-truncated Leibniz expansion of the left-inverse construction.
double left_inverse_residual(const EdgeSymbol& p, std::span<const double> eta, int n,
                             const CylinderGrid& grid, int cap = kMatrixCapDefault);

/// Left-inverse factors (a, b) as above, for callers that need the sections.
std::pair<EdgeSymbol, EdgeSymbol> left_inverse_factors(const EdgeSymbol& p);

/// Finite-section rank check of Op(b): full column rank certificate.
bool left_inverse_rank_certificate(const EdgeSymbol& p, std::span<const double> eta,
                                   const CylinderGrid& grid, int cap = kMatrixCapDefault);

/// Neumann correction d = sum_{j=1}^{N} (-1)^j c^{#j}, every Leibniz power
/// truncated at the same N. Requires orders (-1, 0) or more negative.
EdgeSymbol neumann_correct(const EdgeSymbol& c, int n);

/// |(I + Op(c))(I + Op(d)) - I| on the finite section.
double neumann_residual(const EdgeSymbol& c, const EdgeSymbol& d, std::span<const double> eta,
                        const CylinderGrid& grid, int cap = kMatrixCapDefault);

}  // namespace edgecalc
