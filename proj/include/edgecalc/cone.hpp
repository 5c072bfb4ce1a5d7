#pragma once

#include <span>
#include <vector>

#include "edgecalc/calculus.hpp"
#include "edgecalc/cylinder.hpp"
#include "edgecalc/symbols.hpp"

namespace edgecalc {

/// Weighted space H^{s,g}_cone on the truncated cylinder: the norm is
/// |[r]^{-s+g} Op_r(p~)(eta1) u|_{L^2} for the model elliptic reduction p~ of
/// order s at a fixed anchor eta1 beyond the calibrated invertibility radius.
struct ConeSpaceSpec {
  double s = 0.0;
  double g = 0.0;
  std::vector<double> anchor_eta;  // (C_dyadic, 0, ...)
  EdgeSymbol reducer;              // p^{s,g} = [r]^{-s+g} p~([r]rho, [r]eta), orders (s, -s+g)
  EdgeSymbol inverse_reducer;      // p^{-s,-g}, orders (-s, s-g)
  EdgeSymbol base;                 // p~ itself (orders (s, 0)); the norm applies it at eta1
  CylinderGrid grid;
};

/// Calibrates the anchor by dyadic search (left-inverse residual < 1/2);
/// aborts past eta = 2^10. use_cosx_base switches the reduction to the
/// non-multiplier perturbed family.
ConeSpaceSpec make_space(double s, double g, const CylinderGrid& grid,
                         bool use_cosx_base = false, int cap = kMatrixCapDefault);

/// |[r]^{-s+g} Op(p~)(eta1) u|_{L^2}; exactly |Op(p^{s,g})(eta1) u|_{L^2}.
double cone_norm(const CylinderFunction& u, const ConeSpaceSpec& spec);

/// max(|P^{s,g} P^{-s,-g} - I|, |P^{-s,-g} P^{s,g} - I|) at the given eta.
double iso_residual(const ConeSpaceSpec& spec, std::span<const double> eta,
                    int cap = kMatrixCapDefault);

/// |P^{s-mu,g-nu}(eta1) Op(a)(eta) (P^{s,g}(eta1))^{-1}| on the finite
/// section; requires iso_residual < 1 at the anchor (Neumann-certified
/// inverse).
double mapping_bound(const EdgeSymbol& a, const ConeSpaceSpec& from_space,
                     std::span<const double> eta, int cap = kMatrixCapDefault);

/// Same, with a precomputed target space (avoids re-calibration per eta).
double mapping_bound(const EdgeSymbol& a, const ConeSpaceSpec& from_space,
                     const ConeSpaceSpec& to_space, std::span<const double> eta,
                     int cap = kMatrixCapDefault);

/// The target spec H^{s-mu, g-nu} of Op(a) acting from from_space; shares the
/// anchor search with make_space.
ConeSpaceSpec target_space(const EdgeSymbol& a, const ConeSpaceSpec& from_space,
                           int cap = kMatrixCapDefault);

}  // namespace edgecalc
