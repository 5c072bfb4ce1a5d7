#pragma once

#include "edgecalc/jet.hpp"

namespace edgecalc {

/// Maximum derivative order carried by the bracket oracle.
inline constexpr int kBracketMaxDeriv = 10;

/// Radius beyond which [r] coincides with |r| exactly.
inline constexpr double kBracketTransitionRadius = 2.0;

/// Smooth step built from exp(-1/t): 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t);
Jet smooth_step_jet(double t, int order);

/// The weight function r -> [r]: smooth, even, strictly positive,
/// [r] = |r| for |r| >= 2 and [0] = 1.
double bracket(double r);

/// k-th derivative of [r], k <= kBracketMaxDeriv.
double bracket_deriv(double r, int k);

/// Taylor jet of [r] at r, up to the given order.
Jet bracket_jet(double r, int order);

/// Radial excision profile: 0 for t <= 1/2, 1 for t >= 1, smooth monotone
/// in between (argument is |z|/c for an excision scale c).
double excision_profile(double t);

}  // namespace edgecalc
