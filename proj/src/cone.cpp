#include "edgecalc/cone.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace edgecalc {

namespace {

EdgeSymbol base_symbol(double s, bool use_cosx) {
  const std::string id =
      (use_cosx ? std::string("cosx-perturbed:") : std::string("elliptic:")) + std::to_string(s);
  return registry_symbol(id);
}

EdgeSymbol reduce_symbol(const EdgeSymbol& base, double s, double g) {
  return edge_multiply(bracket_power_symbol(-s + g, base.q()), base)
      .with_orders(s, -s + g)
      .with_name("reducer(" + std::to_string(s) + "," + std::to_string(g) + ")");
}

}  // namespace

ConeSpaceSpec make_space(double s, double g, const CylinderGrid& grid, bool use_cosx_base,
                         int cap) {
  ConeSpaceSpec spec;
  spec.s = s;
  spec.g = g;
  spec.grid = grid;
  spec.base = base_symbol(s, use_cosx_base);
  spec.reducer = reduce_symbol(spec.base, s, g);
  const EdgeSymbol inv_base = parametrix(spec.base);
  spec.inverse_reducer = edge_multiply(bracket_power_symbol(s - g, spec.base.q()), inv_base)
                             .with_orders(-s, s - g)
                             .with_name("inverse-reducer");

  // anchor calibration: smallest dyadic with left-inverse residual < 1/2
  double anchor = 0.0;
  for (double c = 1.0; c <= 1024.0; c *= 2.0) {
    const std::vector<double> eta = {c};
    const double residual = left_inverse_residual(spec.base, eta, 1, grid, cap);
    if (residual < 0.5) {
      anchor = c;
      break;
    }
  }
  if (anchor == 0.0)
    throw std::runtime_error("make_space: anchor calibration failed within eta <= 2^10");
  spec.anchor_eta = {anchor};
  return spec;
}

double cone_norm(const CylinderFunction& u, const ConeSpaceSpec& spec) {
  if (!(u.grid() == spec.grid)) throw std::invalid_argument("cone_norm: grid mismatch");
  const CylinderFunction pu = op_apply(spec.base, spec.anchor_eta, u);
  return weighted_norm_cyl(pu, -spec.s + spec.g);
}

double iso_residual(const ConeSpaceSpec& spec, std::span<const double> eta, int cap) {
  const CylinderOperator p = assemble_operator(spec.reducer, eta, spec.grid, cap);
  const CylinderOperator pinv = assemble_operator(spec.inverse_reducer, eta, spec.grid, cap);
  const double right = p.multiply(pinv).subtract_identity().spectral_norm();
  const double left = pinv.multiply(p).subtract_identity().spectral_norm();
  return std::max(right, left);
}

ConeSpaceSpec target_space(const EdgeSymbol& a, const ConeSpaceSpec& from_space, int cap) {
  return make_space(from_space.s - a.mu(), from_space.g - a.nu(), from_space.grid, false, cap);
}

double mapping_bound(const EdgeSymbol& a, const ConeSpaceSpec& from_space,
                     const ConeSpaceSpec& to_space, std::span<const double> eta, int cap) {
  const double anchor_residual = iso_residual(from_space, from_space.anchor_eta, cap);
  if (!(anchor_residual < 1.0))
    throw std::runtime_error("mapping_bound: reduction inverse not certified (iso residual >= 1)");
  const CylinderOperator p_to =
      assemble_operator(to_space.reducer, from_space.anchor_eta, from_space.grid, cap);
  const CylinderOperator op_a = assemble_operator(a, eta, from_space.grid, cap);
  const CylinderOperator p_from =
      assemble_operator(from_space.reducer, from_space.anchor_eta, from_space.grid, cap);
  return p_to.multiply(op_a).multiply(p_from.inverse()).spectral_norm();
}

double mapping_bound(const EdgeSymbol& a, const ConeSpaceSpec& from_space,
                     std::span<const double> eta, int cap) {
  const ConeSpaceSpec to_space = target_space(a, from_space, cap);
  return mapping_bound(a, from_space, to_space, eta, cap);
}

}  // namespace edgecalc
