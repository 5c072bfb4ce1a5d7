#include "edgecalc/calculus.hpp"

#include <cmath>
#include <stdexcept>

#include "edgecalc/bracket.hpp"

namespace edgecalc {

std::vector<EdgeSymbol> leibniz_terms(const EdgeSymbol& a, const EdgeSymbol& b, int n) {
  if (n < 0) throw std::invalid_argument("leibniz_terms: negative truncation");
  if (a.q() != b.q()) throw std::invalid_argument("leibniz_terms: q mismatch");
  if (a.oracle_depth() < n + 1 || b.oracle_depth() < n + 1)
    throw std::out_of_range("derivative oracle depth exceeded");
  std::vector<EdgeSymbol> terms;
  double factorial = 1.0;
  cd phase{1.0, 0.0};
  for (int k = 0; k <= n; ++k) {
    if (k > 0) {
      factorial *= k;
      phase *= cd{0.0, -1.0};  // D_r = -i d_r
    }
    EdgeSymbol term = edge_multiply(edge_deriv(a, 0, k), edge_deriv(b, k, 0));
    term = edge_scale(term, phase / factorial);
    terms.push_back(term.with_name("c" + std::to_string(k)));
  }
  return terms;
}

EdgeSymbol leibniz_compose(const EdgeSymbol& a, const EdgeSymbol& b, int n) {
  const std::vector<EdgeSymbol> terms = leibniz_terms(a, b, n);
  return edge_sum(terms, a.mu() + b.mu(), a.nu() + b.nu())
      .with_name(a.name() + "#" + b.name());
}

double composition_defect(const EdgeSymbol& a, const EdgeSymbol& b, int n,
                          std::span<const double> eta, const CylinderGrid& grid, int cap) {
  const CylinderOperator ma = assemble_operator(a, eta, grid, cap);
  const CylinderOperator mb = assemble_operator(b, eta, grid, cap);
  CylinderOperator defect = ma.multiply(mb);
  for (const EdgeSymbol& c : leibniz_terms(a, b, n))
    defect = defect.subtract(assemble_operator(c, eta, grid, cap));
  return defect.spectral_norm();
}

WeightCommutation commute_weight(const EdgeSymbol& a, double weight_exponent, int n,
                                 std::span<const double> eta, const CylinderGrid& grid, int cap) {
  if (a.oracle_depth() < n + 1) throw std::out_of_range("derivative oracle depth exceeded");
  const EdgeSymbol phi = bracket_power_symbol(weight_exponent, a.q());
  const EdgeSymbol expansion = leibniz_compose(a, phi, n);  // orders (mu, nu + w)
  const EdgeSymbol b =
      edge_multiply(bracket_power_symbol(-weight_exponent, a.q()), expansion)
          .with_orders(a.mu(), a.nu())
          .with_name("weight-commuted[" + a.name() + "]");

  WeightCommutation result{b, 0.0};
  const CylinderOperator ma = assemble_operator(a, eta, grid, cap);
  const CylinderOperator mphi = assemble_operator(phi, eta, grid, cap);
  const CylinderOperator mb = assemble_operator(b, eta, grid, cap);
  result.defect = ma.multiply(mphi).subtract(mphi.multiply(mb)).spectral_norm();
  return result;
}

double parametrix_excision_constant(const EdgeSymbol& p) {
  if (!p.elliptic) throw std::invalid_argument("parametrix: symbol is not registered elliptic");
  const double lb = p.elliptic->lower_bound;
  // probe |tilde| <z>^{-mu} [r]^{-nu} on dyadic shells outside candidate C
  const std::vector<double> r_probe = {0.0, 1.0, 4.0, 16.0};
  const std::vector<double> xs = {0.0, M_PI / 3, M_PI};
  for (double c = 1.0; c <= 64.0; c *= 2.0) {
    bool ok = true;
    for (double shell = c; shell <= 512.0 && ok; shell *= 2.0) {
      for (double r : r_probe) {
        for (double frac_xi : {0.0, 0.5}) {
          const double xi = std::round(shell * frac_xi);
          const double rest = std::sqrt(std::max(shell * shell - xi * xi, 0.0));
          for (double frac_rho : {0.0, 0.5, 1.0}) {
            const double rho_t = rest * frac_rho;
            const std::vector<double> eta_t = {std::sqrt(
                std::max(rest * rest - rho_t * rho_t, 0.0))};
            for (double x : xs) {
              const double mag =
                  std::abs(p.tilde_deriv(DerivOrder::none(p.q()), r, rho_t, eta_t, x, xi));
              const double scale = std::pow(angle_bracket(shell), p.mu()) *
                                   std::pow(bracket(r), p.nu());
              if (mag < 0.5 * lb * scale) {
                ok = false;
                break;
              }
            }
            if (!ok) break;
          }
          if (!ok) break;
        }
        if (!ok) break;
      }
    }
    if (ok) return c;
  }
  throw std::runtime_error("parametrix: ellipticity probe failure");
}

EdgeSymbol parametrix(const EdgeSymbol& p) {
  if (!p.elliptic) throw std::invalid_argument("parametrix: symbol is not registered elliptic");
  const double c = parametrix_excision_constant(p);
  const EdgeSymbol inverse = p.elliptic->make_inverse();
  return excise_multiply(inverse, c)
      .with_orders(-p.mu(), -p.nu())
      .with_name("parametrix[" + p.name() + "]");
}

std::pair<EdgeSymbol, EdgeSymbol> left_inverse_factors(const EdgeSymbol& p) {
  const EdgeSymbol inv = parametrix(p);
  const EdgeSymbol a =
      edge_multiply(bracket_power_symbol(p.mu(), p.q()), inv).with_name("left-factor");
  const EdgeSymbol b =
      edge_multiply(bracket_power_symbol(-p.mu(), p.q()), p).with_name("right-factor");
  return {a, b};
}

double left_inverse_residual(const EdgeSymbol& p, std::span<const double> eta, int n,
                             const CylinderGrid& grid, int cap) {
  const auto [a, b] = left_inverse_factors(p);
  const CylinderOperator ma = assemble_operator(a, eta, grid, cap);
  const CylinderOperator mb = assemble_operator(b, eta, grid, cap);
  (void)n;
  return ma.multiply(mb).subtract_identity().spectral_norm();
}

bool left_inverse_rank_certificate(const EdgeSymbol& p, std::span<const double> eta,
                                   const CylinderGrid& grid, int cap) {
  const auto [a, b] = left_inverse_factors(p);
  (void)a;
  return assemble_operator(b, eta, grid, cap).full_column_rank();
}

EdgeSymbol neumann_correct(const EdgeSymbol& c, int n) {
  if (!(c.mu() <= -1.0) || !(c.nu() <= 0.0))
    throw std::invalid_argument("neumann_correct: orders must be (-1, 0) or more negative");
  if (n < 1) throw std::invalid_argument("neumann_correct: need n >= 1");
  std::vector<EdgeSymbol> series;
  EdgeSymbol power = c;  // c^{#1}
  series.push_back(edge_scale(power, cd{-1.0, 0.0}));
  for (int j = 2; j <= n; ++j) {
    power = leibniz_compose(power, c, n);
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    series.push_back(edge_scale(power, cd{sign, 0.0}));
  }
  return edge_sum(series, c.mu(), c.nu()).with_name("neumann[" + c.name() + "]");
}

double neumann_residual(const EdgeSymbol& c, const EdgeSymbol& d, std::span<const double> eta,
                        const CylinderGrid& grid, int cap) {
  const CylinderOperator mc = assemble_operator(c, eta, grid, cap);
  const CylinderOperator md = assemble_operator(d, eta, grid, cap);
  // (I + C)(I + D) - I = C + D + C D
  return mc.add_identity().multiply(md.add_identity()).subtract_identity().spectral_norm();
}

}  // namespace edgecalc
