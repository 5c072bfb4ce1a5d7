#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edgecalc/circle.hpp"
#include "edgecalc/sweep.hpp"

namespace edgecalc {

/// Mixed partial order in the tilde variables (r, rho~, eta~_1..eta~_q).
struct DerivOrder {
  int dr = 0;
  int drho = 0;
  std::vector<int> deta;

  static DerivOrder none(int q) { return {0, 0, std::vector<int>(static_cast<std::size_t>(q), 0)}; }
  int total() const {
    int t = dr + drho;
    for (int e : deta) t += e;
    return t;
  }
};

class TildeNode;
using NodePtr = std::shared_ptr<const TildeNode>;

/// Operator family a(r, rho, eta) = tilde(r, [r] rho, [r] eta) with scalar
/// amplitude values tilde(..)(x, xi) on the circle. Declared orders (mu, nu)
/// track the operator order and the [r]-growth order. Immutable.
class EdgeSymbol {
 public:
  EdgeSymbol() = default;
  EdgeSymbol(NodePtr tilde, double mu, double nu, int q, std::string name = "");

  double mu() const { return mu_; }
  double nu() const { return nu_; }
  int q() const { return q_; }
  const std::string& name() const { return name_; }
  const NodePtr& node() const { return tilde_; }

  bool multiplier() const;            // x-independent amplitude
  bool covariable_dependent() const;  // depends on (rho~, eta~)
  int oracle_depth() const;           // total derivative order available

  /// Mixed tilde-level partial at (r, rho~, eta~), amplitude argument (x, xi).
  cd tilde_deriv(const DerivOrder& order, double r, double rho_t, std::span<const double> eta_t,
                 double x, double xi) const;
  cd tilde_eval(double r, double rho_t, std::span<const double> eta_t, double x, double xi) const;

  /// Concrete evaluation a(r, rho, eta) = tilde(r, [r] rho, [r] eta).
  cd eval(double r, double rho, std::span<const double> eta, double x, double xi) const;

  struct EllipticInfo {
    double lower_bound = 1.0;  // inf |tilde| <z>^{-mu} over the probe grid
    std::function<EdgeSymbol()> make_inverse;  // exact pointwise reciprocal symbol
  };
  std::optional<EllipticInfo> elliptic;

  EdgeSymbol with_name(std::string n) const;
  EdgeSymbol with_orders(double mu, double nu) const;

 private:
  NodePtr tilde_;
  double mu_ = 0.0, nu_ = 0.0;
  int q_ = 1;
  std::string name_;
};

/// Wraps a user evaluation callable with centered finite-difference oracles
/// (step 1e-4 * (1 + |argument|)). depth bounds the total derivative order.
EdgeSymbol make_edge_symbol(
    std::function<cd(double r, double rho_t, std::span<const double> eta_t, double x, double xi)>
        tilde,
    double mu, double nu, int q = 1, int depth = 6);

/// Partial derivative in edge variables: i in r, j in rho, alpha in eta.
/// Resulting orders: (mu - j - |alpha|, nu - i + j + |alpha|).
EdgeSymbol edge_deriv(const EdgeSymbol& a, int i, int j, std::span<const int> alpha);
EdgeSymbol edge_deriv(const EdgeSymbol& a, int i, int j, int alpha_scalar = 0);

/// Pointwise product at tilde level; orders add. q must match.
EdgeSymbol edge_multiply(const EdgeSymbol& a, const EdgeSymbol& b);

EdgeSymbol edge_scale(const EdgeSymbol& a, cd factor);

/// Sum with declared orders (the caller owns the order bookkeeping).
EdgeSymbol edge_sum(std::span<const EdgeSymbol> terms, double mu, double nu);

/// The weight [r]^g as an edge symbol of orders (0, g).
EdgeSymbol bracket_power_symbol(double g, int q = 1);

/// chi((xi, rho~, eta~)/C) * a at tilde level; the excision step of the
/// parametrix construction. Orders are unchanged.
EdgeSymbol excise_multiply(const EdgeSymbol& a, double C);

// --- defining-estimate checker -------------------------------------------

struct SeminormSampleSpec {
  std::vector<double> r_samples = {0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0};
  std::vector<std::array<double, 2>> cov_dirs = {{1.0, 0.0}, {M_SQRT1_2, M_SQRT1_2}, {0.0, 1.0}};
  std::vector<double> cov_mags = {1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0};
  int max_k = 2;                       // r-derivative orders checked
  std::optional<SobolevPair> sp;       // default (0, -mu)
  int n_modes = 8;
  double ratio_bound = 1e3;
};

struct SeminormKReport {
  int k = 0;
  double max_ratio = 0.0;     // sup over samples of weighted norm * [r]^{k - nu}
  double r_exponent = 0.0;    // fit of the r-profile, compared against nu - k
  double r_fit_residual = 0.0;
  bool pass = false;
};

struct CheckReport {
  std::vector<SeminormKReport> per_k;
  double cov_exponent = 0.0;  // <rho~, eta~>-exponent at frozen r
  double cov_fit_residual = 0.0;
  bool passed = false;
};

/// Checks the defining estimates of the class on sampled grids.
CheckReport seminorm_check(const EdgeSymbol& a, const SeminormSampleSpec& spec);

/// Relative error of the tilde derivative oracle against centered finite
/// differences over a deterministic random sample (order-1 derivatives).
double derivative_oracle_defect(const EdgeSymbol& a, int samples, std::uint64_t seed);

// --- asymptotic summation --------------------------------------------------

struct AsymptoticSumPlan {
  std::vector<EdgeSymbol> terms;   // orders must decrease strictly (mu - j)
  std::vector<double> constants;   // optional; auto-selected when empty
};

struct AsymptoticSumResult {
  EdgeSymbol sum;                  // tilde = sum_j chi((rho~,eta~)/c_j) tilde_j
  std::vector<double> constants;   // the c_j actually used
};

AsymptoticSumResult asymptotic_sum(const AsymptoticSumPlan& plan);

// --- registry ----------------------------------------------------------------

/// Built-in generators addressable by string id:
///   "one", "elliptic:s", "weighted-elliptic:s:g", "cosx-perturbed:s",
///   "order-reduce:s"  (s, g decimal literals).
EdgeSymbol registry_symbol(const std::string& id);
bool registry_has(const std::string& id);

/// The concrete instances exercised by the acceptance suite.
std::vector<std::string> registry_canonical_ids();

/// (pattern, description) pairs for `list-symbols`.
std::vector<std::pair<std::string, std::string>> registry_patterns();

}  // namespace edgecalc
