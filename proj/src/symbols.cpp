#include "edgecalc/symbols.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "edgecalc/bracket.hpp"
#include "edgecalc/powerpoly.hpp"
#include "edgecalc/rng.hpp"

namespace edgecalc {

namespace {

struct TildeArg {
  double r = 0.0;
  double rho_t = 0.0;
  std::span<const double> eta_t;
  double x = 0.0;
  double xi = 0.0;
};

std::uint64_t pack_order(const DerivOrder& o) {
  std::uint64_t key = static_cast<std::uint64_t>(o.dr) | (static_cast<std::uint64_t>(o.drho) << 4);
  int shift = 8;
  for (int e : o.deta) {
    key |= static_cast<std::uint64_t>(e) << shift;
    shift += 4;
  }
  return key;
}

struct CacheKey {
  const void* node;
  std::uint64_t order;
  bool operator==(const CacheKey&) const = default;
};

struct CacheKeyHash {
  std::size_t operator()(const CacheKey& k) const {
    std::uint64_t z = reinterpret_cast<std::uintptr_t>(k.node) ^ (k.order * 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    return static_cast<std::size_t>(z ^ (z >> 31));
  }
};

struct EvalCache {
  std::unordered_map<CacheKey, cd, CacheKeyHash> map;
};

}  // namespace

/// DAG node for tilde amplitudes. Nodes are immutable; evaluation memoizes per
/// point through the EvalCache that tilde_deriv owns.
class TildeNode {
 public:
  virtual ~TildeNode() = default;

  cd deriv(const DerivOrder& order, const TildeArg& arg, EvalCache& cache) const {
    if (!cacheable()) return deriv_impl(order, arg, cache);
    const CacheKey key{this, pack_order(order)};
    if (const auto it = cache.map.find(key); it != cache.map.end()) return it->second;
    const cd v = deriv_impl(order, arg, cache);
    cache.map.emplace(key, v);
    return v;
  }

  virtual bool cacheable() const { return true; }
  virtual bool multiplier() const = 0;
  virtual bool cov_dep() const = 0;
  virtual int depth() const = 0;

 protected:
  virtual cd deriv_impl(const DerivOrder&, const TildeArg&, EvalCache&) const = 0;
};

namespace {

constexpr int kLargeDepth = 1 << 20;

// ---- radial factors (functions of r alone) --------------------------------

class RadialFunc {
 public:
  virtual ~RadialFunc() = default;
  virtual double deriv(int k, double r) const = 0;
  virtual int depth() const = 0;
};

class ConstRadial final : public RadialFunc {
 public:
  explicit ConstRadial(double c) : c_(c) {}
  double deriv(int k, double) const override { return k == 0 ? c_ : 0.0; }
  int depth() const override { return kLargeDepth; }

 private:
  double c_;
};

class BracketPowRadial final : public RadialFunc {
 public:
  explicit BracketPowRadial(double g) : g_(g) {}
  double deriv(int k, double r) const override {
    if (g_ == 0.0) return k == 0 ? 1.0 : 0.0;
    if (k == 0) return std::pow(bracket(r), g_);
    return bracket_jet(r, k).pow(g_).deriv(k);
  }
  int depth() const override { return kBracketMaxDeriv; }

 private:
  double g_;
};

// [r]'/[r]
class BracketQuotRadial final : public RadialFunc {
 public:
  double deriv(int k, double r) const override {
    if (k == 0) return bracket_deriv(r, 1) / bracket(r);
    const Jet b = bracket_jet(r, k + 1);
    const Jet q = b.derivative() * b.truncated(k).reciprocal();
    return q.deriv(k);
  }
  int depth() const override { return kBracketMaxDeriv - 1; }
};

// ---- covariable factors (functions of (xi, rho~, eta~)) -------------------

class CovFunc {
 public:
  virtual ~CovFunc() = default;
  virtual double deriv(int drho, std::span<const int> deta, double xi, double rho,
                       std::span<const double> eta) const = 0;
  virtual bool dep() const = 0;
  virtual int depth() const = 0;
};

class UnitCov final : public CovFunc {
 public:
  double deriv(int drho, std::span<const int> deta, double, double,
               std::span<const double>) const override {
    int total = drho;
    for (int e : deta) total += e;
    return total == 0 ? 1.0 : 0.0;
  }
  bool dep() const override { return false; }
  int depth() const override { return kLargeDepth; }
};

// Any mixed partial of c * xi^a rho^b eta^c (1+|(xi,rho,eta)|^2)^p, exact.
class PowerPolyCov final : public CovFunc {
 public:
  PowerPolyCov(std::shared_ptr<const PowerPolyDerivs> table, int q, bool dep)
      : table_(std::move(table)), q_(q), dep_(dep) {}

  double deriv(int drho, std::span<const int> deta, double xi, double rho,
               std::span<const double> eta) const override {
    std::array<int, 10> order{};
    std::array<double, 10> w{};
    order[1] = drho;
    w[0] = xi;
    w[1] = rho;
    for (int i = 0; i < q_; ++i) {
      order[static_cast<std::size_t>(2 + i)] = deta[static_cast<std::size_t>(i)];
      w[static_cast<std::size_t>(2 + i)] = eta[static_cast<std::size_t>(i)];
    }
    const std::size_t n = static_cast<std::size_t>(2 + q_);
    return table_->eval({order.data(), n}, {w.data(), n});
  }
  bool dep() const override { return dep_; }
  int depth() const override { return table_->max_order(); }

 private:
  std::shared_ptr<const PowerPolyDerivs> table_;
  int q_;
  bool dep_;
};

// Excision factor chi(|z|/c) with z = (rho~, eta~) or (xi, rho~, eta~).
// Exact 0/1 outside the transition shell; finite differences inside.
class ChiCov final : public CovFunc {
 public:
  ChiCov(double c, bool include_xi) : c_(c), include_xi_(include_xi) {}

  double deriv(int drho, std::span<const int> deta, double xi, double rho,
               std::span<const double> eta) const override {
    int total = drho;
    for (int e : deta) total += e;
    if (total == 0) return value(xi, rho, eta);
    const double t = radius(xi, rho, eta) / c_;
    if (t <= 0.5 - kMargin || t >= 1.0 + kMargin) return 0.0;
    // centered difference in the first requested direction
    const double h = 1e-3 * c_;
    std::vector<double> eta_v(eta.begin(), eta.end());
    if (drho > 0) {
      const double lo = deriv(drho - 1, deta, xi, rho - h, eta_v);
      const double hi = deriv(drho - 1, deta, xi, rho + h, eta_v);
      return (hi - lo) / (2.0 * h);
    }
    for (std::size_t i = 0; i < deta.size(); ++i) {
      if (deta[i] > 0) {
        std::vector<int> rest(deta.begin(), deta.end());
        --rest[i];
        eta_v[i] -= h;
        const double lo = deriv(drho, rest, xi, rho, eta_v);
        eta_v[i] += 2.0 * h;
        const double hi = deriv(drho, rest, xi, rho, eta_v);
        return (hi - lo) / (2.0 * h);
      }
    }
    return 0.0;
  }
  bool dep() const override { return true; }
  int depth() const override { return 8; }

 private:
  static constexpr double kMargin = 1e-9;

  double radius(double xi, double rho, std::span<const double> eta) const {
    double s = rho * rho;
    if (include_xi_) s += xi * xi;
    for (double e : eta) s += e * e;
    return std::sqrt(s);
  }
  double value(double xi, double rho, std::span<const double> eta) const {
    return excision_profile(radius(xi, rho, eta) / c_);
  }

  double c_;
  bool include_xi_;
};

// ---- amplitude in x --------------------------------------------------------

enum class Angular { kOne, kOnePlusHalfCos, kInvOnePlusHalfCos };

double angular_eval(Angular s, double x) {
  switch (s) {
    case Angular::kOne: return 1.0;
    case Angular::kOnePlusHalfCos: return 1.0 + 0.5 * std::cos(x);
    case Angular::kInvOnePlusHalfCos: return 1.0 / (1.0 + 0.5 * std::cos(x));
  }
  return 1.0;
}

// ---- nodes -----------------------------------------------------------------

class SeparableAtom final : public TildeNode {
 public:
  SeparableAtom(std::shared_ptr<const RadialFunc> w, Angular s, std::shared_ptr<const CovFunc> f)
      : w_(std::move(w)), s_(s), f_(std::move(f)) {}

  bool cacheable() const override { return false; }
  bool multiplier() const override { return s_ == Angular::kOne; }
  bool cov_dep() const override { return f_->dep(); }
  int depth() const override { return std::min(w_->depth(), f_->depth()); }

 protected:
  cd deriv_impl(const DerivOrder& o, const TildeArg& a, EvalCache&) const override {
    const double radial = w_->deriv(o.dr, a.r);
    if (radial == 0.0) return cd{0.0, 0.0};
    return radial * angular_eval(s_, a.x) * f_->deriv(o.drho, o.deta, a.xi, a.rho_t, a.eta_t);
  }

 private:
  std::shared_ptr<const RadialFunc> w_;
  Angular s_;
  std::shared_ptr<const CovFunc> f_;
};

class SumNode final : public TildeNode {
 public:
  explicit SumNode(std::vector<std::pair<cd, NodePtr>> terms) : terms_(std::move(terms)) {}

  bool multiplier() const override {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const auto& t) { return t.second->multiplier(); });
  }
  bool cov_dep() const override {
    return std::any_of(terms_.begin(), terms_.end(),
                       [](const auto& t) { return t.second->cov_dep(); });
  }
  int depth() const override {
    int d = kLargeDepth;
    for (const auto& t : terms_) d = std::min(d, t.second->depth());
    return d;
  }

 protected:
  cd deriv_impl(const DerivOrder& o, const TildeArg& a, EvalCache& c) const override {
    cd acc{0.0, 0.0};
    for (const auto& [coef, node] : terms_) acc += coef * node->deriv(o, a, c);
    return acc;
  }

 private:
  std::vector<std::pair<cd, NodePtr>> terms_;
};

class ProductNode final : public TildeNode {
 public:
  ProductNode(NodePtr a, NodePtr b, cd scale = cd{1.0, 0.0})
      : a_(std::move(a)), b_(std::move(b)), scale_(scale) {}

  bool multiplier() const override { return a_->multiplier() && b_->multiplier(); }
  bool cov_dep() const override { return a_->cov_dep() || b_->cov_dep(); }
  int depth() const override { return std::min(a_->depth(), b_->depth()); }

 protected:
  cd deriv_impl(const DerivOrder& o, const TildeArg& arg, EvalCache& c) const override {
    const int q = static_cast<int>(o.deta.size());
    cd acc{0.0, 0.0};
    // odometer over all sub-orders of o, with binomial weights
    DerivOrder lo = DerivOrder::none(q);
    for (;;) {
      DerivOrder ro;
      ro.dr = o.dr - lo.dr;
      ro.drho = o.drho - lo.drho;
      ro.deta.resize(static_cast<std::size_t>(q));
      double coef = binom(o.dr, lo.dr) * binom(o.drho, lo.drho);
      for (int i = 0; i < q; ++i) {
        ro.deta[static_cast<std::size_t>(i)] =
            o.deta[static_cast<std::size_t>(i)] - lo.deta[static_cast<std::size_t>(i)];
        coef *= binom(o.deta[static_cast<std::size_t>(i)], lo.deta[static_cast<std::size_t>(i)]);
      }
      acc += coef * a_->deriv(lo, arg, c) * b_->deriv(ro, arg, c);
      if (++lo.dr <= o.dr) continue;
      lo.dr = 0;
      if (++lo.drho <= o.drho) continue;
      lo.drho = 0;
      int i = 0;
      for (; i < q; ++i) {
        if (++lo.deta[static_cast<std::size_t>(i)] <= o.deta[static_cast<std::size_t>(i)]) break;
        lo.deta[static_cast<std::size_t>(i)] = 0;
      }
      if (i == q) break;
    }
    return scale_ * acc;
  }

 private:
  static double binom(int n, int k) {
    double v = 1.0;
    for (int i = 0; i < k; ++i) v = v * (n - i) / (i + 1);
    return v;
  }

  NodePtr a_, b_;
  cd scale_;
};

class ShiftNode final : public TildeNode {
 public:
  ShiftNode(NodePtr base, DerivOrder shift) : base_(std::move(base)), shift_(std::move(shift)) {}

  bool multiplier() const override { return base_->multiplier(); }
  bool cov_dep() const override { return base_->cov_dep(); }
  int depth() const override { return base_->depth() - shift_.total(); }

  const NodePtr& base() const { return base_; }
  const DerivOrder& shift() const { return shift_; }

 protected:
  cd deriv_impl(const DerivOrder& o, const TildeArg& a, EvalCache& c) const override {
    DerivOrder combined = o;
    combined.dr += shift_.dr;
    combined.drho += shift_.drho;
    for (std::size_t i = 0; i < combined.deta.size(); ++i) combined.deta[i] += shift_.deta[i];
    return base_->deriv(combined, a, c);
  }

 private:
  NodePtr base_;
  DerivOrder shift_;
};

// User-supplied amplitude with nested centered differences.
class FdAtom final : public TildeNode {
 public:
  using Fn = std::function<cd(double, double, std::span<const double>, double, double)>;
  FdAtom(Fn f, int q, int depth) : f_(std::move(f)), q_(q), depth_(depth) {}

  bool multiplier() const override { return false; }
  bool cov_dep() const override { return true; }
  int depth() const override { return depth_; }

 protected:
  cd deriv_impl(const DerivOrder& o, const TildeArg& a, EvalCache&) const override {
    if (o.total() > depth_) throw std::out_of_range("derivative oracle depth exceeded");
    std::vector<double> eta(a.eta_t.begin(), a.eta_t.end());
    return fd(o, a.r, a.rho_t, eta, a.x, a.xi);
  }

 private:
  cd fd(DerivOrder o, double r, double rho, std::vector<double>& eta, double x, double xi) const {
    if (o.dr > 0) {
      --o.dr;
      const double h = 1e-4 * (1.0 + std::abs(r));
      const cd hi = fd(o, r + h, rho, eta, x, xi);
      const cd lo = fd(o, r - h, rho, eta, x, xi);
      return (hi - lo) / (2.0 * h);
    }
    if (o.drho > 0) {
      --o.drho;
      const double h = 1e-4 * (1.0 + std::abs(rho));
      const cd hi = fd(o, r, rho + h, eta, x, xi);
      const cd lo = fd(o, r, rho - h, eta, x, xi);
      return (hi - lo) / (2.0 * h);
    }
    for (std::size_t i = 0; i < o.deta.size(); ++i) {
      if (o.deta[i] > 0) {
        --o.deta[i];
        const double h = 1e-4 * (1.0 + std::abs(eta[i]));
        eta[i] += h;
        const cd hi = fd(o, r, rho, eta, x, xi);
        eta[i] -= 2.0 * h;
        const cd lo = fd(o, r, rho, eta, x, xi);
        eta[i] += h;
        return (hi - lo) / (2.0 * h);
      }
    }
    return f_(r, rho, eta, x, xi);
  }

  Fn f_;
  int q_;
  int depth_;
};

// ---- node builders ---------------------------------------------------------

NodePtr make_atom(std::shared_ptr<const RadialFunc> w, Angular s, std::shared_ptr<const CovFunc> f) {
  return std::make_shared<SeparableAtom>(std::move(w), s, std::move(f));
}

std::shared_ptr<const CovFunc> unit_cov() {
  static const auto u = std::make_shared<UnitCov>();
  return u;
}

std::shared_ptr<const PowerPolyDerivs> power_table(PowerPoly p, int depth = 8) {
  return std::make_shared<PowerPolyDerivs>(std::move(p), depth);
}

std::shared_ptr<const CovFunc> angle_power_cov(int q, double s) {
  if (s == 0.0) return unit_cov();
  return std::make_shared<PowerPolyCov>(power_table(PowerPoly::angle_power(2 + q, s)), q, true);
}

std::shared_ptr<const CovFunc> monomial_cov(int q, int var) {
  return std::make_shared<PowerPolyCov>(power_table(PowerPoly::monomial(2 + q, var)), q, true);
}

NodePtr bracket_pow_node(double g) {
  return make_atom(std::make_shared<BracketPowRadial>(g), Angular::kOne, unit_cov());
}

NodePtr quot_node() {
  return make_atom(std::make_shared<BracketQuotRadial>(), Angular::kOne, unit_cov());
}

NodePtr mono_rho_node(int q) {
  return make_atom(std::make_shared<ConstRadial>(1.0), Angular::kOne, monomial_cov(q, 1));
}

NodePtr mono_eta_node(int q, int comp) {
  return make_atom(std::make_shared<ConstRadial>(1.0), Angular::kOne, monomial_cov(q, 2 + comp));
}

NodePtr shift_node(NodePtr base, DerivOrder shift) {
  // merge nested shifts
  if (const auto* s = dynamic_cast<const ShiftNode*>(base.get())) {
    DerivOrder merged = s->shift();
    merged.dr += shift.dr;
    merged.drho += shift.drho;
    for (std::size_t i = 0; i < merged.deta.size(); ++i) merged.deta[i] += shift.deta[i];
    return std::make_shared<ShiftNode>(s->base(), std::move(merged));
  }
  return std::make_shared<ShiftNode>(std::move(base), std::move(shift));
}

NodePtr product_node(NodePtr a, NodePtr b, cd scale = cd{1.0, 0.0}) {
  return std::make_shared<ProductNode>(std::move(a), std::move(b), scale);
}

NodePtr sum_node(std::vector<std::pair<cd, NodePtr>> terms) {
  return std::make_shared<SumNode>(std::move(terms));
}

// Edge-level partial derivatives expressed at tilde level.
NodePtr d_rho_edge(NodePtr t, int q) {
  DerivOrder o = DerivOrder::none(q);
  o.drho = 1;
  return product_node(bracket_pow_node(1.0), shift_node(std::move(t), std::move(o)));
}

NodePtr d_eta_edge(NodePtr t, int q, int comp) {
  DerivOrder o = DerivOrder::none(q);
  o.deta[static_cast<std::size_t>(comp)] = 1;
  return product_node(bracket_pow_node(1.0), shift_node(std::move(t), std::move(o)));
}

NodePtr d_r_edge(NodePtr t, int q) {
  DerivOrder dr = DerivOrder::none(q);
  dr.dr = 1;
  DerivOrder drho = DerivOrder::none(q);
  drho.drho = 1;
  std::vector<std::pair<cd, NodePtr>> chain;
  chain.push_back({cd{1.0, 0.0}, product_node(mono_rho_node(q), shift_node(t, drho))});
  for (int comp = 0; comp < q; ++comp) {
    DerivOrder de = DerivOrder::none(q);
    de.deta[static_cast<std::size_t>(comp)] = 1;
    chain.push_back({cd{1.0, 0.0}, product_node(mono_eta_node(q, comp), shift_node(t, de))});
  }
  return sum_node({{cd{1.0, 0.0}, shift_node(t, dr)},
                   {cd{1.0, 0.0}, product_node(quot_node(), sum_node(std::move(chain)))}});
}

}  // namespace

// ---- EdgeSymbol ------------------------------------------------------------

EdgeSymbol::EdgeSymbol(NodePtr tilde, double mu, double nu, int q, std::string name)
    : tilde_(std::move(tilde)), mu_(mu), nu_(nu), q_(q), name_(std::move(name)) {
  if (q_ < 1) throw std::invalid_argument("EdgeSymbol: q must be >= 1");
}

bool EdgeSymbol::multiplier() const { return tilde_->multiplier(); }
bool EdgeSymbol::covariable_dependent() const { return tilde_->cov_dep(); }
int EdgeSymbol::oracle_depth() const { return tilde_->depth(); }

cd EdgeSymbol::tilde_deriv(const DerivOrder& order, double r, double rho_t,
                           std::span<const double> eta_t, double x, double xi) const {
  if (static_cast<int>(order.deta.size()) != q_)
    throw std::invalid_argument("tilde_deriv: eta derivative order has wrong dimension");
  if (static_cast<int>(eta_t.size()) != q_)
    throw std::invalid_argument("tilde_deriv: eta argument has wrong dimension");
  const TildeArg arg{r, rho_t, eta_t, x, xi};
  thread_local EvalCache cache;
  thread_local bool in_use = false;
  if (in_use) {  // re-entrant use (user callables may evaluate other symbols)
    EvalCache local;
    return tilde_->deriv(order, arg, local);
  }
  in_use = true;
  cache.map.clear();
  const cd v = [&] {
    try {
      return tilde_->deriv(order, arg, cache);
    } catch (...) {
      in_use = false;
      throw;
    }
  }();
  in_use = false;
  return v;
}

cd EdgeSymbol::tilde_eval(double r, double rho_t, std::span<const double> eta_t, double x,
                          double xi) const {
  return tilde_deriv(DerivOrder::none(q_), r, rho_t, eta_t, x, xi);
}

cd EdgeSymbol::eval(double r, double rho, std::span<const double> eta, double x, double xi) const {
  const double br = bracket(r);
  std::vector<double> eta_t(eta.size());
  for (std::size_t i = 0; i < eta.size(); ++i) eta_t[i] = br * eta[i];
  return tilde_eval(r, br * rho, eta_t, x, xi);
}

EdgeSymbol EdgeSymbol::with_name(std::string n) const {
  EdgeSymbol s = *this;
  s.name_ = std::move(n);
  return s;
}

EdgeSymbol EdgeSymbol::with_orders(double mu, double nu) const {
  EdgeSymbol s = *this;
  s.mu_ = mu;
  s.nu_ = nu;
  return s;
}

EdgeSymbol make_edge_symbol(
    std::function<cd(double, double, std::span<const double>, double, double)> tilde, double mu,
    double nu, int q, int depth) {
  if (!tilde) throw std::invalid_argument("make_edge_symbol: missing derivative oracle source");
  return EdgeSymbol(std::make_shared<FdAtom>(std::move(tilde), q, depth), mu, nu, q,
                    "user-symbol");
}

EdgeSymbol edge_deriv(const EdgeSymbol& a, int i, int j, std::span<const int> alpha) {
  if (static_cast<int>(alpha.size()) != a.q() && !alpha.empty())
    throw std::invalid_argument("edge_deriv: alpha dimension mismatch");
  int total_alpha = 0;
  for (int e : alpha) total_alpha += e;
  const int total = i + j + total_alpha;
  if (a.oracle_depth() < total) throw std::out_of_range("derivative oracle depth exceeded");
  NodePtr node = a.node();
  for (int k = 0; k < j; ++k) node = d_rho_edge(node, a.q());
  for (std::size_t comp = 0; comp < alpha.size(); ++comp)
    for (int k = 0; k < alpha[comp]; ++k) node = d_eta_edge(node, a.q(), static_cast<int>(comp));
  for (int k = 0; k < i; ++k) node = d_r_edge(node, a.q());
  std::ostringstream name;
  name << "d(" << i << "," << j << "," << total_alpha << ")[" << a.name() << "]";
  return EdgeSymbol(node, a.mu() - j - total_alpha, a.nu() - i + j + total_alpha, a.q(),
                    name.str());
}

EdgeSymbol edge_deriv(const EdgeSymbol& a, int i, int j, int alpha_scalar) {
  std::vector<int> alpha(static_cast<std::size_t>(a.q()), 0);
  if (alpha_scalar != 0) alpha[0] = alpha_scalar;
  return edge_deriv(a, i, j, alpha);
}

EdgeSymbol edge_multiply(const EdgeSymbol& a, const EdgeSymbol& b) {
  if (a.q() != b.q()) throw std::invalid_argument("edge_multiply: q mismatch");
  return EdgeSymbol(product_node(a.node(), b.node()), a.mu() + b.mu(), a.nu() + b.nu(), a.q(),
                    a.name() + "*" + b.name());
}

EdgeSymbol edge_scale(const EdgeSymbol& a, cd factor) {
  return EdgeSymbol(sum_node({{factor, a.node()}}), a.mu(), a.nu(), a.q(), a.name());
}

EdgeSymbol edge_sum(std::span<const EdgeSymbol> terms, double mu, double nu) {
  if (terms.empty()) throw std::invalid_argument("edge_sum: empty term list");
  const int q = terms[0].q();
  std::vector<std::pair<cd, NodePtr>> nodes;
  for (const auto& t : terms) {
    if (t.q() != q) throw std::invalid_argument("edge_sum: q mismatch");
    nodes.push_back({cd{1.0, 0.0}, t.node()});
  }
  return EdgeSymbol(sum_node(std::move(nodes)), mu, nu, q, "sum");
}

EdgeSymbol bracket_power_symbol(double g, int q) {
  std::ostringstream name;
  name << "[r]^" << g;
  return EdgeSymbol(bracket_pow_node(g), 0.0, g, q, name.str());
}

// ---- registry --------------------------------------------------------------

namespace {

EdgeSymbol build_elliptic(double s, int q, const std::string& name) {
  EdgeSymbol sym(make_atom(std::make_shared<ConstRadial>(1.0), Angular::kOne, angle_power_cov(q, s)),
                 s, 0.0, q, name);
  sym.elliptic = EdgeSymbol::EllipticInfo{
      1.0, [s, q, name] { return build_elliptic(-s, q, name + "^(-1)"); }};
  return sym;
}

EdgeSymbol build_weighted_elliptic(double s, double g, int q, const std::string& name) {
  EdgeSymbol sym(
      make_atom(std::make_shared<BracketPowRadial>(g), Angular::kOne, angle_power_cov(q, s)), s, g,
      q, name);
  sym.elliptic = EdgeSymbol::EllipticInfo{
      1.0, [s, g, q, name] { return build_weighted_elliptic(-s, -g, q, name + "^(-1)"); }};
  return sym;
}

EdgeSymbol build_cosx(double s, int q, const std::string& name, bool inverse_branch = false) {
  const Angular ang = inverse_branch ? Angular::kInvOnePlusHalfCos : Angular::kOnePlusHalfCos;
  EdgeSymbol sym(make_atom(std::make_shared<ConstRadial>(1.0), ang, angle_power_cov(q, s)), s, 0.0,
                 q, name);
  sym.elliptic = EdgeSymbol::EllipticInfo{
      inverse_branch ? 2.0 / 3.0 : 0.5,
      [s, q, name, inverse_branch] { return build_cosx(-s, q, name + "^(-1)", !inverse_branch); }};
  return sym;
}

EdgeSymbol build_one(int q) {
  EdgeSymbol sym(make_atom(std::make_shared<ConstRadial>(1.0), Angular::kOne, unit_cov()), 0.0,
                 0.0, q, "one");
  sym.elliptic = EdgeSymbol::EllipticInfo{1.0, [q] { return build_one(q); }};
  return sym;
}

std::vector<double> parse_params(const std::string& id, std::size_t expected) {
  std::vector<double> out;
  std::size_t pos = id.find(':');
  while (pos != std::string::npos) {
    const std::size_t next = id.find(':', pos + 1);
    const std::string tok = id.substr(pos + 1, next == std::string::npos ? next : next - pos - 1);
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument("trailing");
      out.push_back(v);
    } catch (...) {
      throw std::invalid_argument("registry: malformed parameter in symbol id '" + id + "'");
    }
    pos = next;
  }
  if (out.size() != expected)
    throw std::invalid_argument("registry: wrong parameter count in symbol id '" + id + "'");
  return out;
}

}  // namespace

EdgeSymbol registry_symbol(const std::string& id) {
  const std::string head = id.substr(0, id.find(':'));
  const int q = 1;
  if (head == "one") {
    parse_params(id, 0);
    return build_one(q);
  }
  if (head == "elliptic") {
    const auto p = parse_params(id, 1);
    return build_elliptic(p[0], q, id);
  }
  if (head == "order-reduce") {
    const auto p = parse_params(id, 1);
    return build_elliptic(p[0], q, id);
  }
  if (head == "weighted-elliptic") {
    const auto p = parse_params(id, 2);
    return build_weighted_elliptic(p[0], p[1], q, id);
  }
  if (head == "cosx-perturbed") {
    const auto p = parse_params(id, 1);
    return build_cosx(p[0], q, id);
  }
  throw std::invalid_argument("registry: unknown symbol id '" + id + "'");
}

bool registry_has(const std::string& id) {
  try {
    registry_symbol(id);
    return true;
  } catch (...) {
    return false;
  }
}

std::vector<std::string> registry_canonical_ids() {
  return {"one",          "elliptic:-2",          "elliptic:-1",      "elliptic:0",
          "elliptic:1",   "elliptic:2",           "weighted-elliptic:-1:1",
          "cosx-perturbed:0", "cosx-perturbed:-1", "order-reduce:-1", "order-reduce:2"};
}

std::vector<std::pair<std::string, std::string>> registry_patterns() {
  return {
      {"one", "constant amplitude 1, orders (0,0)"},
      {"elliptic:s", "model elliptic multiplier <xi,rho~,eta~>^s, orders (s,0)"},
      {"weighted-elliptic:s:g", "[r]^g <xi,rho~,eta~>^s, orders (s,g)"},
      {"cosx-perturbed:s", "(1 + cos(x)/2) <xi,rho~,eta~>^s, orders (s,0)"},
      {"order-reduce:s", "order reduction family with exact inverse, orders (s,0)"},
  };
}

// ---- defining-estimate checker ----------------------------------------------

namespace {

CircleSymbol frozen_view(const EdgeSymbol& a, int k, double r, double rho_t,
                         std::vector<double> eta_t) {
  CircleSymbol s;
  s.order = a.mu();
  s.param_dim = 0;
  s.is_multiplier = a.multiplier();
  DerivOrder o = DerivOrder::none(a.q());
  o.dr = k;
  s.eval = [a, o, r, rho_t, eta_t = std::move(eta_t)](double x, double xi,
                                                      std::span<const double>) {
    return a.tilde_deriv(o, r, rho_t, eta_t, x, xi);
  };
  return s;
}

}  // namespace

CheckReport seminorm_check(const EdgeSymbol& a, const SeminormSampleSpec& spec) {
  if (spec.r_samples.empty() || spec.cov_mags.empty() || spec.cov_dirs.empty())
    throw std::invalid_argument("seminorm_check: empty samples");
  if (a.q() != 1) throw std::invalid_argument("seminorm_check: q = 1 samples only");
  const CircleGrid grid = make_circle_grid(spec.n_modes);
  const SobolevPair sp = spec.sp.value_or(SobolevPair{0.0, -a.mu()});
  const double weight_exp = std::max(a.mu(), a.mu() - (sp.s_in - sp.s_out));

  CheckReport report;
  report.passed = true;
  for (int k = 0; k <= spec.max_k; ++k) {
    SeminormKReport kr;
    kr.k = k;
    std::vector<SweepRow> profile;
    for (double r : spec.r_samples) {
      double sup = 0.0;
      for (double mag : spec.cov_mags) {
        for (const auto& dir : spec.cov_dirs) {
          const double rho_t = mag * dir[0];
          const std::vector<double> eta_t = {mag * dir[1]};
          const CircleSymbol view = frozen_view(a, k, r, rho_t, eta_t);
          const OperatorMatrix m = quantize_circle(grid, view, {});
          const double norm = operator_norm_circle(m, sp, grid);
          sup = std::max(sup, norm / std::pow(angle_bracket(mag), weight_exp));
        }
      }
      profile.push_back({r, sup});
      kr.max_ratio = std::max(kr.max_ratio, sup * std::pow(bracket(r), k - a.nu()));
    }
    // dyadic-r growth fit on [r] >= 1 samples
    std::vector<double> xs, ys;
    for (const auto& row : profile) {
      if (row.param >= 1.0 && row.value > 0.0) {
        xs.push_back(std::log(bracket(row.param)));
        ys.push_back(std::log(row.value));
      }
    }
    if (xs.size() >= 3) {
      const FitResult fit = fit_loglog(xs, ys);
      kr.r_exponent = fit.exponent;
      kr.r_fit_residual = fit.residual;
      kr.pass = kr.max_ratio <= spec.ratio_bound && kr.r_exponent <= a.nu() - k + 0.15;
    } else {
      // identically-zero derivative profile: trivially within every bound
      kr.r_exponent = -std::numeric_limits<double>::infinity();
      kr.pass = kr.max_ratio <= spec.ratio_bound;
    }
    report.passed = report.passed && kr.pass;
    report.per_k.push_back(kr);
  }

  // <rho~,eta~>-exponent probe at frozen r, unweighted (0,0) norms
  {
    std::vector<double> xs, ys;
    const double r_frozen = 0.0;
    for (double mag : spec.cov_mags) {
      const double rho_t = mag * M_SQRT1_2;
      const std::vector<double> eta_t = {mag * M_SQRT1_2};
      const CircleSymbol view = frozen_view(a, 0, r_frozen, rho_t, eta_t);
      const OperatorMatrix m = quantize_circle(grid, view, {});
      const double norm = operator_norm_circle(m, SobolevPair{0.0, 0.0}, grid);
      if (norm > 0.0) {
        xs.push_back(std::log(angle_bracket(mag)));
        ys.push_back(std::log(norm));
      }
    }
    if (xs.size() >= 3) {
      const FitResult fit = fit_loglog(xs, ys);
      report.cov_exponent = fit.exponent;
      report.cov_fit_residual = fit.residual;
    } else {
      report.cov_exponent = -std::numeric_limits<double>::infinity();
    }
  }
  return report;
}

double derivative_oracle_defect(const EdgeSymbol& a, int samples, std::uint64_t seed) {
  CounterRng rng(seed, 0x0dacULL);
  double worst = 0.0;
  const int q = a.q();
  for (int i = 0; i < samples; ++i) {
    const auto base = static_cast<std::uint64_t>(i) * 16;
    const double r = rng.range(base, -8.0, 8.0);
    const double rho = rng.range(base + 1, -8.0, 8.0);
    std::vector<double> eta(static_cast<std::size_t>(q));
    for (int c = 0; c < q; ++c) eta[static_cast<std::size_t>(c)] = rng.range(base + 2 + c, 0.5, 8.0);
    const double x = rng.range(base + 6, 0.0, 2.0 * M_PI);
    const double xi = std::round(rng.range(base + 7, -8.0, 8.0));
    for (int dir = 0; dir < 2 + q; ++dir) {
      DerivOrder o = DerivOrder::none(q);
      double coord = 0.0;
      if (dir == 0) {
        o.dr = 1;
        coord = r;
      } else if (dir == 1) {
        o.drho = 1;
        coord = rho;
      } else {
        o.deta[static_cast<std::size_t>(dir - 2)] = 1;
        coord = eta[static_cast<std::size_t>(dir - 2)];
      }
      const double h = 1e-4 * (1.0 + std::abs(coord));
      auto at = [&](double shift) {
        double rr = r, pp = rho;
        std::vector<double> ee = eta;
        if (dir == 0) rr += shift;
        else if (dir == 1) pp += shift;
        else ee[static_cast<std::size_t>(dir - 2)] += shift;
        return a.tilde_eval(rr, pp, ee, x, xi);
      };
      const cd fd = (at(h) - at(-h)) / (2.0 * h);
      const cd oracle = a.tilde_deriv(o, r, rho, eta, x, xi);
      const double scale = std::max({std::abs(oracle), std::abs(fd), 1e-12});
      worst = std::max(worst, std::abs(oracle - fd) / scale);
    }
  }
  return worst;
}

// ---- asymptotic summation ----------------------------------------------------

AsymptoticSumResult asymptotic_sum(const AsymptoticSumPlan& plan) {
  if (plan.terms.empty()) throw std::invalid_argument("asymptotic_sum: no terms");
  const int q = plan.terms[0].q();
  for (std::size_t j = 1; j < plan.terms.size(); ++j) {
    if (plan.terms[j].mu() >= plan.terms[j - 1].mu())
      throw std::invalid_argument("asymptotic_sum: term order not decreasing");
    if (plan.terms[j].q() != q) throw std::invalid_argument("asymptotic_sum: q mismatch");
  }
  if (!plan.constants.empty()) {
    if (plan.constants.size() != plan.terms.size())
      throw std::invalid_argument("asymptotic_sum: constants count mismatch");
    for (std::size_t j = 1; j < plan.constants.size(); ++j)
      if (plan.constants[j] <= plan.constants[j - 1])
        throw std::invalid_argument("asymptotic_sum: constants must increase strictly");
  }

  const double mu0 = plan.terms[0].mu();
  const double nu0 = plan.terms[0].nu();
  const CircleGrid grid = make_circle_grid(4);
  const std::vector<double> r_probe = {0.0, 1.0, 4.0, 16.0};
  const std::vector<double> mag_probe = {1.0, 4.0, 16.0, 64.0};

  const auto contribution = [&](const EdgeSymbol& term, double c) {
    double sup = 0.0;
    for (double r : r_probe) {
      for (double mag : mag_probe) {
        const double rho_t = mag * M_SQRT1_2;
        const std::vector<double> eta_t = {mag * M_SQRT1_2};
        CircleSymbol view;
        view.order = term.mu();
        view.param_dim = 0;
        view.is_multiplier = term.multiplier();
        view.eval = [&term, c, r, rho_t, &eta_t](double x, double xi, std::span<const double>) {
          const double radius = std::sqrt(rho_t * rho_t + eta_t[0] * eta_t[0]);
          return excision_profile(radius / c) * term.tilde_eval(r, rho_t, eta_t, x, xi);
        };
        const OperatorMatrix m = quantize_circle(grid, view, {});
        const double norm = operator_norm_circle(m, SobolevPair{0.0, -mu0}, grid);
        sup = std::max(sup, norm / std::pow(angle_bracket(mag), std::max(mu0, 0.0)) /
                                std::pow(bracket(r), nu0));
      }
    }
    return sup;
  };

  std::vector<double> constants = plan.constants;
  if (constants.empty()) {
    constants.resize(plan.terms.size());
    constants[0] = 1.0;
    const double lead = contribution(plan.terms[0], 1.0);
    double prev = 1.0;
    for (std::size_t j = 1; j < plan.terms.size(); ++j) {
      double c = prev * 2.0;
      const double target = lead * std::pow(0.5, static_cast<double>(j));
      while (contribution(plan.terms[j], c) > target) {
        c *= 2.0;
        if (c > std::pow(2.0, 40))
          throw std::runtime_error("asymptotic_sum: excision constants did not converge");
      }
      constants[j] = c;
      prev = c;
    }
  }

  std::vector<std::pair<cd, NodePtr>> nodes;
  for (std::size_t j = 0; j < plan.terms.size(); ++j) {
    const auto chi = make_atom(std::make_shared<ConstRadial>(1.0), Angular::kOne,
                               std::make_shared<ChiCov>(constants[j], false));
    nodes.push_back({cd{1.0, 0.0}, product_node(chi, plan.terms[j].node())});
  }
  AsymptoticSumResult result{
      EdgeSymbol(sum_node(std::move(nodes)), mu0, nu0, q, "asymptotic-sum"), constants};
  return result;
}

EdgeSymbol excise_multiply(const EdgeSymbol& a, double C) {
  const auto chi = make_atom(std::make_shared<ConstRadial>(1.0), Angular::kOne,
                             std::make_shared<ChiCov>(C, true));
  return EdgeSymbol(product_node(chi, a.node()), a.mu(), a.nu(), a.q(),
                    "chi*" + a.name());
}

}  // namespace edgecalc
