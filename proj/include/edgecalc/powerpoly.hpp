#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

namespace edgecalc {

/// Closed-form derivative engine for the anisotropic powers that generate all
/// built-in symbols. Represents
///   f(w) = sum_t  c_t * prod_v w_v^{e_{t,v}} * (1 + |w|^2)^{p_t}
/// over variables w = (w_0, ..., w_{n-1}). The class is closed under partial
/// differentiation, so every mixed derivative of <w>^s stays exact.
class PowerPoly {
 public:
  explicit PowerPoly(int nvars) : nvars_(nvars) {}

  static PowerPoly constant(int nvars, double c) {
    PowerPoly p(nvars);
    if (c != 0.0) p.terms_.push_back({c, std::vector<int>(nvars, 0), 0.0});
    return p;
  }

  /// <w>^s = (1 + |w|^2)^{s/2}
  static PowerPoly angle_power(int nvars, double s) {
    PowerPoly p(nvars);
    p.terms_.push_back({1.0, std::vector<int>(nvars, 0), s / 2.0});
    return p;
  }

  static PowerPoly monomial(int nvars, int var, int expo = 1) {
    PowerPoly p(nvars);
    std::vector<int> e(nvars, 0);
    e[var] = expo;
    p.terms_.push_back({1.0, std::move(e), 0.0});
    return p;
  }

  int nvars() const { return nvars_; }

  PowerPoly derivative(int var) const {
    if (var < 0 || var >= nvars_) throw std::invalid_argument("PowerPoly: bad variable");
    PowerPoly d(nvars_);
    for (const auto& t : terms_) {
      if (t.expo[var] > 0) {
        Term a = t;
        a.coef *= a.expo[var];
        a.expo[var] -= 1;
        d.terms_.push_back(std::move(a));
      }
      if (t.apow != 0.0) {
        Term b = t;
        b.coef *= 2.0 * b.apow;
        b.expo[var] += 1;
        b.apow -= 1.0;
        d.terms_.push_back(std::move(b));
      }
    }
    d.merge();
    return d;
  }

  double eval(std::span<const double> w) const {
    double a = 1.0;
    for (int v = 0; v < nvars_; ++v) a += w[v] * w[v];
    double acc = 0.0;
    for (const auto& t : terms_) {
      double m = t.coef;
      for (int v = 0; v < nvars_; ++v)
        for (int k = 0; k < t.expo[v]; ++k) m *= w[v];
      if (t.apow != 0.0) m *= std::pow(a, t.apow);
      acc += m;
    }
    return acc;
  }

 private:
  struct Term {
    double coef;
    std::vector<int> expo;
    double apow;
  };

  void merge() {
    std::map<std::pair<std::vector<int>, double>, double> acc;
    for (const auto& t : terms_) acc[{t.expo, t.apow}] += t.coef;
    terms_.clear();
    for (auto& [key, c] : acc)
      if (c != 0.0) terms_.push_back({c, key.first, key.second});
  }

  int nvars_;
  std::vector<Term> terms_;
};

/// Immutable table of all mixed partials of a PowerPoly up to a total order.
class PowerPolyDerivs {
 public:
  PowerPolyDerivs(PowerPoly base, int max_total_order)
      : nvars_(base.nvars()), max_order_(max_total_order) {
    std::vector<int> zero(static_cast<std::size_t>(nvars_), 0);
    build(std::move(base), zero, 0, nvars_ - 1);
  }

  int max_order() const { return max_order_; }

  double eval(std::span<const int> order, std::span<const double> w) const {
    int total = 0;
    for (int v = 0; v < nvars_; ++v) total += order[v];
    if (total > max_order_) throw std::out_of_range("derivative oracle depth exceeded");
    const auto it = table_.find(std::vector<int>(order.begin(), order.end()));
    return it->second.eval(w);
  }

 private:
  // Each multi-index is reached once, via increments in non-increasing
  // variable order.
  void build(PowerPoly p, const std::vector<int>& order, int total, int vmax) {
    if (total < max_order_) {
      for (int v = 0; v <= vmax; ++v) {
        std::vector<int> next = order;
        ++next[v];
        build(p.derivative(v), next, total + 1, v);
      }
    }
    table_.emplace(order, std::move(p));
  }

  int nvars_;
  int max_order_;
  std::map<std::vector<int>, PowerPoly> table_;
};

}  // namespace edgecalc
