#pragma once

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace edgecalc {

/// Truncated Taylor series in one variable. Coefficients store f^(k)(r0)/k!,
/// so products are plain Cauchy convolutions. Used to propagate exact
/// derivatives through the bracket function and radial coefficient algebra.
class Jet {
 public:
  explicit Jet(int order) : c_(static_cast<std::size_t>(order) + 1, 0.0) {}

  static Jet constant(double v, int order) {
    Jet j(order);
    j.c_[0] = v;
    return j;
  }

  static Jet variable(double v, int order) {
    Jet j(order);
    j.c_[0] = v;
    if (order >= 1) j.c_[1] = 1.0;
    return j;
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  double value() const { return c_[0]; }
  double coeff(int k) const { return c_[static_cast<std::size_t>(k)]; }
  double& coeff(int k) { return c_[static_cast<std::size_t>(k)]; }

  /// k-th derivative, i.e. k! * coeff(k).
  double deriv(int k) const {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f * c_[static_cast<std::size_t>(k)];
  }

  Jet operator+(const Jet& o) const {
    Jet r(order());
    for (int k = 0; k <= order(); ++k) r.c_[k] = c_[k] + o.c_[k];
    return r;
  }

  Jet operator-(const Jet& o) const {
    Jet r(order());
    for (int k = 0; k <= order(); ++k) r.c_[k] = c_[k] - o.c_[k];
    return r;
  }

  Jet operator*(const Jet& o) const {
    Jet r(order());
    for (int k = 0; k <= order(); ++k)
      for (int j = 0; j <= k; ++j) r.c_[k] += c_[j] * o.c_[k - j];
    return r;
  }

  Jet operator*(double s) const {
    Jet r(order());
    for (int k = 0; k <= order(); ++k) r.c_[k] = s * c_[k];
    return r;
  }

  Jet operator+(double s) const {
    Jet r = *this;
    r.c_[0] += s;
    return r;
  }

  /// this^a for real a; leading value must be positive.
  Jet pow(double a) const {
    const double u0 = c_[0];
    if (!(u0 > 0.0)) throw std::domain_error("Jet::pow: nonpositive base");
    Jet p(order());
    p.c_[0] = std::pow(u0, a);
    for (int k = 1; k <= order(); ++k) {
      double acc = 0.0;
      for (int j = 1; j <= k; ++j)
        acc += (a * j - (k - j)) * c_[j] * p.c_[k - j];
      p.c_[k] = acc / (k * u0);
    }
    return p;
  }

  Jet exp() const {
    Jet e(order());
    e.c_[0] = std::exp(c_[0]);
    for (int k = 1; k <= order(); ++k) {
      double acc = 0.0;
      for (int j = 1; j <= k; ++j) acc += j * c_[j] * e.c_[k - j];
      e.c_[k] = acc / k;
    }
    return e;
  }

  /// Jet of f' (order drops by one).
  Jet derivative() const {
    assert(order() >= 1);
    Jet d(order() - 1);
    for (int k = 0; k < order(); ++k) d.coeff(k) = (k + 1) * c_[static_cast<std::size_t>(k) + 1];
    return d;
  }

  Jet truncated(int new_order) const {
    Jet t(new_order);
    for (int k = 0; k <= std::min(new_order, order()); ++k) t.coeff(k) = coeff(k);
    return t;
  }

  Jet reciprocal() const {
    const double u0 = c_[0];
    if (u0 == 0.0) throw std::domain_error("Jet::reciprocal: zero value");
    Jet r(order());
    r.c_[0] = 1.0 / u0;
    for (int k = 1; k <= order(); ++k) {
      double acc = 0.0;
      for (int j = 1; j <= k; ++j) acc += c_[j] * r.c_[k - j];
      r.c_[k] = -acc / u0;
    }
    return r;
  }

 private:
  std::vector<double> c_;
};

inline Jet operator*(double s, const Jet& j) { return j * s; }

}  // namespace edgecalc
