#include "reflectlab/sl2core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "reflectlab/errors.hpp"

namespace reflectlab::sl2 {

GroupElement::GroupElement(double a, double b, double c, double d)
    : a_(a), b_(b), c_(c), d_(d) {
  const double scale = std::max(1.0, std::abs(a * d) + std::abs(b * c));
  if (!(std::abs(a * d - b * c - 1.0) <= 1e-12 * scale)) {
    std::ostringstream os;
    os << "determinant " << a * d - b * c << " differs from 1";
    throw DomainError(os.str());
  }
}

GroupElement GroupElement::raw(double a, double b, double c, double d) {
  GroupElement g;
  g.a_ = a;
  g.b_ = b;
  g.c_ = c;
  g.d_ = d;
  return g;
}

GroupElement GroupElement::operator*(const GroupElement& o) const {
  return raw(a_ * o.a_ + b_ * o.c_, a_ * o.b_ + b_ * o.d_,
             c_ * o.a_ + d_ * o.c_, c_ * o.b_ + d_ * o.d_);
}

GroupElement GroupElement::renormalized() const {
  const double det = a_ * d_ - b_ * c_;
  if (!(det > 0)) throw DomainError("cannot renormalize non-positive determinant");
  const double s = 1.0 / std::sqrt(det);
  return raw(a_ * s, b_ * s, c_ * s, d_ * s);
}

double GroupElement::distance(const GroupElement& o) const {
  return std::max({std::abs(a_ - o.a_), std::abs(b_ - o.b_),
                   std::abs(c_ - o.c_), std::abs(d_ - o.d_)});
}

double GroupElement::norm_inf() const {
  return std::max({std::abs(a_), std::abs(b_), std::abs(c_), std::abs(d_)});
}

double LieElement::norm_inf() const {
  return std::max({std::abs(x11), std::abs(x12), std::abs(x21)});
}

std::pair<LieElement, LieElement> LieElement::hq_split() const {
  const double sym = 0.5 * (x12 + x21);
  LieElement hpart{0.0, sym, sym};
  LieElement qpart{x11, x12 - sym, x21 - sym};
  return {hpart, qpart};
}

LieElement bracket(const LieElement& x, const LieElement& y) {
  // [X, Y] = XY - YX for traceless 2x2 matrices.
  return {x.x12 * y.x21 - x.x21 * y.x12,
          2.0 * (x.x11 * y.x12 - x.x12 * y.x11),
          2.0 * (x.x21 * y.x11 - x.x11 * y.x21)};
}

LieElement dtau(const LieElement& x) { return {-x.x11, x.x21, x.x12}; }

LieElement q(double r, double s) { return {r, s, -s}; }
LieElement x_zero() { return {0.5, 0.0, 0.0}; }
LieElement x_plus() { return {0.0, 1.0, 0.0}; }
LieElement x_minus() { return {0.0, 0.0, 1.0}; }

GroupElement tau(const GroupElement& g) {
  return GroupElement::raw(g.d(), g.c(), g.b(), g.a());
}

GroupElement theta(const GroupElement& g) {
  // inverse transpose
  return GroupElement::raw(g.d(), -g.c(), -g.b(), g.a());
}

GroupElement weyl() { return GroupElement::raw(0.0, 1.0, -1.0, 0.0); }

GroupElement exp_lie(const LieElement& x) {
  // X^2 = delta I, so exp X = C(delta) I + S(delta) X.
  const double delta = x.x11 * x.x11 + x.x12 * x.x21;
  double c, s;
  if (std::abs(delta) < 1e-8) {
    c = 1.0 + delta / 2.0 + delta * delta / 24.0;
    s = 1.0 + delta / 6.0 + delta * delta / 120.0;
  } else if (delta > 0) {
    const double m = std::sqrt(delta);
    c = std::cosh(m);
    s = std::sinh(m) / m;
  } else {
    const double m = std::sqrt(-delta);
    c = std::cos(m);
    s = std::sin(m) / m;
  }
  return GroupElement::raw(c + s * x.x11, s * x.x12, s * x.x21, c - s * x.x11);
}

GroupElement h(double t) {
  const double ch = std::cosh(t), sh = std::sinh(t);
  return GroupElement::raw(ch, sh, sh, ch);
}

GroupElement a_t(double t) {
  return GroupElement::raw(std::exp(t), 0.0, 0.0, std::exp(-t));
}

GroupElement nbar(double y) { return GroupElement::raw(1.0, 0.0, y, 1.0); }

GroupElement p(double a, double x) {
  if (a == 0.0) throw DomainError("p(a, x) requires a != 0");
  return GroupElement::raw(a, a * x, 0.0, 1.0 / a);
}

GroupElement product(std::span<const GroupElement> word) {
  GroupElement acc;
  std::size_t since = 0;
  for (const auto& g : word) {
    acc = acc * g;
    if (++since == 100) {
      acc = acc.renormalized();
      since = 0;
    }
  }
  return word.size() > 100 ? acc.renormalized() : acc;
}

bool cone_contains(const LieElement& y, double tol) {
  const auto [hpart, qpart] = y.hq_split();
  if (hpart.norm_inf() > tol) return false;
  const double r = qpart.x11;
  const double s = qpart.x12;
  return r + s >= -tol && r - s >= -tol && r >= -tol;
}

double point_action(const GroupElement& g, double x) {
  const double den = g.a() + g.b() * x;
  if (den == 0.0) throw PoleError("a + b x = 0 at x = " + std::to_string(x));
  return (g.c() + g.d() * x) / den;
}

bool semigroup_contains(const GroupElement& g, double tol) {
  // The pole -a/b lies in [-1, 1] iff |a| <= |b|.
  if (!(std::abs(g.a()) > std::abs(g.b()))) return false;
  const double lo = point_action(g, -1.0);
  const double hi = point_action(g, 1.0);
  const double left = std::min(lo, hi), right = std::max(lo, hi);
  return left >= -1.0 - tol && right <= 1.0 + tol;
}

NbarFactorization nbar_factor(const GroupElement& g) {
  if (g.a() == 0.0) throw ChartError("g11 = 0, g is outside the open cell");
  return {g.c() / g.a(), g.a(), g.b() / g.a()};
}

bool in_h(const GroupElement& g, double tol) {
  return tau(g).distance(g) <= tol * std::max(1.0, g.norm_inf());
}

double zeta(const GroupElement& hh) {
  if (!in_h(hh)) throw DomainError("zeta requires a tau-fixed element");
  return nbar_factor(hh).y;
}

double a_nbar_character(const GroupElement& g, double exponent) {
  if (g.a() == 0.0) throw ChartError("g11 = 0, a_Nbar undefined");
  return std::pow(std::abs(g.a()), exponent);
}

}  // namespace reflectlab::sl2
