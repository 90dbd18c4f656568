#pragma once

#include <span>
#include <utility>

namespace reflectlab::sl2 {

/// Real 2x2 matrix [[a, b], [c, d]] with determinant one.
class GroupElement {
 public:
  GroupElement() = default;  // identity
  /// Throws DomainError unless |ad - bc - 1| <= 1e-12 * max(1, |ad| + |bc|).
  GroupElement(double a, double b, double c, double d);

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double d() const { return d_; }
  double det() const { return a_ * d_ - b_ * c_; }

  GroupElement operator*(const GroupElement& o) const;
  GroupElement operator-() const { return raw(-a_, -b_, -c_, -d_); }
  GroupElement inverse() const { return raw(d_, -b_, -c_, a_); }
  /// Rescales by 1/sqrt(det); used to remove drift after long products.
  GroupElement renormalized() const;

  /// max |entry difference|
  double distance(const GroupElement& o) const;
  double norm_inf() const;

  static GroupElement raw(double a, double b, double c, double d);

 private:
  double a_ = 1, b_ = 0, c_ = 0, d_ = 1;
};

/// Traceless matrix [[x11, x12], [x21, -x11]].
struct LieElement {
  double x11 = 0, x12 = 0, x21 = 0;

  LieElement operator+(const LieElement& o) const {
    return {x11 + o.x11, x12 + o.x12, x21 + o.x21};
  }
  LieElement operator-(const LieElement& o) const {
    return {x11 - o.x11, x12 - o.x12, x21 - o.x21};
  }
  LieElement operator*(double t) const { return {t * x11, t * x12, t * x21}; }
  double norm_inf() const;

  /// (H-part, Q-part): fixed and negated by the differential of tau.
  std::pair<LieElement, LieElement> hq_split() const;
};

inline LieElement operator*(double t, const LieElement& x) { return x * t; }

LieElement bracket(const LieElement& x, const LieElement& y);
/// Differential of tau: [[x11, x12], [x21, -x11]] -> [[-x11, x21], [x12, x11]].
LieElement dtau(const LieElement& x);

LieElement q(double r, double s);  // [[r, s], [-s, -r]]
LieElement x_zero();               // q(1, 0) / 2
LieElement x_plus();               // [[0, 1], [0, 0]]
LieElement x_minus();              // [[0, 0], [1, 0]]

GroupElement tau(const GroupElement& g);
GroupElement theta(const GroupElement& g);
GroupElement weyl();  // [[0, 1], [-1, 0]]
GroupElement exp_lie(const LieElement& x);
GroupElement h(double t);       // [[cosh t, sinh t], [sinh t, cosh t]]
GroupElement a_t(double t);     // exp(2 t X0) = diag(e^t, e^-t)
GroupElement nbar(double y);    // [[1, 0], [y, 1]]
GroupElement p(double a, double x);  // [[a, a x], [0, 1/a]]

/// Ordered product of a word, renormalizing every 100 factors.
GroupElement product(std::span<const GroupElement> word);

bool cone_contains(const LieElement& y, double tol = 1e-12);

/// g.x = (c + d x) / (a + b x). Throws PoleError when a + b x = 0.
double point_action(const GroupElement& g, double x);

/// True iff g maps [-1, 1] into [-1 - tol, 1 + tol] without a pole.
bool semigroup_contains(const GroupElement& g, double tol = 1e-9);

struct NbarFactorization {
  double y = 0, a = 1, x = 0;
  GroupElement reassemble() const { return nbar(y) * p(a, x); }
};

/// g = nbar(c/a) p(a, b/a) with a = g11. Throws ChartError if g11 = 0.
NbarFactorization nbar_factor(const GroupElement& g);

bool in_h(const GroupElement& g, double tol = 1e-10);

/// nbar coordinate of h in H. Throws DomainError if h is not tau-fixed.
double zeta(const GroupElement& h);

/// |g11|^exponent. Throws ChartError if g11 = 0.
double a_nbar_character(const GroupElement& g, double exponent);

}  // namespace reflectlab::sl2
