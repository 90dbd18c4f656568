#include "reflectlab/sl2series.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "reflectlab/errors.hpp"

namespace reflectlab::series {

using sl2::GroupElement;

double pi_eval(const GroupElement& g, double s, const Bump& phi, double x) {
  const double den = -g.b() * x + g.d();
  if (den == 0.0) throw PoleError("pi_s(g) pole at x = " + std::to_string(x));
  return std::pow(std::abs(den), -(s + 1.0)) * phi((g.a() * x - g.c()) / den);
}

TestFunction from_bump(const Bump& phi) {
  return {[phi](double x) { return phi(x); }, phi.lo(), phi.hi()};
}

TestFunction moved(const GroupElement& g, double s, const Bump& phi) {
  const double d_lo = g.a() + g.b() * phi.lo(), d_hi = g.a() + g.b() * phi.hi();
  if (!(d_lo * d_hi > 0)) throw PoleError("g has a pole on the support");
  const double e1 = sl2::point_action(g, phi.lo()), e2 = sl2::point_action(g, phi.hi());
  return {[g, s, phi](double x) {
            const double den = -g.b() * x + g.d();
            if (den == 0.0) return 0.0;
            return pi_eval(g, s, phi, x);
          },
          std::min(e1, e2), std::max(e1, e2)};
}

MovedSamples move_basis(const GroupElement& g, double s, const BasisFunctionSet& basis,
                        const QuadratureRule& quad) {
  MovedSamples out{quad.transported(g), sample_basis(basis, quad)};
  for (std::size_t k = 0; k < quad.size(); ++k) {
    const double factor = std::pow(std::abs(g.a() + g.b() * quad.nodes[k]), s + 1.0);
    out.values.col(k) *= factor;
  }
  return out;
}

FormMatrix jform(double s, const BasisFunctionSet& basis, const QuadratureRule& quad) {
  return gram_form(basis, [s](double x, double y) { return kernel_J(x, y, s); }, quad);
}

namespace {

void require_semigroup(const GroupElement& g) {
  if (!sl2::semigroup_contains(g)) {
    std::ostringstream os;
    os << "element [[" << g.a() << ", " << g.b() << "], [" << g.c() << ", " << g.d()
       << "]] is not in the contraction semigroup";
    throw DomainError(os.str());
  }
}

}  // namespace

Eigen::MatrixXd mixed_jform(const GroupElement& g1, const GroupElement& g2, double s,
                            const BasisFunctionSet& basis, const QuadratureRule& quad) {
  require_semigroup(g1);
  require_semigroup(g2);
  const MovedSamples m1 = move_basis(g1, s, basis, quad);
  const MovedSamples m2 = move_basis(g2, s, basis, quad);
  return assemble_form(m1.values, m1.rule.nodes, m1.rule.weights, m2.values, m2.rule.nodes,
                       m2.rule.weights, [s](double x, double y) { return kernel_J(x, y, s); });
}

MovedForm moved_jform(const GroupElement& g, double s, const BasisFunctionSet& basis,
                      const QuadratureRule& quad) {
  Eigen::MatrixXd f = mixed_jform(g, g, s, basis, quad);
  f = 0.5 * (f + f.transpose()).eval();
  return {g, FormMatrix::from_real(f), basis.tag()};
}

double selfadjoint_residual(const GroupElement& g, double s, const BasisFunctionSet& basis,
                            const QuadratureRule& quad) {
  const GroupElement e;
  const Eigen::MatrixXd left = mixed_jform(g, e, s, basis, quad);
  const Eigen::MatrixXd right = mixed_jform(e, g, s, basis, quad);
  return (left - right).cwiseAbs().maxCoeff();
}

GeneratorSpectrum dual_spectrum(const sl2::LieElement& y, double s,
                                const BasisFunctionSet& basis, const QuadratureRule& quad,
                                double delta, double tol) {
  if (!sl2::cone_contains(y)) throw DomainError("dual_spectrum requires Y in the cone");
  // F(t) = <pi(exp(tY/2)) phi, J pi(exp(tY/2)) phi> = <phi, J pi(exp tY) phi>.
  auto family = [&](double t) {
    return moved_jform(sl2::exp_lie(y * (0.5 * t)), s, basis, quad).form;
  };
  return generator_spectrum(family, delta, tol);
}

SemigroupLawData semigroup_law_data(const GroupElement& g1, const GroupElement& g2, double s,
                                    const BasisFunctionSet& basis, const QuadratureRule& quad) {
  const GroupElement e;
  const GroupElement g12 = g1 * g2;
  // J-adjoint of g is tau(g)^-1, which equals g on exp(C).
  const GroupElement g1_sharp = sl2::tau(g1).inverse();
  SemigroupLawData d;
  d.f0 = jform(s, basis, quad);
  d.f1 = moved_jform(g1, s, basis, quad).form;
  d.f2 = moved_jform(g2, s, basis, quad).form;
  d.f12 = moved_jform(g12, s, basis, quad).form;
  d.composed = mixed_jform(g12, e, s, basis, quad).cast<std::complex<double>>();
  d.cross = mixed_jform(g2, g1_sharp, s, basis, quad).cast<std::complex<double>>();
  return d;
}

namespace {

std::vector<double> graded_breakpoints(double u_lo, double u_hi, bool grade_low, int panels) {
  std::vector<double> bp;
  for (int k = 0; k <= panels; ++k) bp.push_back(u_lo + (u_hi - u_lo) * k / panels);
  if (grade_low) {
    double h = (u_hi - u_lo) / panels;
    for (int k = 0; k < 12; ++k) {
      h *= 0.5;
      bp.push_back(u_lo + h);
    }
  }
  std::sort(bp.begin(), bp.end());
  return bp;
}

}  // namespace

double intertwiner_apply(double s, const TestFunction& f, double x, int order, int panels) {
  if (!(s > 0)) throw DomainError("intertwiner_apply requires s > 0");
  if (!(f.hi > f.lo)) return 0.0;
  double total = 0.0;
  if (s >= 1.0) {
    std::vector<double> bp{f.lo, f.hi};
    if (x > f.lo && x < f.hi) bp.insert(bp.begin() + 1, x);
    std::vector<double> fine;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
      for (int k = 0; k <= panels; ++k) fine.push_back(bp[i] + (bp[i + 1] - bp[i]) * k / panels);
    }
    const QuadratureRule rule = QuadratureRule::composite(fine, order);
    return rule.integrate([&](double y) { return f(y) * std::pow(std::abs(x - y), s - 1.0); });
  }
  const double inv = 1.0 / s;
  // Side y > x: y = x + u^(1/s), dy |x - y|^(s-1) = du / s.
  const double r_lo = std::max(f.lo, x), r_hi = f.hi;
  if (r_hi > r_lo) {
    const double u_lo = std::pow(r_lo - x, s), u_hi = std::pow(r_hi - x, s);
    const auto rule = QuadratureRule::composite(graded_breakpoints(u_lo, u_hi, u_lo == 0.0, panels), order);
    total += rule.integrate([&](double u) { return f(x + std::pow(u, inv)); }) / s;
  }
  // Side y < x: y = x - u^(1/s).
  const double l_lo = f.lo, l_hi = std::min(f.hi, x);
  if (l_hi > l_lo) {
    const double u_lo = std::pow(x - l_hi, s), u_hi = std::pow(x - l_lo, s);
    const auto rule = QuadratureRule::composite(graded_breakpoints(u_lo, u_hi, u_lo == 0.0, panels), order);
    total += rule.integrate([&](double u) { return f(x - std::pow(u, inv)); }) / s;
  }
  return total;
}

double kernel_identity_check(double s, std::span<const std::pair<double, double>> samples) {
  double worst = 0.0;
  for (const auto& [x, y] : samples) {
    const GroupElement g = sl2::tau(sl2::nbar(x)).inverse() * sl2::nbar(y);
    const double lhs = sl2::a_nbar_character(g, s - 1.0);
    const double rhs = kernel_J(x, y, s);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

FormMatrix positive_kernel_certificate(double s, std::span<const GroupElement> h_grid) {
  const auto n = static_cast<Eigen::Index>(h_grid.size());
  for (const auto& g : h_grid) {
    if (!sl2::in_h(g)) throw DomainError("positive_kernel_certificate requires elements of H");
  }
  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      gram(i, j) = sl2::a_nbar_character(h_grid[i].inverse() * h_grid[j], s - 1.0);
    }
  }
  gram = 0.5 * (gram + gram.transpose()).eval();
  return FormMatrix::from_real(gram);
}

double j_eval(double s, const std::function<double(double)>& f, double x) {
  if (x == 0.0) return 0.0;  // f has compact support away from infinity
  return std::pow(std::abs(x), -s - 1.0) * f(1.0 / x);
}

PrReport pr_pipeline_check(double s, const BasisFunctionSet& basis, const QuadratureRule& quad,
                           std::span<const GroupElement> group_samples,
                           std::span<const sl2::LieElement> cone_sample,
                           std::span<const double> x_samples, double tol) {
  PrReport r;
  for (const auto& phi : basis.bumps()) {
    const std::function<double(double)> f = [phi](double x) { return phi(x); };
    const std::function<double(double)> jf = [&](double x) { return j_eval(s, f, x); };
    for (double x : x_samples) {
      // J(Jf)(0) is a limit at infinity of Jf, which is not compactly supported
      if (x == 0.0) continue;
      const double scale = std::max(1.0, std::abs(f(x)));
      r.r1_residual = std::max(r.r1_residual, std::abs(j_eval(s, jf, x) - f(x)) / scale);
    }
    for (const auto& g : group_samples) {
      const GroupElement tg = sl2::tau(g);
      for (double x : x_samples) {
        // skip sample points on the poles of either side
        if (x == 0.0 || -g.b() / x + g.d() == 0.0 || -tg.b() * x + tg.d() == 0.0) continue;
        const double lhs = std::pow(std::abs(x), -s - 1.0) * pi_eval(g, s, phi, 1.0 / x);
        const double y = sl2::point_action(tg.inverse(), x);
        const double rhs = std::pow(std::abs(-tg.b() * x + tg.d()), -(s + 1.0)) * j_eval(s, f, y);
        const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
        r.r2_residual = std::max(r.r2_residual, std::abs(lhs - rhs) / scale);
      }
    }
  }
  r.r1 = r.r1_residual <= tol;
  r.r2 = r.r2_residual <= tol;

  const FormMatrix f0 = jform(s, basis, quad);
  r.pr3_eig_min = f0.eig_min() / std::max(1e-300, std::abs(f0.eig_max()));
  r.pr3 = psd_report(f0).verdict != Verdict::Indefinite;

  const auto [lo, hi] = basis.support();
  for (const auto& y : cone_sample) {
    const GroupElement g = sl2::exp_lie(y);
    const double e1 = sl2::point_action(g, lo), e2 = sl2::point_action(g, hi);
    const double excess = std::max({0.0, std::abs(e1) - 1.0, std::abs(e2) - 1.0});
    const bool pole = !(std::abs(g.a()) > std::abs(g.b()));
    r.invariance_residual = std::max(r.invariance_residual, pole ? 1.0 : excess);
  }
  r.invariance = r.invariance_residual <= tol;
  return r;
}

}  // namespace reflectlab::series
