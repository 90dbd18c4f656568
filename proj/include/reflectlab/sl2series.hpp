#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "reflectlab/oskernel.hpp"
#include "reflectlab/osquotient.hpp"
#include "reflectlab/sl2core.hpp"

namespace reflectlab::series {

struct SeriesParameter {
  double s = 0.5;
  bool complementary() const { return 0.0 < s && s < 1.0; }
};

/// [pi_s(g) phi](x) = |-b x + d|^(-(s+1)) phi((a x - c) / (-b x + d)).
/// Throws PoleError when -b x + d = 0.
double pi_eval(const sl2::GroupElement& g, double s, const Bump& phi, double x);

/// Closed-form test function with compact support [lo, hi].
struct TestFunction {
  std::function<double(double)> f;
  double lo = 0, hi = 0;
  double operator()(double x) const { return f(x); }
};

TestFunction from_bump(const Bump& phi);
/// pi_s(g) phi, supported on g.[lo, hi]. Throws PoleError if g has a pole there.
TestFunction moved(const sl2::GroupElement& g, double s, const Bump& phi);

/// Samples of pi_s(g) phi_i on the pushforward of quad: rule nodes g.u and
/// values |a + b u|^(s+1) phi_i(u).
struct MovedSamples {
  QuadratureRule rule;
  Eigen::MatrixXd values;
};
MovedSamples move_basis(const sl2::GroupElement& g, double s, const BasisFunctionSet& basis,
                        const QuadratureRule& quad);

/// <phi_i, J phi_j> with kernel |1 - x y|^(s-1).
FormMatrix jform(double s, const BasisFunctionSet& basis, const QuadratureRule& quad);

/// <pi(g1) phi_i, J pi(g2) phi_j>. Throws DomainError unless g1, g2 lie in S.
Eigen::MatrixXd mixed_jform(const sl2::GroupElement& g1, const sl2::GroupElement& g2, double s,
                            const BasisFunctionSet& basis, const QuadratureRule& quad);

struct MovedForm {
  sl2::GroupElement group_element;
  FormMatrix form;
  std::string basis_tag;
};

/// <pi(g) phi_i, J pi(g) phi_j>. Throws DomainError if g is not in S.
MovedForm moved_jform(const sl2::GroupElement& g, double s, const BasisFunctionSet& basis,
                      const QuadratureRule& quad);

/// max |<pi(g) phi_i, J phi_j> - <phi_i, J pi(g) phi_j>|.
double selfadjoint_residual(const sl2::GroupElement& g, double s, const BasisFunctionSet& basis,
                            const QuadratureRule& quad);

/// Spectrum of d pi~(Y) from the forms of exp(t Y / 2), t in {0, delta, 2 delta}.
/// Throws DomainError unless Y lies in the cone.
GeneratorSpectrum dual_spectrum(const sl2::LieElement& y, double s,
                                const BasisFunctionSet& basis, const QuadratureRule& quad,
                                double delta = 1e-2, double tol = 1e-4);

/// Forms for the semigroup law of g1, g2 in exp(C) (so g1^# = g1).
SemigroupLawData semigroup_law_data(const sl2::GroupElement& g1, const sl2::GroupElement& g2,
                                    double s, const BasisFunctionSet& basis,
                                    const QuadratureRule& quad);

/// A_s f(x) = int f(y) |x - y|^(s-1) dy. For s < 1 the integral is split at
/// x and each side is mapped by u = |x - y|^s; panels per side times order
/// nodes are used.
double intertwiner_apply(double s, const TestFunction& f, double x, int order = 24,
                         int panels = 8);

/// max |a_Nbar(tau(nbar_x)^-1 nbar_y)^(s-1) - kernel_J(x, y, s)|.
double kernel_identity_check(double s, std::span<const std::pair<double, double>> samples);

/// G_ij = a_Nbar(h_i^-1 h_j)^(s-1). Throws DomainError if some h is not in H.
FormMatrix positive_kernel_certificate(double s, std::span<const sl2::GroupElement> h_grid);

/// [J f](x) = |x|^(-s-1) f(1/x).
double j_eval(double s, const std::function<double(double)>& f, double x);

/// Reflection-positivity axioms for the bump model: J^2 = 1 and
/// J pi(g) = pi(tau g) J pointwise at x_samples, positivity of the J-form, and
/// exp(Y) keeping the support inside (-1, 1) for Y in cone_sample.
PrReport pr_pipeline_check(double s, const BasisFunctionSet& basis, const QuadratureRule& quad,
                           std::span<const sl2::GroupElement> group_samples,
                           std::span<const sl2::LieElement> cone_sample,
                           std::span<const double> x_samples, double tol = 1e-9);

}  // namespace reflectlab::series
