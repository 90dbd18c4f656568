#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "reflectlab/oskernel.hpp"

namespace reflectlab::heis {

using cd = std::complex<double>;

/// (a, b, c) with (a,b,c)(a',b',c') = (a+a', b+b', c+c'+a.b').
struct HeisenbergElement {
  std::vector<double> a, b;
  double c = 0;

  static HeisenbergElement scalar(double a, double b, double c) { return {{a}, {b}, c}; }
  std::size_t n() const { return a.size(); }
  HeisenbergElement operator*(const HeisenbergElement& o) const;
  HeisenbergElement inverse() const;
  double distance(const HeisenbergElement& o) const;
};

/// (a, -b, -c)
HeisenbergElement tau(const HeisenbergElement& g);

/// Periodic grid x_k = origin + k step, k = 0..count-1.
struct PeriodicGrid {
  int count = 64;
  double origin = 0;
  double step = 1;
  double x(int k) const { return origin + k * step; }
  double length() const { return count * step; }
};

/// pi(a,b,c) f(x) = exp(i hbar (c + b x)) f(x + a) on the periodic grid.
/// Throws GridError unless a is a multiple of the step and hbar b L is a
/// multiple of 2 pi, which makes the action a representation on the grid.
Eigen::VectorXcd pi_hbar(const HeisenbergElement& g, double hbar, const Eigen::VectorXcd& f,
                         const PeriodicGrid& grid);
/// Closed-form version for n = 1.
cd pi_hbar_eval(const HeisenbergElement& g, double hbar, const std::function<cd(double)>& f,
                double x);

/// Coordinates in finite models of H+ (+) H-.
struct TwoComponentVector {
  Eigen::VectorXcd plus, minus;
  Eigen::VectorXcd stacked() const;
  TwoComponentVector swapped() const { return {minus, plus}; }
};

/// Diagonal model of pi(a) pi(beta b) pi(-a): phases exp(+-i hbar beta (a + x_k))
/// on the plus and minus components.
struct PhaseModel {
  std::vector<double> x;
  double hbar = 1;
  int size() const { return static_cast<int>(x.size()); }
  Eigen::VectorXcd operator_diagonal(double a, double beta) const;  // length 2 size()
};

struct UncorrelateOptions {
  std::vector<double> beta_grid{1.0, 2.0, 3.0};
  int a_count = 4;     // a_j = pi j / (hbar beta a_count), j < a_count
  double tol = 1e-10;  // invariance tolerance
  bool enlarge = false;  // replace K0 by its invariant hull instead of failing
};

struct UncorrelateResult {
  Eigen::MatrixXcd d_plus, d_minus;  // orthonormal bases
  double residual = 0;               // || P_K0 - P_(D+ (+) D-) ||
  double hypothesis_violation = 0;
  bool enlarged = false;
};

/// Averages the sampled motions of K0 against exp(-+ i hbar beta a) to
/// extract D+ and D-. k0 has 2 size() rows, plus component first. Throws
/// HypothesisError if K0 is not invariant and enlarge is false.
UncorrelateResult uncorrelate(const Eigen::MatrixXcd& k0, const PhaseModel& model,
                              const UncorrelateOptions& options = {});

/// sum_pq F(u_p u_q^-1) conj(f_p) f_q w_p w_q, Hermitian part.
double pd_form(const std::function<cd(const HeisenbergElement&)>& kernel,
               std::span<const HeisenbergElement> points, std::span<const double> weights,
               std::span<const cd> f);

/// F(r) = 2 pi int_0^inf cos(r xi) / sqrt(1 + xi^2) d xi, the n = 1 kernel
/// int int exp(i(x xi + y eta)) / (xi^2 + eta^2 + 1) at radius r, computed by
/// half-period panels with repeated averaging and cutoff growth.
double sublaplacian_F_quadrature(double r, double tol = 1e-12);

struct FTableSpec {
  double r_min = 1e-3;
  double r_max = 12.0;
  double tol = 1e-8;
  std::string key() const;
};

/// Tabulated F on log-spaced Chebyshev-Lobatto nodes, refined until the
/// interpolant is stable to tol, then resampled for fast cubic lookup.
class SubLaplacianKernel {
 public:
  static SubLaplacianKernel build(const FTableSpec& spec = {});
  /// Reads <dir>/<spec.key()>.bin if present and valid, else builds and writes it.
  static SubLaplacianKernel load_or_build(const FTableSpec& spec, const std::string& dir);
  static SubLaplacianKernel load(const std::string& path, const FTableSpec& spec);
  void save(const std::string& path) const;

  /// F at radius r. Throws DomainError below r_min; ~0 beyond r_max.
  double operator()(double r) const;
  double operator()(double x, double y) const;
  double interpolate_exact(double r) const;  // barycentric Chebyshev value
  const FTableSpec& spec() const { return spec_; }
  int node_count() const { return static_cast<int>(log_values_.size()); }

 private:
  void resample();
  FTableSpec spec_;
  std::vector<double> log_values_;  // log F at Lobatto nodes in t = log r
  std::vector<double> dense_;       // log F on a uniform t grid
  double dense_h_ = 0;
};

/// Gaussian-mollified kernel 2 pi int_0^inf J0(r rho) rho exp(-eps^2 rho^2 / 2) / (rho^2 + 1),
/// tabulated on [0, r_max]; positive definite and finite at 0.
class MollifiedKernel {
 public:
  MollifiedKernel(double eps, double r_max, int samples = 2048);
  double operator()(double r) const;

 private:
  double h_ = 0;
  std::vector<double> values_;
};

/// Sum of separable terms coeff * X(x) exp(i omega x) * Y(y) * C(c).
struct TestTerm {
  cd coeff{1.0, 0.0};
  Bump x, y, c;
  double omega = 0;
};

struct HeisenbergTestFunction {
  std::vector<TestTerm> terms;
  cd operator()(double x, double y, double c) const;
  /// int f dc as a function of (x, y).
  cd reduced(double x, double y) const;
  /// Throws SupportError if some term reaches y <= 0.
  void require_upper() const;
};

/// int int F(tau(u) v^-1) conj(f(u)) f(v) du dv with the tabulated F,
/// c factored out analytically. order is the Gauss order per panel.
double rp_form_direct(const HeisenbergTestFunction& f, const SubLaplacianKernel& kernel,
                      int order = 12);

/// pi int |g_L(xi)|^2 / sqrt(1 + xi^2) d xi with g_L the Fourier transform in
/// x and Laplace transform in y at sqrt(1 + xi^2) of int f dc.
double rp_form_reduced(const HeisenbergTestFunction& f, double tol = 1e-12);

using Symbol = std::function<cd(double)>;

/// min Re <A+ h+, A- h-> over random unit trials h+ in Hardy+ (frequencies
/// 0..frequencies) and h- in Hardy- (-frequencies..0), each trial also taken
/// with the phase of h- rotated to make the pairing -|<A+ h+, A- h->|.
double hardy_positivity_probe(const Symbol& a_plus, const Symbol& a_minus, int trial_count,
                              int frequencies, std::uint64_t seed, bool zero_minus = false);

}  // namespace reflectlab::heis
