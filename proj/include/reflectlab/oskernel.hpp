#pragma once

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "reflectlab/quadrature.hpp"

namespace reflectlab {

/// |1 - x y|^(s - 1). Throws SingularityError if x y = 1 and s < 1.
double kernel_J(double x, double y, double s);
/// |x - y|^(s - 1). Throws SingularityError at x = y when s < 1.
double kernel_A(double x, double y, double s);

using Kernel = std::function<double(double, double)>;

/// exp(-1 / (1 - u^2)) with u = (x - center) / half_width, zero for |u| >= 1.
struct Bump {
  double center = 0;
  double half_width = 1;

  double operator()(double x) const;
  double lo() const { return center - half_width; }
  double hi() const { return center + half_width; }
};

class BasisFunctionSet {
 public:
  BasisFunctionSet() = default;
  explicit BasisFunctionSet(std::vector<Bump> bumps);

  /// count bumps with centers equispaced in [lo, hi]; default is the
  /// 12-bump family on [-0.8, 0.8] with half-width 0.15.
  static BasisFunctionSet equispaced(int count = 12, double lo = -0.8, double hi = 0.8,
                                     double half_width = 0.15);

  std::size_t size() const { return bumps_.size(); }
  const Bump& operator[](std::size_t i) const { return bumps_[i]; }
  const std::vector<Bump>& bumps() const { return bumps_; }
  std::pair<double, double> support() const;
  /// All support endpoints, sorted.
  std::vector<double> breakpoints() const;
  /// Composite Gauss-Legendre with panels aligned to the support endpoints.
  QuadratureRule default_rule(int order = 80) const;
  /// Stable textual identifier of the family.
  std::string tag() const;

 private:
  std::vector<Bump> bumps_;
};

enum class Verdict { PSD, Indefinite, Zero };
std::string to_string(Verdict v);

/// Hermitian matrix of a sesquilinear form with cached spectrum.
class FormMatrix {
 public:
  FormMatrix() = default;
  /// Throws DomainError unless entries are Hermitian to 1e-12 relative.
  explicit FormMatrix(Eigen::MatrixXcd entries, double tolerance = 1e-12);
  static FormMatrix from_real(const Eigen::MatrixXd& entries, double tolerance = 1e-12);

  const Eigen::MatrixXcd& entries() const { return entries_; }
  Eigen::Index dim() const { return entries_.rows(); }
  double tolerance() const { return tolerance_; }
  const Eigen::VectorXd& eigenvalues() const { return evals_; }  // ascending
  const Eigen::MatrixXcd& eigenvectors() const { return evecs_; }
  double eig_min() const;
  double eig_max() const;
  /// Eigenvalues within tol * |eig_max| of zero.
  int radical_dim() const;
  bool is_real(double tol = 0.0) const;

 private:
  Eigen::MatrixXcd entries_;
  double tolerance_ = 1e-12;
  Eigen::VectorXd evals_;
  Eigen::MatrixXcd evecs_;
};

struct PsdReport {
  double eig_min = 0, eig_max = 0;
  Verdict verdict = Verdict::Zero;
};

/// PSD iff eig_min >= -tol * max(1, |eig_max|); zero if every |eigenvalue| <= tol.
PsdReport psd_report(const FormMatrix& f);

/// G_ij = (1 - z_i conj(z_j))^(-lambda).
FormMatrix bergman_gram(std::span<const std::complex<double>> points, double lambda);

/// F_ij = sum_k sum_l u_i(x_k) w_k K(x_k, y_l) v_j(y_l) w'_l, with the
/// basis samples already multiplied into values (rows = functions).
Eigen::MatrixXd assemble_form(const Eigen::MatrixXd& values_x, std::span<const double> x,
                              std::span<const double> wx, const Eigen::MatrixXd& values_y,
                              std::span<const double> y, std::span<const double> wy,
                              const Kernel& kernel);

/// Samples of each basis function at the rule nodes (rows = functions).
Eigen::MatrixXd sample_basis(const BasisFunctionSet& basis, const QuadratureRule& quad);

/// Tensor-quadrature Gram form of the kernel on the basis.
FormMatrix gram_form(const BasisFunctionSet& basis, const Kernel& kernel,
                     const QuadratureRule& quad);

enum class CayleyFamily { SU_nn, SOstar_4n, Sp_nR, SO_n2, E7 };

struct CayleySpace {
  CayleyFamily family = CayleyFamily::E7;
  int n = 0;  // ignored for E7
  std::string name() const;
};

double cayley_R(const CayleySpace& space);
double cayley_Lpos(const CayleySpace& space);
double lpos_formula(double gamma, int r, int d);

struct CayleyRow {
  CayleySpace space;
  double R = 0, Lpos = 0;
};
/// Rows for every family with n = 1..n_max, then E7.
std::vector<CayleyRow> cayley_table(int n_max);

}  // namespace reflectlab
