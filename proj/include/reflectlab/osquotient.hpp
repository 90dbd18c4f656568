#pragma once

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "reflectlab/oskernel.hpp"

namespace reflectlab {

/// Quotient of the ambient coordinate space by the radical of a PSD form.
struct QuotientModel {
  int ambient_dim = 0;
  FormMatrix jform;
  Eigen::MatrixXcd radical_basis;   // orthonormal, spans N
  Eigen::MatrixXcd quotient_basis;  // orthonormal, spans the complement
  Eigen::MatrixXcd induced_metric;  // diagonal, positive
  /// (smallest kept eigenvalue - largest discarded |eigenvalue|) / eig_max
  double spectral_gap = 1.0;

  int dim() const { return static_cast<int>(quotient_basis.cols()); }
  /// B with B^* F B = I: maps quotient-orthonormal coordinates to ambient.
  Eigen::MatrixXcd whitening() const;
};

/// Throws RadicalError if f is indefinite. Cut: |lambda| <= rel_tol * eig_max.
QuotientModel build_quotient(const FormMatrix& f, double rel_tol = 1e-9);
Eigen::MatrixXcd radical(const FormMatrix& f, double rel_tol = 1e-9);

struct ContractionResult {
  double gamma_norm = 0;
  bool verdict = false;
};

/// Largest generalized eigenvalue of (fg, f0) on the complement of the radical.
ContractionResult contraction_check(const FormMatrix& f0, const FormMatrix& fg,
                                    double tol = 1e-6, double radical_tol = 1e-9);

/// Form data for two motions g1, g2 over a common basis.
struct SemigroupLawData {
  FormMatrix f0;             // <phi_i, J phi_j>
  FormMatrix f1, f2, f12;    // <g phi_i, J g phi_j> for g1, g2, g1 g2
  Eigen::MatrixXcd composed; // <g1 g2 phi_i, J phi_j>
  Eigen::MatrixXcd cross;    // <g2 phi_i, J g1^# phi_j>, g1^# the J-adjoint of g1
};

/// Induced-metric operator norm of the difference between the form of
/// (g1 g2)~ and of g1~ g2~. Throws InvarianceError if a motion fails to keep
/// the radical isotropic.
double semigroup_law_check(const SemigroupLawData& data, double radical_tol = 1e-9,
                           double invariance_tol = 1e-9);

struct GeneratorSpectrum {
  std::vector<double> eigenvalues;    // from the delta step, ascending
  std::vector<double> eigenvalues_2;  // from the 2 delta step, ascending
  std::vector<double> gaps;           // per-eigenvalue |delta - 2 delta|
  double consistency_gap = 0;         // gap of the spectral bound (largest eigenvalue)
  int clipped = 0;                    // eigenvalues of F(t) at or below zero
  double delta = 0;
  QuotientModel quotient;
  Eigen::MatrixXcd eigenvectors;      // quotient coordinates, V^* M V = I

  double max() const { return eigenvalues.empty() ? 0.0 : eigenvalues.back(); }
};

/// Generator of a contraction family from the forms at 0, delta and 2 delta.
/// Throws ConvergenceError if the two estimates of the spectral bound differ
/// by more than 10 * tol.
GeneratorSpectrum generator_spectrum(const FormMatrix& f0, const FormMatrix& f_delta,
                                     const FormMatrix& f_2delta, double delta,
                                     double tol = 1e-4, double radical_tol = 1e-9);
GeneratorSpectrum generator_spectrum(const std::function<FormMatrix(double)>& family,
                                     double delta, double tol = 1e-4,
                                     double radical_tol = 1e-9);

/// exp(i t A) for the generator A, in quotient coordinates.
Eigen::MatrixXcd dual_unitary(const GeneratorSpectrum& spectrum, double t);

struct FiniteReflectionSpace {
  std::vector<double> weights;
  std::vector<int> theta;  // theta[theta[x]] == x

  int point_count() const { return static_cast<int>(weights.size()); }
  /// Throws DomainError unless theta is an involution and weights are theta-invariant.
  void validate() const;
  /// Permutation matrix of f -> f o theta.
  Eigen::MatrixXd reflection() const;
};

struct PhillipsResult {
  std::vector<int> fixed_points;  // M0
  std::vector<int> a_set, b_set;  // M1 = A u B, theta(A) = B
  Eigen::MatrixXd k0;             // indicator columns of M0 u A, points as rows
  FormMatrix jform;               // sum_x w_x conj(f(x)) f(theta x) on K0
  int quotient_dim = 0;
};

/// Maximal positive invariant subspace L2(M0 u A). The default transversal
/// puts the lower index of every 2-cycle into A. Throws PartitionError if
/// a_selection is not a theta-transversal of M1.
PhillipsResult phillips_subspace(const FiniteReflectionSpace& space,
                                 const std::optional<std::vector<int>>& a_selection = {});

struct PrReport {
  bool r1 = false, r2 = false, pr3 = false, invariance = false;
  double r1_residual = 0, r2_residual = 0, pr3_eig_min = 0, invariance_residual = 0;
  bool passed() const { return r1 && r2 && pr3 && invariance; }
};

/// Checks J^2 = 1, J pi(g) = pi(tau g) J on the supplied pairs
/// (pi(g), pi(tau g)), positivity of the J-form on K0 and invariance of K0
/// under the supplied cone motions.
PrReport pr_axiom_check(const Eigen::MatrixXcd& j,
                        std::span<const std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd>> symmetry,
                        const Eigen::MatrixXcd& k0, std::span<const Eigen::MatrixXcd> cone_motions,
                        double tol = 1e-9);

/// Generic front end: pi maps group elements to matrices.
template <class G, class Pi, class Tau>
PrReport pr_axiom_check(const Eigen::MatrixXcd& j, Pi&& pi, Tau&& tau,
                        std::span<const G> group_samples, const Eigen::MatrixXcd& k0,
                        std::span<const G> cone_samples, double tol = 1e-9) {
  std::vector<std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd>> pairs;
  for (const auto& g : group_samples) pairs.emplace_back(pi(g), pi(tau(g)));
  std::vector<Eigen::MatrixXcd> motions;
  for (const auto& g : cone_samples) motions.push_back(pi(g));
  return pr_axiom_check(j, pairs, k0, motions, tol);
}

/// Orthonormal basis of the column span (rank cut relative to the top singular value).
Eigen::MatrixXcd orthonormal_span(const Eigen::MatrixXcd& columns, double rel_tol = 1e-10);

}  // namespace reflectlab
