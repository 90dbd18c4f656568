#include "reflectlab/osquotient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "reflectlab/errors.hpp"

namespace reflectlab {

using Eigen::Index;
using Eigen::MatrixXcd;
using cd = std::complex<double>;

namespace {

double spectral_norm(const MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

MatrixXcd QuotientModel::whitening() const {
  MatrixXcd b = quotient_basis;
  for (Index k = 0; k < b.cols(); ++k) b.col(k) /= std::sqrt(induced_metric(k, k).real());
  return b;
}

QuotientModel build_quotient(const FormMatrix& f, double rel_tol) {
  if (psd_report(f).verdict == Verdict::Indefinite) {
    std::ostringstream os;
    os << "form is indefinite (eig_min " << f.eig_min() << ", eig_max " << f.eig_max() << ")";
    throw RadicalError(os.str());
  }
  QuotientModel q;
  q.ambient_dim = static_cast<int>(f.dim());
  q.jform = f;
  const double cut = rel_tol * std::max(0.0, f.eig_max());
  std::vector<Index> keep, drop;
  for (Index i = 0; i < f.eigenvalues().size(); ++i) {
    (f.eigenvalues()(i) > cut ? keep : drop).push_back(i);
  }
  q.radical_basis.resize(f.dim(), static_cast<Index>(drop.size()));
  q.quotient_basis.resize(f.dim(), static_cast<Index>(keep.size()));
  q.induced_metric = MatrixXcd::Zero(static_cast<Index>(keep.size()), static_cast<Index>(keep.size()));
  double dropped_max = 0;
  for (std::size_t k = 0; k < drop.size(); ++k) {
    q.radical_basis.col(k) = f.eigenvectors().col(drop[k]);
    dropped_max = std::max(dropped_max, std::abs(f.eigenvalues()(drop[k])));
  }
  double kept_min = f.eig_max();
  for (std::size_t k = 0; k < keep.size(); ++k) {
    q.quotient_basis.col(k) = f.eigenvectors().col(keep[k]);
    q.induced_metric(k, k) = f.eigenvalues()(keep[k]);
    kept_min = std::min(kept_min, f.eigenvalues()(keep[k]));
  }
  q.spectral_gap = keep.empty() || f.eig_max() <= 0 ? 0.0 : (kept_min - dropped_max) / f.eig_max();
  return q;
}

MatrixXcd radical(const FormMatrix& f, double rel_tol) {
  return build_quotient(f, rel_tol).radical_basis;
}

ContractionResult contraction_check(const FormMatrix& f0, const FormMatrix& fg, double tol,
                                    double radical_tol) {
  if (f0.dim() != fg.dim()) throw DomainError("contraction_check: dimension mismatch");
  const QuotientModel q = build_quotient(f0, radical_tol);
  ContractionResult r;
  if (q.dim() == 0) {
    r.verdict = true;
    return r;
  }
  const MatrixXcd b = q.whitening();
  const MatrixXcd m = b.adjoint() * fg.entries() * b;
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  r.gamma_norm = es.eigenvalues()(es.eigenvalues().size() - 1);
  r.verdict = r.gamma_norm <= 1.0 + tol;
  return r;
}

double semigroup_law_check(const SemigroupLawData& data, double radical_tol,
                           double invariance_tol) {
  const QuotientModel q = build_quotient(data.f0, radical_tol);
  const double scale = std::max(data.f0.eig_max(), std::numeric_limits<double>::min());
  const std::pair<const char*, const FormMatrix*> moved[] = {
      {"g1", &data.f1}, {"g2", &data.f2}, {"g1 g2", &data.f12}};
  for (const auto& [name, form] : moved) {
    if (form->dim() != data.f0.dim()) throw DomainError("semigroup_law_check: dimension mismatch");
    if (q.radical_basis.cols() == 0) continue;
    const MatrixXcd r = q.radical_basis.adjoint() * form->entries() * q.radical_basis;
    const double violation = r.cwiseAbs().maxCoeff() / scale;
    if (violation > invariance_tol) {
      std::ostringstream os;
      os << name << " moves the radical off the null cone (relative violation " << violation << ")";
      throw InvarianceError(os.str());
    }
  }
  if (q.dim() == 0) return 0.0;
  const MatrixXcd b = q.whitening();
  return spectral_norm(b.adjoint() * (data.composed - data.cross) * b);
}

namespace {

std::vector<double> log_rates(const Eigen::VectorXd& mu, double t, int& clipped) {
  std::vector<double> out(mu.size());
  for (Index i = 0; i < mu.size(); ++i) {
    double m = mu(i);
    if (!(m > 0)) {
      ++clipped;
      m = std::numeric_limits<double>::min();
    }
    out[i] = std::log(m) / t;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

GeneratorSpectrum generator_spectrum(const FormMatrix& f0, const FormMatrix& f_delta,
                                     const FormMatrix& f_2delta, double delta, double tol,
                                     double radical_tol) {
  if (!(delta > 0)) throw DomainError("generator_spectrum: delta must be positive");
  GeneratorSpectrum out;
  out.delta = delta;
  out.quotient = build_quotient(f0, radical_tol);
  const int k = out.quotient.dim();
  if (k == 0) return out;
  const MatrixXcd b = out.quotient.whitening();
  MatrixXcd m1 = b.adjoint() * f_delta.entries() * b;
  MatrixXcd m2 = b.adjoint() * f_2delta.entries() * b;
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es1(0.5 * (m1 + m1.adjoint()));
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es2(0.5 * (m2 + m2.adjoint()), Eigen::EigenvaluesOnly);
  out.eigenvalues = log_rates(es1.eigenvalues(), delta, out.clipped);
  out.eigenvalues_2 = log_rates(es2.eigenvalues(), 2 * delta, out.clipped);
  out.gaps.resize(k);
  for (int i = 0; i < k; ++i) out.gaps[i] = std::abs(out.eigenvalues[i] - out.eigenvalues_2[i]);
  out.consistency_gap = out.gaps.back();

  // Eigenvalues of es1 are ascending like the sorted log rates.
  Eigen::VectorXd inv_sqrt(k);
  for (int i = 0; i < k; ++i) inv_sqrt(i) = 1.0 / std::sqrt(out.quotient.induced_metric(i, i).real());
  out.eigenvectors = inv_sqrt.asDiagonal() * es1.eigenvectors();

  if (out.consistency_gap > 10 * tol) {
    std::ostringstream os;
    os << "delta and 2 delta estimates of the spectral bound differ by " << out.consistency_gap;
    throw ConvergenceError(os.str());
  }
  return out;
}

GeneratorSpectrum generator_spectrum(const std::function<FormMatrix(double)>& family,
                                     double delta, double tol, double radical_tol) {
  return generator_spectrum(family(0.0), family(delta), family(2 * delta), delta, tol,
                            radical_tol);
}

MatrixXcd dual_unitary(const GeneratorSpectrum& spectrum, double t) {
  const auto& v = spectrum.eigenvectors;
  const Index k = v.cols();
  Eigen::VectorXcd phases(k);
  for (Index i = 0; i < k; ++i) phases(i) = std::exp(cd(0.0, spectrum.eigenvalues[i] * t));
  // V^{-1} = V^* M because V^* M V = I.
  return v * phases.asDiagonal() * v.adjoint() * spectrum.quotient.induced_metric;
}

void FiniteReflectionSpace::validate() const {
  const int n = point_count();
  if (static_cast<int>(theta.size()) != n) throw DomainError("theta size differs from weights size");
  for (int x = 0; x < n; ++x) {
    if (theta[x] < 0 || theta[x] >= n) throw DomainError("theta maps outside the point set");
    if (theta[theta[x]] != x) throw DomainError("theta is not an involution");
    if (!(weights[x] > 0)) throw DomainError("weights must be positive");
    if (weights[theta[x]] != weights[x]) throw DomainError("weights are not theta-invariant");
  }
}

Eigen::MatrixXd FiniteReflectionSpace::reflection() const {
  const int n = point_count();
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int x = 0; x < n; ++x) j(x, theta[x]) = 1.0;
  return j;
}

PhillipsResult phillips_subspace(const FiniteReflectionSpace& space,
                                 const std::optional<std::vector<int>>& a_selection) {
  space.validate();
  const int n = space.point_count();
  PhillipsResult r;
  for (int x = 0; x < n; ++x) {
    if (space.theta[x] == x) r.fixed_points.push_back(x);
  }
  if (a_selection) {
    std::set<int> chosen;
    for (int x : *a_selection) {
      if (x < 0 || x >= n) throw PartitionError("A selection refers to a missing point");
      if (space.theta[x] == x) throw PartitionError("A selection contains a fixed point");
      if (!chosen.insert(x).second) throw PartitionError("A selection repeats a point");
      if (chosen.count(space.theta[x])) throw PartitionError("A selection contains a full orbit");
    }
    for (int x = 0; x < n; ++x) {
      if (space.theta[x] != x && !chosen.count(x) && !chosen.count(space.theta[x])) {
        throw PartitionError("A selection misses the orbit of point " + std::to_string(x));
      }
    }
    r.a_set.assign(chosen.begin(), chosen.end());
  } else {
    for (int x = 0; x < n; ++x) {
      if (space.theta[x] > x) r.a_set.push_back(x);
    }
  }
  for (int x : r.a_set) r.b_set.push_back(space.theta[x]);
  std::sort(r.b_set.begin(), r.b_set.end());

  std::vector<int> support = r.fixed_points;
  support.insert(support.end(), r.a_set.begin(), r.a_set.end());
  std::sort(support.begin(), support.end());
  r.k0 = Eigen::MatrixXd::Zero(n, static_cast<Index>(support.size()));
  for (std::size_t k = 0; k < support.size(); ++k) r.k0(support[k], k) = 1.0;

  // <f, J g> = sum_x w_x f(x) g(theta x) for real indicator columns
  const Eigen::MatrixXd w = Eigen::Map<const Eigen::VectorXd>(space.weights.data(), n).asDiagonal();
  const Eigen::MatrixXd form = r.k0.transpose() * w * space.reflection() * r.k0;
  r.jform = FormMatrix::from_real(form);
  r.quotient_dim = r.jform.dim() == 0 ? 0 : build_quotient(r.jform).dim();
  return r;
}

MatrixXcd orthonormal_span(const MatrixXcd& columns, double rel_tol) {
  if (columns.cols() == 0 || columns.rows() == 0) return MatrixXcd(columns.rows(), 0);
  Eigen::JacobiSVD<MatrixXcd> svd(columns, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Index rank = 0;
  const double top = sv(0);
  while (rank < sv.size() && sv(rank) > rel_tol * top && top > 0) ++rank;
  return svd.matrixU().leftCols(rank);
}

PrReport pr_axiom_check(const MatrixXcd& j,
                        std::span<const std::pair<MatrixXcd, MatrixXcd>> symmetry,
                        const MatrixXcd& k0, std::span<const MatrixXcd> cone_motions, double tol) {
  PrReport r;
  const Index n = j.rows();
  r.r1_residual = (j * j - MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
  r.r1 = r.r1_residual <= tol;

  for (const auto& [pg, ptg] : symmetry) {
    const double scale = std::max(1.0, pg.cwiseAbs().maxCoeff());
    r.r2_residual = std::max(r.r2_residual, (j * pg - ptg * j).cwiseAbs().maxCoeff() / scale);
  }
  r.r2 = r.r2_residual <= tol;

  if (k0.cols() == 0) {
    r.pr3 = true;
  } else {
    const MatrixXcd form = k0.adjoint() * j * k0;
    const FormMatrix f(0.5 * (form + form.adjoint()), tol);
    const double scale = std::max(1.0, std::abs(f.eig_max()));
    r.pr3_eig_min = f.eig_min() / scale;
    r.pr3 = psd_report(f).verdict != Verdict::Indefinite;
  }

  const MatrixXcd basis = orthonormal_span(k0);
  for (const auto& m : cone_motions) {
    if (basis.cols() == 0) break;
    const MatrixXcd moved = m * basis;
    const MatrixXcd outside = moved - basis * (basis.adjoint() * moved);
    const double scale = std::max(spectral_norm(moved), std::numeric_limits<double>::min());
    r.invariance_residual = std::max(r.invariance_residual, spectral_norm(outside) / scale);
  }
  r.invariance = r.invariance_residual <= tol;
  return r;
}

}  // namespace reflectlab
