#include "reflectlab/oskernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "reflectlab/errors.hpp"
#include "reflectlab/parallel.hpp"

namespace reflectlab {

double kernel_J(double x, double y, double s) {
  const double base = std::abs(1.0 - x * y);
  if (base == 0.0 && s < 1.0) throw SingularityError("kernel_J pole at x y = 1");
  return std::pow(base, s - 1.0);
}

double kernel_A(double x, double y, double s) {
  const double base = std::abs(x - y);
  if (base == 0.0 && s < 1.0) throw SingularityError("kernel_A pole at x = y");
  return std::pow(base, s - 1.0);
}

double Bump::operator()(double x) const {
  const double u = (x - center) / half_width;
  const double v = 1.0 - u * u;
  if (v <= 0.0) return 0.0;
  return std::exp(-1.0 / v);
}

BasisFunctionSet::BasisFunctionSet(std::vector<Bump> bumps) : bumps_(std::move(bumps)) {
  for (const auto& b : bumps_) {
    if (!(b.half_width > 0)) throw DomainError("bump half-width must be positive");
  }
}

BasisFunctionSet BasisFunctionSet::equispaced(int count, double lo, double hi,
                                              double half_width) {
  if (count < 1) throw DomainError("basis needs at least one bump");
  std::vector<Bump> bumps(count);
  for (int i = 0; i < count; ++i) {
    const double c = count == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (count - 1);
    bumps[i] = {c, half_width};
  }
  return BasisFunctionSet(std::move(bumps));
}

std::pair<double, double> BasisFunctionSet::support() const {
  if (bumps_.empty()) return {0.0, 0.0};
  double lo = bumps_.front().lo(), hi = bumps_.front().hi();
  for (const auto& b : bumps_) {
    lo = std::min(lo, b.lo());
    hi = std::max(hi, b.hi());
  }
  return {lo, hi};
}

std::vector<double> BasisFunctionSet::breakpoints() const {
  std::vector<double> pts;
  for (const auto& b : bumps_) {
    pts.push_back(b.lo());
    pts.push_back(b.hi());
  }
  std::sort(pts.begin(), pts.end());
  return pts;
}

QuadratureRule BasisFunctionSet::default_rule(int order) const {
  return QuadratureRule::composite(breakpoints(), order);
}

std::string BasisFunctionSet::tag() const {
  std::ostringstream os;
  os.precision(17);
  os << "bumps[" << bumps_.size() << "]";
  for (const auto& b : bumps_) os << ":" << b.center << "/" << b.half_width;
  return os.str();
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::PSD: return "PSD";
    case Verdict::Indefinite: return "indefinite";
    case Verdict::Zero: return "zero";
  }
  return "?";
}

FormMatrix::FormMatrix(Eigen::MatrixXcd entries, double tolerance)
    : entries_(std::move(entries)), tolerance_(tolerance) {
  if (entries_.rows() != entries_.cols()) throw DomainError("form matrix must be square");
  const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
  const double skew = entries_.size() == 0
                          ? 0.0
                          : (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
  if (skew > 1e-12 * scale) {
    std::ostringstream os;
    os << "form matrix is not Hermitian (skew " << skew << ")";
    throw DomainError(os.str());
  }
  entries_ = 0.5 * (entries_ + entries_.adjoint()).eval();
  if (entries_.size() == 0) return;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(entries_);
  evals_ = es.eigenvalues();
  evecs_ = es.eigenvectors();
}

FormMatrix FormMatrix::from_real(const Eigen::MatrixXd& entries, double tolerance) {
  return FormMatrix(entries.cast<std::complex<double>>(), tolerance);
}

double FormMatrix::eig_min() const { return evals_.size() ? evals_(0) : 0.0; }
double FormMatrix::eig_max() const { return evals_.size() ? evals_(evals_.size() - 1) : 0.0; }

int FormMatrix::radical_dim() const {
  const double cut = tolerance_ * std::abs(eig_max());
  int count = 0;
  for (Eigen::Index i = 0; i < evals_.size(); ++i) {
    if (std::abs(evals_(i)) <= cut) ++count;
  }
  return count;
}

bool FormMatrix::is_real(double tol) const {
  return entries_.size() == 0 || entries_.imag().cwiseAbs().maxCoeff() <= tol;
}

PsdReport psd_report(const FormMatrix& f) {
  PsdReport r{f.eig_min(), f.eig_max(), Verdict::PSD};
  const double tol = f.tolerance();
  if (std::max(std::abs(r.eig_min), std::abs(r.eig_max)) <= tol) {
    r.verdict = Verdict::Zero;
  } else if (r.eig_min < -tol * std::max(1.0, std::abs(r.eig_max))) {
    r.verdict = Verdict::Indefinite;
  }
  return r;
}

FormMatrix bergman_gram(std::span<const std::complex<double>> points, double lambda) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXcd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(std::abs(points[i]) < 1.0)) throw DomainError("Bergman points must lie in the unit disk");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const auto v = std::pow(1.0 - points[i] * std::conj(points[j]), -lambda);
      g(i, j) = v;
      g(j, i) = std::conj(v);
    }
  }
  return FormMatrix(std::move(g));
}

Eigen::MatrixXd assemble_form(const Eigen::MatrixXd& values_x, std::span<const double> x,
                              std::span<const double> wx, const Eigen::MatrixXd& values_y,
                              std::span<const double> y, std::span<const double> wy,
                              const Kernel& kernel) {
  const auto m = static_cast<Eigen::Index>(x.size());
  const auto n = static_cast<Eigen::Index>(y.size());
  Eigen::MatrixXd k(m, n);
  parallel_for(0, static_cast<std::size_t>(m), [&](std::size_t i) {
    for (Eigen::Index j = 0; j < n; ++j) k(i, j) = kernel(x[i], y[j]);
  });
  Eigen::Map<const Eigen::VectorXd> wxv(wx.data(), m), wyv(wy.data(), n);
  const Eigen::MatrixXd left = values_x * wxv.asDiagonal();
  const Eigen::MatrixXd right = values_y * wyv.asDiagonal();
  return left * k * right.transpose();
}

Eigen::MatrixXd sample_basis(const BasisFunctionSet& basis, const QuadratureRule& quad) {
  Eigen::MatrixXd v(basis.size(), quad.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t k = 0; k < quad.size(); ++k) v(i, k) = basis[i](quad.nodes[k]);
  }
  return v;
}

FormMatrix gram_form(const BasisFunctionSet& basis, const Kernel& kernel,
                     const QuadratureRule& quad) {
  const auto [lo, hi] = basis.support();
  if (lo < quad.lo - 1e-14 || hi > quad.hi + 1e-14) {
    throw DomainError("basis support exceeds the quadrature interval");
  }
  const Eigen::MatrixXd v = sample_basis(basis, quad);
  Eigen::MatrixXd f = assemble_form(v, quad.nodes, quad.weights, v, quad.nodes, quad.weights, kernel);
  f = 0.5 * (f + f.transpose()).eval();
  return FormMatrix::from_real(f);
}

std::string CayleySpace::name() const {
  const std::string ns = std::to_string(n);
  switch (family) {
    case CayleyFamily::SU_nn: return "SU(" + ns + "," + ns + ")";
    case CayleyFamily::SOstar_4n: return "SO*(" + std::to_string(4 * n) + ")";
    case CayleyFamily::Sp_nR: return "Sp(" + ns + ",R)";
    case CayleyFamily::SO_n2: return "SO0(" + ns + ",2)";
    case CayleyFamily::E7: return "E7(-25)";
  }
  return "?";
}

namespace {

void check_parameter(const CayleySpace& space) {
  if (space.family != CayleyFamily::E7 && space.n < 1) {
    throw DomainError("Cayley-type parameter n must be >= 1 for " + space.name());
  }
}

}  // namespace

double cayley_R(const CayleySpace& space) {
  check_parameter(space);
  const int n = space.n;
  switch (space.family) {
    case CayleyFamily::SU_nn: return n % 2 == 1 ? n : 0.0;
    case CayleyFamily::SOstar_4n: return n;
    case CayleyFamily::Sp_nR: return n % 2 == 0 ? n / 2.0 : 0.0;
    case CayleyFamily::SO_n2: {
      static constexpr double by_residue[4] = {0.0, 1.0, 2.0, 1.0};
      return by_residue[n % 4];
    }
    case CayleyFamily::E7: return 3.0;
  }
  throw DomainError("unknown Cayley family");
}

double cayley_Lpos(const CayleySpace& space) {
  check_parameter(space);
  const int n = space.n;
  double value = 0;
  switch (space.family) {
    case CayleyFamily::SU_nn: value = n; break;
    case CayleyFamily::SOstar_4n: value = 2.0 * n; break;
    case CayleyFamily::Sp_nR: value = n; break;
    case CayleyFamily::SO_n2: value = 2.0; break;
    case CayleyFamily::E7: value = 3.0; break;
  }
  if (value < cayley_R(space)) throw DomainError("L_pos below R for " + space.name());
  return value;
}

double lpos_formula(double gamma, int r, int d) {
  if (r < 1 || d < 0) throw DomainError("lpos_formula requires r >= 1 and d >= 0");
  return -gamma * (r - 1) * d / 2.0 + 0.0;  // avoid -0
}

std::vector<CayleyRow> cayley_table(int n_max) {
  std::vector<CayleyRow> rows;
  for (auto fam : {CayleyFamily::SU_nn, CayleyFamily::SOstar_4n, CayleyFamily::Sp_nR,
                   CayleyFamily::SO_n2}) {
    for (int n = 1; n <= n_max; ++n) {
      CayleySpace sp{fam, n};
      rows.push_back({sp, cayley_R(sp), cayley_Lpos(sp)});
    }
  }
  CayleySpace e7{CayleyFamily::E7, 0};
  rows.push_back({e7, cayley_R(e7), cayley_Lpos(e7)});
  return rows;
}

}  // namespace reflectlab
