#include "reflectlab/heisenberg.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "reflectlab/errors.hpp"
#include "reflectlab/osquotient.hpp"
#include "reflectlab/parallel.hpp"
#include "reflectlab/quadrature.hpp"

namespace reflectlab::heis {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
constexpr double kPi = std::numbers::pi;

HeisenbergElement HeisenbergElement::operator*(const HeisenbergElement& o) const {
  if (n() != o.n() || b.size() != o.b.size()) throw DomainError("Heisenberg dimension mismatch");
  HeisenbergElement r{a, b, c + o.c};
  for (std::size_t k = 0; k < n(); ++k) {
    r.a[k] += o.a[k];
    r.b[k] += o.b[k];
    r.c += a[k] * o.b[k];
  }
  return r;
}

HeisenbergElement HeisenbergElement::inverse() const {
  HeisenbergElement r{a, b, -c};
  for (std::size_t k = 0; k < n(); ++k) {
    r.a[k] = -a[k];
    r.b[k] = -b[k];
    r.c += a[k] * b[k];
  }
  return r;
}

double HeisenbergElement::distance(const HeisenbergElement& o) const {
  double d = std::abs(c - o.c);
  for (std::size_t k = 0; k < n(); ++k) {
    d = std::max({d, std::abs(a[k] - o.a[k]), std::abs(b[k] - o.b[k])});
  }
  return d;
}

HeisenbergElement tau(const HeisenbergElement& g) {
  HeisenbergElement r{g.a, g.b, -g.c};
  for (auto& v : r.b) v = -v;
  return r;
}

VectorXcd pi_hbar(const HeisenbergElement& g, double hbar, const VectorXcd& f,
                  const PeriodicGrid& grid) {
  if (g.n() != 1) throw DomainError("pi_hbar is implemented for n = 1");
  if (f.size() != grid.count) throw GridError("sample count differs from the grid");
  const double shift = g.a[0] / grid.step;
  const double m_real = std::round(shift);
  if (std::abs(shift - m_real) > 1e-9 * std::max(1.0, std::abs(shift))) {
    throw GridError("translation is not a multiple of the grid step");
  }
  const double winding = hbar * g.b[0] * grid.length() / (2 * kPi);
  if (std::abs(winding - std::round(winding)) > 1e-9 * std::max(1.0, std::abs(winding))) {
    throw GridError("phase exp(i hbar b x) is not periodic on the grid");
  }
  const int n = grid.count;
  const int m = static_cast<int>(((static_cast<long long>(m_real) % n) + n) % n);
  VectorXcd out(n);
  for (int k = 0; k < n; ++k) {
    const double x = grid.x(k);
    out(k) = std::exp(cd(0.0, hbar * (g.c + g.b[0] * x))) * f((k + m) % n);
  }
  return out;
}

cd pi_hbar_eval(const HeisenbergElement& g, double hbar, const std::function<cd(double)>& f,
                double x) {
  if (g.n() != 1) throw DomainError("pi_hbar_eval is implemented for n = 1");
  return std::exp(cd(0.0, hbar * (g.c + g.b[0] * x))) * f(x + g.a[0]);
}

VectorXcd TwoComponentVector::stacked() const {
  VectorXcd v(plus.size() + minus.size());
  v << plus, minus;
  return v;
}

VectorXcd PhaseModel::operator_diagonal(double a, double beta) const {
  const int k = size();
  VectorXcd d(2 * k);
  for (int i = 0; i < k; ++i) {
    const double phase = hbar * beta * (a + x[i]);
    d(i) = std::exp(cd(0.0, phase));
    d(k + i) = std::exp(cd(0.0, -phase));
  }
  return d;
}

namespace {

double spectral_norm(const MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::BDCSVD<MatrixXcd>(m).singularValues()(0);
}

MatrixXcd projector(const MatrixXcd& basis) { return basis * basis.adjoint(); }

}  // namespace

UncorrelateResult uncorrelate(const MatrixXcd& k0, const PhaseModel& model,
                              const UncorrelateOptions& options) {
  const int k = model.size();
  if (k0.rows() != 2 * k) throw DomainError("K0 rows must equal twice the model size");
  if (options.a_count < 2) throw DomainError("a_count must be at least 2");
  if (!(model.hbar != 0)) throw DomainError("hbar must be nonzero");
  for (double beta : options.beta_grid) {
    if (beta == 0.0) throw DomainError("beta grid must avoid 0");
  }

  // Sampled motions and their averaging weights.
  struct Motion {
    double beta, a;
    VectorXcd diag;
  };
  std::vector<Motion> motions;
  for (double beta : options.beta_grid) {
    for (int j = 0; j < options.a_count; ++j) {
      const double a = kPi * j / (model.hbar * beta * options.a_count);
      motions.push_back({beta, a, model.operator_diagonal(a, beta)});
    }
  }

  UncorrelateResult out;
  MatrixXcd u = orthonormal_span(k0);
  auto violation_of = [&](const MatrixXcd& basis) {
    double v = 0;
    for (const auto& m : motions) {
      const MatrixXcd moved = m.diag.asDiagonal() * basis;
      v = std::max(v, spectral_norm(moved - basis * (basis.adjoint() * moved)));
    }
    return v;
  };
  out.hypothesis_violation = violation_of(u);
  if (out.hypothesis_violation > options.tol) {
    if (!options.enlarge) {
      std::ostringstream os;
      os << "K0 is not invariant under the sampled motions (violation "
         << out.hypothesis_violation << ")";
      throw HypothesisError(os.str());
    }
    out.enlarged = true;
    for (int iter = 0; iter < 2 * k + 1; ++iter) {
      MatrixXcd grown(2 * k, u.cols() * static_cast<Index>(motions.size() + 1));
      grown.leftCols(u.cols()) = u;
      for (std::size_t i = 0; i < motions.size(); ++i) {
        grown.middleCols(u.cols() * static_cast<Index>(i + 1), u.cols()) =
            motions[i].diag.asDiagonal() * u;
      }
      MatrixXcd next = orthonormal_span(grown);
      const bool stable = next.cols() == u.cols();
      u = std::move(next);
      if (stable) break;
    }
  }

  // P+-(beta) v = mean_j exp(-+ i hbar beta a_j) T(a_j, beta) v
  const Index r = u.cols();
  MatrixXcd plus_cols(k, r * static_cast<Index>(options.beta_grid.size()));
  MatrixXcd minus_cols(k, r * static_cast<Index>(options.beta_grid.size()));
  for (std::size_t b = 0; b < options.beta_grid.size(); ++b) {
    MatrixXcd acc_plus = MatrixXcd::Zero(2 * k, r), acc_minus = MatrixXcd::Zero(2 * k, r);
    for (const auto& m : motions) {
      if (m.beta != options.beta_grid[b]) continue;
      const MatrixXcd moved = m.diag.asDiagonal() * u;
      acc_plus += std::exp(cd(0.0, -model.hbar * m.beta * m.a)) * moved;
      acc_minus += std::exp(cd(0.0, model.hbar * m.beta * m.a)) * moved;
    }
    acc_plus /= options.a_count;
    acc_minus /= options.a_count;
    plus_cols.middleCols(r * static_cast<Index>(b), r) = acc_plus.topRows(k);
    minus_cols.middleCols(r * static_cast<Index>(b), r) = acc_minus.bottomRows(k);
  }
  out.d_plus = orthonormal_span(plus_cols);
  out.d_minus = orthonormal_span(minus_cols);

  MatrixXcd split = MatrixXcd::Zero(2 * k, out.d_plus.cols() + out.d_minus.cols());
  split.topLeftCorner(k, out.d_plus.cols()) = out.d_plus;
  split.bottomRightCorner(k, out.d_minus.cols()) = out.d_minus;
  out.residual = spectral_norm(projector(u) - projector(split));
  return out;
}

double pd_form(const std::function<cd(const HeisenbergElement&)>& kernel,
               std::span<const HeisenbergElement> points, std::span<const double> weights,
               std::span<const cd> f) {
  const std::size_t n = points.size();
  if (weights.size() != n || f.size() != n) throw DomainError("pd_form: size mismatch");
  std::vector<double> rows(n, 0.0);
  parallel_for(0, n, [&](std::size_t p) {
    cd acc = 0;
    for (std::size_t q = 0; q < n; ++q) {
      const cd fw = kernel(points[p] * points[q].inverse());
      const cd bw = kernel(points[q] * points[p].inverse());
      const cd herm = 0.5 * (fw + std::conj(bw));
      acc += herm * std::conj(f[p]) * f[q] * weights[p] * weights[q];
    }
    rows[p] = acc.real();
  });
  double total = 0;
  for (double v : rows) total += v;
  return total;
}

double sublaplacian_F_quadrature(double r, double tol) {
  if (!(r > 0)) throw DomainError("F is singular at r = 0");
  const auto& [t, wt] = gauss_legendre_unit(30);
  auto panel = [&](double lo, double hi) {
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double s = 0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      const double xi = mid + half * t[k];
      s += wt[k] * std::cos(r * xi) / std::sqrt(1.0 + xi * xi);
    }
    return half * s;
  };
  // [0, first zero of cos(r xi)] in unit panels, then half periods.
  const double x0 = 0.5 * kPi / r;
  double head = 0;
  for (double lo = 0; lo < x0; lo += 1.0) head += panel(lo, std::min(x0, lo + 1.0));
  const double h = kPi / r;

  auto estimate = [&](int terms) {
    std::vector<double> seq(terms);
    double partial = head, lo = x0;
    for (int k = 0; k < terms; ++k, lo += h) {
      partial += panel(lo, lo + h);
      seq[k] = partial;
    }
    // Repeated averaging of the alternating partial sums.
    for (int it = 0; it < 20; ++it) {
      for (std::size_t k = 0; k + 1 < seq.size(); ++k) seq[k] = 0.5 * (seq[k] + seq[k + 1]);
      seq.pop_back();
    }
    return seq.back();
  };
  int terms = 40;
  double prev = estimate(terms);
  for (; terms <= 1280; terms *= 2) {
    const double next = estimate(2 * terms);
    // The tail cancels terms of size |head|, so that sets the attainable accuracy.
    if (std::abs(next - prev) <= tol * std::max(std::abs(next), std::abs(head))) {
      return 2 * kPi * next;
    }
    prev = next;
  }
  throw ConvergenceError("F quadrature did not stabilize at r = " + std::to_string(r));
}

std::string FTableSpec::key() const {
  std::ostringstream os;
  os.precision(17);
  os << "rmin=" << r_min << ";rmax=" << r_max << ";tol=" << tol;
  // FNV-1a keeps file names stable across platforms.
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char ch : os.str()) {
    hash ^= ch;
    hash *= 1099511628211ull;
  }
  std::ostringstream name;
  name << "ftable_" << std::hex << hash;
  return name.str();
}

namespace {

constexpr char kMagic[8] = {'R', 'L', 'F', 'T', 'A', 'B', '0', '1'};

std::vector<double> lobatto_nodes(int n, double lo, double hi) {
  std::vector<double> t(n + 1);
  for (int j = 0; j <= n; ++j) {
    t[j] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * std::cos(kPi * j / n);
  }
  return t;
}

double barycentric(const std::vector<double>& values, double lo, double hi, double t) {
  const int n = static_cast<int>(values.size()) - 1;
  const double u = (2 * t - lo - hi) / (hi - lo);
  double num = 0, den = 0;
  for (int j = 0; j <= n; ++j) {
    const double xj = std::cos(kPi * j / n);
    const double diff = u - xj;
    if (diff == 0.0) return values[j];
    double w = (j % 2 == 0 ? 1.0 : -1.0) / diff;
    if (j == 0 || j == n) w *= 0.5;
    num += w * values[j];
    den += w;
  }
  return num / den;
}

}  // namespace

SubLaplacianKernel SubLaplacianKernel::build(const FTableSpec& spec) {
  if (!(spec.r_min > 0 && spec.r_max > spec.r_min)) throw DomainError("bad F-table range");
  const double lo = std::log(spec.r_min), hi = std::log(spec.r_max);
  auto sample = [](const std::vector<double>& t, std::vector<double>& out, std::size_t from,
                   std::size_t stride) {
    parallel_for(0, (t.size() - from + stride - 1) / stride, [&](std::size_t i) {
      const std::size_t j = from + i * stride;
      out[j] = std::log(sublaplacian_F_quadrature(std::exp(t[j])));
    });
  };
  int n = 16;
  std::vector<double> t = lobatto_nodes(n, lo, hi);
  std::vector<double> values(t.size());
  sample(t, values, 0, 1);
  SubLaplacianKernel k;
  k.spec_ = spec;
  for (; n <= 2048; n *= 2) {
    std::vector<double> t2 = lobatto_nodes(2 * n, lo, hi);
    std::vector<double> v2(t2.size());
    for (int j = 0; j <= n; ++j) v2[2 * j] = values[j];
    sample(t2, v2, 1, 2);
    double worst = 0;
    for (std::size_t j = 1; j < t2.size(); j += 2) {
      worst = std::max(worst, std::abs(barycentric(values, lo, hi, t2[j]) - v2[j]));
    }
    values = std::move(v2);
    if (worst <= spec.tol) {
      k.log_values_ = std::move(values);
      k.resample();
      return k;
    }
  }
  throw ConvergenceError("F-table interpolation did not reach the tolerance");
}

void SubLaplacianKernel::resample() {
  const double lo = std::log(spec_.r_min), hi = std::log(spec_.r_max);
  const int m = 8192;
  dense_.resize(m + 1);
  dense_h_ = (hi - lo) / m;
  parallel_for(0, m + 1, [&](std::size_t i) {
    dense_[i] = barycentric(log_values_, lo, hi, lo + dense_h_ * static_cast<double>(i));
  });
}

double SubLaplacianKernel::interpolate_exact(double r) const {
  if (r < spec_.r_min || r > spec_.r_max) throw DomainError("radius outside the F-table range");
  return std::exp(barycentric(log_values_, std::log(spec_.r_min), std::log(spec_.r_max), std::log(r)));
}

double SubLaplacianKernel::operator()(double r) const {
  if (r < spec_.r_min) throw DomainError("radius below the F-table range");
  if (r > spec_.r_max) return 0.0;
  const double u = (std::log(r) - std::log(spec_.r_min)) / dense_h_;
  const int m = static_cast<int>(dense_.size()) - 1;
  int i = std::clamp(static_cast<int>(u) - 1, 0, m - 3);
  const double s = u - i;  // position relative to node i, nominally in [1, 2)
  const double p0 = dense_[i], p1 = dense_[i + 1], p2 = dense_[i + 2], p3 = dense_[i + 3];
  // cubic Lagrange through nodes 0..3
  const double v = p0 * (s - 1) * (s - 2) * (s - 3) / -6.0 + p1 * s * (s - 2) * (s - 3) / 2.0 +
                   p2 * s * (s - 1) * (s - 3) / -2.0 + p3 * s * (s - 1) * (s - 2) / 6.0;
  return std::exp(v);
}

double SubLaplacianKernel::operator()(double x, double y) const {
  return (*this)(std::hypot(x, y));
}

void SubLaplacianKernel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write F-table " + path);
  const std::uint32_t version = 1, rows = 1, cols = static_cast<std::uint32_t>(log_values_.size());
  out.write(kMagic, sizeof kMagic);
  out.write(reinterpret_cast<const char*>(&version), sizeof version);
  out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
  out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
  const double header[3] = {spec_.r_min, spec_.r_max, spec_.tol};
  out.write(reinterpret_cast<const char*>(header), sizeof header);
  out.write(reinterpret_cast<const char*>(log_values_.data()),
            static_cast<std::streamsize>(log_values_.size() * sizeof(double)));
  if (!out) throw IoError("failed writing F-table " + path);
}

SubLaplacianKernel SubLaplacianKernel::load(const std::string& path, const FTableSpec& spec) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read F-table " + path);
  char magic[8];
  std::uint32_t version = 0, rows = 0, cols = 0;
  double header[3];
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  in.read(reinterpret_cast<char*>(&rows), sizeof rows);
  in.read(reinterpret_cast<char*>(&cols), sizeof cols);
  in.read(reinterpret_cast<char*>(header), sizeof header);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0 || version != 1 || rows != 1 ||
      cols < 2 || header[0] != spec.r_min || header[1] != spec.r_max || header[2] != spec.tol) {
    throw IoError("F-table header mismatch in " + path);
  }
  SubLaplacianKernel k;
  k.spec_ = spec;
  k.log_values_.resize(cols);
  in.read(reinterpret_cast<char*>(k.log_values_.data()),
          static_cast<std::streamsize>(cols * sizeof(double)));
  if (!in) throw IoError("truncated F-table " + path);
  k.resample();
  return k;
}

SubLaplacianKernel SubLaplacianKernel::load_or_build(const FTableSpec& spec,
                                                     const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path path = fs::path(dir) / (spec.key() + ".bin");
  if (fs::exists(path)) {
    try {
      return load(path.string(), spec);
    } catch (const IoError&) {
      // fall through and rebuild
    }
  }
  SubLaplacianKernel k = build(spec);
  std::error_code ec;
  fs::create_directories(dir, ec);
  k.save(path.string());
  return k;
}

MollifiedKernel::MollifiedKernel(double eps, double r_max, int samples) {
  if (!(eps > 0 && r_max > 0 && samples >= 4)) throw DomainError("bad mollified kernel parameters");
  h_ = r_max / samples;
  values_.resize(samples + 1);
  const double rho_max = 9.0 / eps;
  parallel_for(0, values_.size(), [&](std::size_t i) {
    const double r = h_ * static_cast<double>(i);
    const double width = std::min(1.0, kPi / std::max(r, 1e-12));
    std::vector<double> bp;
    for (double x = 0; x < rho_max; x += width) bp.push_back(x);
    bp.push_back(rho_max);
    const QuadratureRule rule = QuadratureRule::composite(bp, 16);
    values_[i] = 2 * kPi * rule.integrate([&](double rho) {
      return std::cyl_bessel_j(0.0, r * rho) * rho * std::exp(-0.5 * eps * eps * rho * rho) /
             (rho * rho + 1.0);
    });
  });
}

double MollifiedKernel::operator()(double r) const {
  const double u = r / h_;
  const int m = static_cast<int>(values_.size()) - 1;
  if (u >= m) return values_.back();
  const int i = std::clamp(static_cast<int>(u) - 1, 0, m - 3);
  const double s = u - i;
  return values_[i] * (s - 1) * (s - 2) * (s - 3) / -6.0 +
         values_[i + 1] * s * (s - 2) * (s - 3) / 2.0 +
         values_[i + 2] * s * (s - 1) * (s - 3) / -2.0 + values_[i + 3] * s * (s - 1) * (s - 2) / 6.0;
}

namespace {

double bump_integral(const Bump& b) {
  const auto rule = QuadratureRule::gauss_legendre(80, b.lo(), b.hi());
  return rule.integrate([&](double x) { return b(x); });
}

}  // namespace

cd HeisenbergTestFunction::operator()(double x, double y, double c) const {
  cd v = 0;
  for (const auto& t : terms) {
    v += t.coeff * t.x(x) * std::exp(cd(0.0, t.omega * x)) * t.y(y) * t.c(c);
  }
  return v;
}

cd HeisenbergTestFunction::reduced(double x, double y) const {
  cd v = 0;
  for (const auto& t : terms) {
    v += t.coeff * bump_integral(t.c) * t.x(x) * std::exp(cd(0.0, t.omega * x)) * t.y(y);
  }
  return v;
}

void HeisenbergTestFunction::require_upper() const {
  for (const auto& t : terms) {
    if (t.coeff != cd(0.0) && t.y.lo() <= 0.0) {
      throw SupportError("test function has mass at y <= 0");
    }
  }
}

double rp_form_direct(const HeisenbergTestFunction& f, const SubLaplacianKernel& kernel,
                      int order) {
  f.require_upper();
  if (f.terms.empty()) return 0.0;
  std::vector<double> xb, yb;
  std::vector<cd> coeff;
  for (const auto& t : f.terms) {
    xb.push_back(t.x.lo());
    xb.push_back(t.x.hi());
    yb.push_back(t.y.lo());
    yb.push_back(t.y.hi());
    coeff.push_back(t.coeff * bump_integral(t.c));
  }
  const QuadratureRule qx = QuadratureRule::composite(xb, order);
  const QuadratureRule qy = QuadratureRule::composite(yb, order);
  struct Node {
    double x, y;
    cd gw;  // g(x, y) times the tensor weight
  };
  std::vector<Node> nodes;
  for (std::size_t i = 0; i < qx.size(); ++i) {
    for (std::size_t j = 0; j < qy.size(); ++j) {
      const double x = qx.nodes[i], y = qy.nodes[j];
      cd g = 0;
      for (std::size_t k = 0; k < f.terms.size(); ++k) {
        const auto& t = f.terms[k];
        g += coeff[k] * t.x(x) * std::exp(cd(0.0, t.omega * x)) * t.y(y);
      }
      if (g != cd(0.0)) nodes.push_back({x, y, g * qx.weights[i] * qy.weights[j]});
    }
  }
  // F(x - x', y + y') is symmetric in the pair, so sum p <= q.
  std::vector<double> rows(nodes.size(), 0.0);
  parallel_for(0, nodes.size(), [&](std::size_t p) {
    const Node& np = nodes[p];
    double acc = std::norm(np.gw) * kernel(0.0, 2 * np.y);
    for (std::size_t q = p + 1; q < nodes.size(); ++q) {
      const Node& nq = nodes[q];
      acc += 2.0 * (std::conj(np.gw) * nq.gw).real() * kernel(np.x - nq.x, np.y + nq.y);
    }
    rows[p] = acc;
  });
  double total = 0;
  for (double v : rows) total += v;
  return total;
}

double rp_form_reduced(const HeisenbergTestFunction& f, double tol) {
  f.require_upper();
  if (f.terms.empty()) return 0.0;
  std::vector<cd> coeff;
  for (const auto& t : f.terms) coeff.push_back(t.coeff * bump_integral(t.c));

  auto ghat = [&](double xi, const std::vector<QuadratureRule>& xrules) {
    const double lambda = std::sqrt(1.0 + xi * xi);
    cd total = 0;
    for (std::size_t k = 0; k < f.terms.size(); ++k) {
      const auto& t = f.terms[k];
      const cd fx = xrules[k].integrate(
          [&](double x) { return t.x(x) * std::exp(cd(0.0, (t.omega - xi) * x)); });
      const auto yrule = QuadratureRule::gauss_legendre(64, t.y.lo(), t.y.hi());
      const double ly = yrule.integrate([&](double y) { return t.y(y) * std::exp(-lambda * y); });
      total += coeff[k] * fx * ly;
    }
    return total;
  };

  auto integral = [&](double cutoff) {
    // x rules resolve oscillations up to the cutoff frequency
    std::vector<QuadratureRule> xrules;
    for (const auto& t : f.terms) {
      const double width = t.x.hi() - t.x.lo();
      const int panels = 2 + static_cast<int>(std::ceil(width * (cutoff + std::abs(t.omega)) / kPi));
      std::vector<double> bp;
      for (int p = 0; p <= panels; ++p) bp.push_back(t.x.lo() + width * p / panels);
      xrules.push_back(QuadratureRule::composite(bp, 16));
    }
    const int panels = static_cast<int>(2 * cutoff);
    std::vector<double> bp;
    for (int p = 0; p <= panels; ++p) bp.push_back(-cutoff + 2 * cutoff * p / panels);
    const QuadratureRule rule = QuadratureRule::composite(bp, 16);
    std::vector<double> vals(rule.size());
    parallel_for(0, rule.size(), [&](std::size_t i) {
      const double xi = rule.nodes[i];
      vals[i] = rule.weights[i] * std::norm(ghat(xi, xrules)) / std::sqrt(1.0 + xi * xi);
    });
    double s = 0;
    for (double v : vals) s += v;
    return kPi * s;
  };

  double cutoff = 20;
  double prev = integral(cutoff);
  for (; cutoff <= 2560; cutoff *= 2) {
    const double next = integral(2 * cutoff);
    if (std::abs(next - prev) <= tol * std::max(std::abs(next), 1e-300)) return next;
    prev = next;
  }
  throw ConvergenceError("reduced RP integral did not stabilize");
}

double hardy_positivity_probe(const Symbol& a_plus, const Symbol& a_minus, int trial_count,
                              int frequencies, std::uint64_t seed, bool zero_minus) {
  if (frequencies < 1 || trial_count < 1) throw DomainError("probe needs trials and frequencies");
  const int n = 4 * frequencies + 4;  // circle samples, enough to resolve the products
  std::vector<cd> ap(n), am(n);
  for (int j = 0; j < n; ++j) {
    const double th = 2 * kPi * j / n;
    ap[j] = a_plus(th);
    am[j] = a_minus(th);
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  auto random_coeffs = [&]() {
    std::vector<cd> c(frequencies + 1);
    double norm = 0;
    for (auto& v : c) {
      v = cd(normal(rng), normal(rng));
      norm += std::norm(v);
    }
    for (auto& v : c) v /= std::sqrt(norm);
    return c;
  };
  double min_observed = 0;
  bool first = true;
  for (int trial = 0; trial < trial_count; ++trial) {
    const auto cp = random_coeffs();
    auto cm = random_coeffs();
    if (zero_minus) std::fill(cm.begin(), cm.end(), cd(0.0));
    cd pairing = 0;
    for (int j = 0; j < n; ++j) {
      const double th = 2 * kPi * j / n;
      cd hp = 0, hm = 0;
      for (int k = 0; k <= frequencies; ++k) {
        hp += cp[k] * std::exp(cd(0.0, k * th));
        hm += cm[k] * std::exp(cd(0.0, -k * th));
      }
      pairing += std::conj(ap[j] * hp) * (am[j] * hm);
    }
    pairing /= static_cast<double>(n);
    const double raw = pairing.real();
    const double rotated = -std::abs(pairing);
    const double best = std::min(raw, rotated);
    if (first || best < min_observed) min_observed = best;
    first = false;
  }
  return min_observed + 0.0;
}

}  // namespace reflectlab::heis
