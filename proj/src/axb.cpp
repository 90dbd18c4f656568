#include "reflectlab/axb.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "reflectlab/errors.hpp"
#include "reflectlab/osquotient.hpp"
#include "reflectlab/parallel.hpp"
#include "reflectlab/quadrature.hpp"

namespace reflectlab::axb {

using Eigen::Index;
using Eigen::MatrixXcd;
constexpr double kPi = std::numbers::pi;

AxbElement AxbElement::operator*(const AxbElement& o) const {
  return {s + o.s, b + std::exp(s) * o.b};
}

AxbElement AxbElement::inverse() const { return {-s, -std::exp(-s) * b}; }

Eigen::Matrix2d AxbElement::matrix() const {
  Eigen::Matrix2d m;
  m << std::exp(s), b, 0.0, 1.0;
  return m;
}

AxbElement tau(const AxbElement& g) { return {g.s, -g.b}; }

cd pi_pm(const AxbElement& g, int sign, const std::function<cd(double)>& f, double x) {
  if (sign != 1 && sign != -1) throw DomainError("sign must be +1 or -1");
  return std::exp(cd(0.0, sign * std::exp(x) * g.b)) * f(x + g.s);
}

Mat2c reflection_j() {
  Mat2c j;
  j << 0.0, 1.0, 1.0, 0.0;
  return j;
}

Mat2c q_from_mu(cd mu) {
  if (mu.real() < 0) throw DomainError("Q(mu) requires Re mu >= 0");
  const double n2 = std::norm(mu);
  Mat2c q;
  q << 1.0, mu, std::conj(mu), n2;
  return q / (1.0 + n2);
}

Mat2c q_degenerate(DegenerateCase which) {
  Mat2c q = Mat2c::Zero();
  if (which == DegenerateCase::Plus) q(0, 0) = 1.0;
  if (which == DegenerateCase::Minus) q(1, 1) = 1.0;
  return q;
}

QFieldResiduals qfield_residuals(const Mat2c& q) {
  QFieldResiduals r;
  r.idempotent = (q * q - q).cwiseAbs().maxCoeff();
  r.hermitian = (q - q.adjoint()).cwiseAbs().maxCoeff();
  r.qfield = std::abs(std::norm(q(0, 1)) - (q(0, 0) * q(1, 1)).real());
  const Mat2c qjq = q * reflection_j() * q;
  r.trace_qjq = qjq.trace().real();
  r.det_qjq = qjq.determinant().real();
  return r;
}

std::vector<double> ProjectionField::uniform_grid(int count, double lo, double hi) {
  std::vector<double> xi(count);
  for (int k = 0; k < count; ++k) xi[k] = count == 1 ? lo : lo + (hi - lo) * k / (count - 1);
  return xi;
}

ProjectionField ProjectionField::from_mu(std::span<const double> xi,
                                         const std::function<cd(double)>& mu) {
  ProjectionField f;
  for (double x : xi) {
    const cd m = mu(x);
    f.xi.push_back(x);
    f.mu.emplace_back(m);
    f.q.push_back(q_from_mu(m));
  }
  return f;
}

double ProjectionField::max_identity_residual() const {
  double worst = 0;
  for (const auto& m : q) {
    const auto r = qfield_residuals(m);
    worst = std::max({worst, r.idempotent, r.hermitian, r.qfield});
  }
  return worst;
}

double graph_jform(std::span<const cd> lambda, std::span<const cd> f0_hat,
                   std::span<const double> weights) {
  if (lambda.size() != f0_hat.size() || lambda.size() != weights.size()) {
    throw DomainError("graph_jform: grids are not aligned");
  }
  double total = 0;
  for (std::size_t k = 0; k < lambda.size(); ++k) {
    total += 2.0 * lambda[k].real() * std::norm(f0_hat[k]) * weights[k];
  }
  return total;
}

EscapeResult escape_time(double energy, double x0, Direction direction,
                         std::span<const double> cutoffs) {
  std::vector<double> lengths(cutoffs.begin(), cutoffs.end());
  if (lengths.empty()) {
    for (int k = 1; k <= 8; ++k) lengths.push_back(10.0 * k);
  }
  EscapeResult r;
  r.start = x0;
  const bool plus = direction == Direction::PlusInfinity;
  bool from_turning_point = false;
  if (energy < 0) {
    if (!plus) throw DomainError("E + e^{2x} < 0 on the path to -infinity");
    const double xt = 0.5 * std::log(-energy);
    if (x0 <= xt) {
      r.start = xt;
      from_turning_point = true;
    }
  }
  auto integrand = [energy](double x) {
    const double v = energy + std::exp(2 * x);
    if (!(v > 0)) throw DomainError("E + e^{2x} <= 0 inside the path");
    return 1.0 / std::sqrt(v);
  };
  auto segment = [&](double a, double b) {
    // unit panels, Gauss order 20
    std::vector<double> bp;
    const int n = std::max(1, static_cast<int>(std::ceil(std::abs(b - a))));
    for (int k = 0; k <= n; ++k) bp.push_back(a + (b - a) * k / n);
    return QuadratureRule::composite(bp, 20).integrate(integrand);
  };
  double total = 0, prev_end = r.start;
  if (from_turning_point) {
    // x = xt + v^2 removes the inverse square root at the turning point.
    const double xt = r.start;
    const QuadratureRule rule = QuadratureRule::composite({0.0, 0.25, 0.5, 1.0}, 20);
    total = rule.integrate([&](double v) {
      if (v == 0.0) return 0.0;
      const double x = xt + v * v;
      return 2 * v / std::sqrt(energy + std::exp(2 * x));
    });
    prev_end = xt + 1.0;
  }
  const double sign = plus ? 1.0 : -1.0;
  const double offset = prev_end - r.start;
  for (double len : lengths) {
    if (len <= offset) continue;
    const double end = r.start + sign * len;
    total += plus ? segment(prev_end, end) : segment(end, prev_end);
    prev_end = end;
    r.cutoffs.push_back(len);
    r.partials.push_back(total);
  }
  const std::size_t n = r.partials.size();
  if (n < 3) throw DomainError("escape_time needs at least three cutoffs");
  const double d1 = r.partials[n - 1] - r.partials[n - 2];
  const double d0 = r.partials[n - 2] - r.partials[n - 3];
  if (std::abs(d1) < 1e-8) {
    r.value = r.partials.back();
  } else if (std::abs(d1) >= 0.5 * std::abs(d0)) {
    r.diverges = true;
    r.slope = d1 / (r.cutoffs[n - 1] - r.cutoffs[n - 2]);
  } else {
    throw ConvergenceError("escape_time neither stabilized nor diverged; extend the cutoffs");
  }
  return r;
}

std::string to_string(EndClass c) {
  switch (c) {
    case EndClass::LimitPoint: return "limit_point";
    case EndClass::LimitCircle: return "limit_circle";
    case EndClass::Undetermined: return "undetermined";
  }
  return "?";
}

namespace {

using State = std::array<double, 5>;  // Re f, Im f, Re f', Im f', int |f|^2

struct Integrator {
  cd z;
  bool potential;
  double rel_tol;
  long max_steps;

  // Integrates from x0 to x1 (either direction); the mass slot accumulates
  // int |f|^2 with the sign of the direction.
  State run(State y, double x0, double x1) const {
    namespace odeint = boost::numeric::odeint;
    auto rhs = [this](const State& s, State& ds, double x) {
      const cd f(s[0], s[1]);
      const cd q = z - (potential ? std::exp(2 * x) : 0.0);
      const cd fpp = q * f;
      ds[0] = s[2];
      ds[1] = s[3];
      ds[2] = fpp.real();
      ds[3] = fpp.imag();
      ds[4] = std::norm(f);
    };
    auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(1e-14, rel_tol);
    double x = x0;
    const double dir = x1 > x0 ? 1.0 : -1.0;
    double dt = dir * 1e-3;
    long steps = 0;
    while (dir * (x1 - x) > 0) {
      if (dir * (x + dt - x1) > 0) dt = x1 - x;
      stepper.try_step(rhs, y, x, dt);
      if (++steps > max_steps || std::abs(dt) < 1e-14) {
        std::ostringstream os;
        os << "integrator stalled near x = " << x << " (step " << dt << ")";
        throw StiffnessError(os.str());
      }
    }
    return y;
  }
};

State initial(cd f, cd fp) { return {f.real(), f.imag(), fp.real(), fp.imag(), 0.0}; }

bool stable(double a, double b, double tol) {
  return std::isfinite(a) && std::isfinite(b) && std::abs(b - a) <= tol * std::max(std::abs(a), 1e-300);
}

// Outward columns (1, 0) and (0, 1) from x = 0.
void assess_columns(const Integrator& ode, int dir, const DeficiencyOptions& o, EndReport& rep) {
  const double x_far = dir * o.x_range, x_next = dir * (o.x_range + 5);
  const cd data[2][2] = {{1.0, 0.0}, {0.0, 1.0}};
  const bool envelope = ode.potential && dir > 0;
  for (int c = 0; c < 2; ++c) {
    const State y0 = initial(data[c][0], data[c][1]);
    if (!envelope) {
      const State a = ode.run(y0, 0.0, x_far);
      const State b = ode.run(a, x_far, x_next);
      rep.column_mass[c] = std::abs(a[4]);
      rep.column_mass_next[c] = std::abs(a[4]) + std::abs(b[4]);
      continue;
    }
    // Oscillatory end: integrate to t_m = e^{x_m}, then bound the tail with
    // w = sqrt(t) f, w'' + w = ((z - 1/4) / t^2) w, whose energy
    // |w_t|^2 + |w|^2 grows at most by exp(|z - 1/4| / t_m).
    const double k = std::abs(ode.z - 0.25);
    const double t_m = 1e3 * std::max(1.0, k);
    const double x_m = std::log(t_m);
    if (x_m >= o.x_range) throw DomainError("x_range too small for the oscillation cutoff");
    const State a = ode.run(y0, 0.0, x_m);
    const cd f(a[0], a[1]), fp(a[2], a[3]);
    const cd w = std::exp(0.5 * x_m) * f;
    const cd wt = std::exp(-0.5 * x_m) * (0.5 * f + fp);
    const double energy = (std::norm(w) + std::norm(wt)) * std::exp(k / t_m);
    auto tail = [&](double x_end) { return energy * (1.0 / t_m - std::exp(-x_end)); };
    rep.tail_bound = std::max(rep.tail_bound, tail(o.x_range));
    rep.column_mass[c] = a[4] + tail(o.x_range);
    rep.column_mass_next[c] = a[4] + tail(o.x_range + 5);
  }
}

// Solution decaying toward the far end, integrated inward to 0 and
// normalized by its Cauchy data at 0.
double subdominant_mass(const Integrator& ode, int dir, double range, Eigen::Vector2cd& data0) {
  const double x_far = dir * range;
  const cd q = ode.z - (ode.potential ? std::exp(2 * x_far) : 0.0);
  const cd kappa = std::sqrt(q);  // principal root, Re >= 0
  const State y = ode.run(initial(1.0, -static_cast<double>(dir) * kappa), x_far, 0.0);
  const cd f(y[0], y[1]), fp(y[2], y[3]);
  const double n2 = std::norm(f) + std::norm(fp);
  data0 << f / std::sqrt(n2), fp / std::sqrt(n2);
  return std::abs(y[4]) / n2;
}

EndReport assess_end(const Integrator& ode, int dir, const DeficiencyOptions& o) {
  EndReport rep;
  assess_columns(ode, dir, o, rep);
  if (stable(rep.column_mass[0], rep.column_mass_next[0], o.decay_tol) &&
      stable(rep.column_mass[1], rep.column_mass_next[1], o.decay_tol)) {
    rep.l2_count = 2;
    rep.classification = EndClass::LimitCircle;
    return rep;
  }
  if (ode.potential && dir > 0) return rep;  // oscillatory end is always handled above
  Eigen::Vector2cd next;
  rep.sub_mass = subdominant_mass(ode, dir, o.x_range, rep.sub_data);
  rep.sub_mass_next = subdominant_mass(ode, dir, o.x_range + 5, next);
  if (stable(rep.sub_mass, rep.sub_mass_next, o.decay_tol)) {
    rep.l2_count = 1;
    rep.classification = EndClass::LimitPoint;
  }
  return rep;
}

}  // namespace

DeficiencyResult deficiency_probe(cd z, const DeficiencyOptions& options) {
  if (options.x_range < 20) throw DomainError("deficiency_probe requires X >= 20");
  if (z.imag() == 0.0) throw DomainError("deficiency_probe requires Im z != 0");
  const Integrator ode{z, !options.control, options.rel_tol, options.max_steps};
  DeficiencyResult r;
  r.z = z;
  r.plus = assess_end(ode, +1, options);
  r.minus = assess_end(ode, -1, options);
  const int p = r.plus.l2_count, m = r.minus.l2_count;
  if (p == 0 || m == 0) {
    r.count_l2 = 0;
  } else if (p == 2 || m == 2) {
    r.count_l2 = std::min(p, m);
  } else {
    const auto& a = r.plus.sub_data;
    const auto& b = r.minus.sub_data;
    r.wronskian = std::abs(a(0) * b(1) - a(1) * b(0));
    r.count_l2 = r.wronskian < 1e-6 ? 1 : 0;
  }
  return r;
}

double XGrid::frequency(int k) const {
  const int kk = k < count / 2 ? k : k - count;
  return 2 * kPi * kk / (hi - lo);
}

namespace {

MatrixXcd graph_basis(const std::function<cd(double)>& lambda, const XGrid& grid) {
  const int n = grid.count;
  MatrixXcd f(n, n);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) f(k, j) = std::polar(1.0 / std::sqrt(n), -2 * kPi * k * j / n);
  }
  Eigen::VectorXcd lam(n);
  for (int k = 0; k < n; ++k) lam(k) = lambda(grid.frequency(k));
  MatrixXcd u(2 * n, n);
  u.topRows(n) = MatrixXcd::Identity(n, n);
  u.bottomRows(n) = f.adjoint() * lam.asDiagonal() * f;
  return orthonormal_span(u, 1e-12);
}

}  // namespace

double invariance_probe(const std::function<cd(double)>& lambda, std::span<const double> b_samples,
                        const XGrid& grid) {
  const MatrixXcd q = graph_basis(lambda, grid);
  const int n = grid.count;
  std::vector<double> per_b(b_samples.size(), 0.0);
  parallel_for(0, b_samples.size(), [&](std::size_t i) {
    Eigen::VectorXcd d(2 * n);
    for (int k = 0; k < n; ++k) {
      const cd p = std::exp(cd(0.0, b_samples[i] * std::exp(grid.x(k))));
      d(k) = p;
      d(n + k) = std::conj(p);
    }
    const MatrixXcd moved = d.asDiagonal() * q;
    const MatrixXcd outside = moved - q * (q.adjoint() * moved);
    per_b[i] = Eigen::BDCSVD<MatrixXcd>(outside).singularValues()(0);
  });
  double worst = 0;
  for (double v : per_b) worst = std::max(worst, v);
  return worst;
}

std::vector<double> normalized_graph_form(const std::function<cd(double)>& lambda,
                                          const XGrid& grid) {
  std::vector<double> out(grid.count);
  for (int k = 0; k < grid.count; ++k) {
    const cd l = lambda(grid.frequency(k));
    out[k] = 2 * l.real() / (1 + std::norm(l));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NoGoMember> default_nogo_family() {
  return {
      {"zero", [](double) { return cd(0.0); }},
      {"one", [](double) { return cd(1.0); }},
      {"i_tanh", [](double xi) { return cd(0.0, std::tanh(xi)); }},
      {"lorentzian", [](double xi) { return cd(1.0 / (1.0 + xi * xi)); }},
      {"weak", [](double) { return cd(0.02); }},
  };
}

std::vector<NoGoRow> nogo_harness(std::span<const NoGoMember> family,
                                  std::span<const double> b_samples, const XGrid& grid,
                                  double positive_threshold, double violation_threshold) {
  std::vector<NoGoRow> rows;
  for (const auto& m : family) {
    NoGoRow row;
    row.name = m.name;
    row.violation = invariance_probe(m.lambda, b_samples, grid);
    const auto form = normalized_graph_form(m.lambda, grid);
    row.form_min = form.front();
    row.form_max = form.back();
    row.nondegenerate = row.form_max > positive_threshold;
    row.consistent = !row.nondegenerate || row.violation > violation_threshold;
    rows.push_back(row);
  }
  return rows;
}

std::vector<ConeRecord> invariant_cones() {
  return {
      {"C1+", "{(0, 0, t) | t >= 0}"},
      {"C1-", "{(0, 0, t) | t <= 0}"},
      {"C2+", "{(0, x, y) | x real, y >= 0}"},
      {"C2-", "{(0, x, y) | x real, y <= 0}"},
  };
}

}  // namespace reflectlab::axb
