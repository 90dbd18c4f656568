#include "reflectlab/scenarios.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "reflectlab/axb.hpp"
#include "reflectlab/errors.hpp"
#include "reflectlab/heisenberg.hpp"
#include "reflectlab/oskernel.hpp"
#include "reflectlab/osquotient.hpp"
#include "reflectlab/sl2core.hpp"
#include "reflectlab/sl2series.hpp"

#ifndef REFLECTLAB_VERSION
#define REFLECTLAB_VERSION "0.0.0"
#endif

namespace reflectlab::cli {

namespace {

using cd = std::complex<double>;
using Eigen::MatrixXcd;
constexpr double kPi = std::numbers::pi;

// Portable uniform draws: the engine is fully specified by the standard,
// the distributions are not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  int index(int n) { return static_cast<int>(uniform() * n) % n; }
  cd complex_unit_box() { return {uniform(-1, 1), uniform(-1, 1)}; }

 private:
  std::mt19937_64 engine_;
};

std::optional<double> parse_double(const std::string& text) {
  double v = 0;
  const char* end = text.data() + text.size();
  const char* begin = text.data();
  if (begin != end && *begin == '+') ++begin;
  auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end) return std::nullopt;
  return v;
}

std::vector<std::string> split(const std::string& text, char sep = ',') {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, sep)) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? "" : item.substr(b, e - b + 1));
  }
  return out;
}

std::string num(double v) { return format_number(v); }

class Context {
 public:
  Context(const ScenarioConfig& config, Report& report)
      : config_(config), report_(report), rng_(config.seed) {}

  double number(const std::string& name) const {
    return std::get<double>(config_.parameters.at(name));
  }
  int integer(const std::string& name) const {
    const double v = number(name);
    if (v != std::floor(v) || std::abs(v) > 1e9) {
      throw ConfigError("parameter '" + name + "' must be an integer");
    }
    return static_cast<int>(v);
  }
  const std::string& text(const std::string& name) const {
    return std::get<std::string>(config_.parameters.at(name));
  }
  std::vector<double> list(const std::string& name) const {
    std::vector<double> out;
    for (const auto& item : split(text(name))) {
      const auto v = parse_double(item);
      if (!v) throw ConfigError("parameter '" + name + "': '" + item + "' is not a number");
      out.push_back(*v);
    }
    if (out.empty()) throw ConfigError("parameter '" + name + "' is empty");
    return out;
  }
  bool flag(const std::string& name) const { return number(name) != 0.0; }

  Rng& rng() { return rng_; }
  void metric(const std::string& name, double v) { report_.metrics[name] = v; }
  void verdict(const std::string& name, bool v) { report_.verdicts[name] = v; }
  CsvTable& table(const std::string& name, std::vector<std::string> header) {
    report_.tables.push_back({name, std::move(header), {}});
    report_.artifacts.push_back(name);
    return report_.tables.back();
  }

 private:
  const ScenarioConfig& config_;
  Report& report_;
  Rng rng_;
};

double max_abs(const MatrixXcd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

BasisFunctionSet basis_from(const Context& c) {
  return BasisFunctionSet::equispaced(c.integer("bumps"), c.number("lo"), c.number("hi"),
                                      c.number("half_width"));
}

std::vector<ParamSpec> basis_schema() {
  return {{"bumps", 12.0, "number of bump functions"},
          {"lo", -0.8, "leftmost bump center"},
          {"hi", 0.8, "rightmost bump center"},
          {"half_width", 0.15, "bump half-width"},
          {"order", 80.0, "Gauss-Legendre order per panel"}};
}

std::vector<ParamSpec> with_basis(std::vector<ParamSpec> extra) {
  auto out = basis_schema();
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

sl2::LieElement parse_generator(const std::string& name) {
  if (name == "2X0") return sl2::q(1, 0);
  if (name == "X0") return sl2::x_zero();
  if (name == "q11") return sl2::q(1, 1);
  if (name == "q1-1") return sl2::q(1, -1);
  if (name == "0") return {};
  throw ConfigError("unknown generator '" + name + "' (use 2X0, X0, q11, q1-1 or 0)");
}

// ---------------------------------------------------------------- SL(2,R)

void sl2_positivity(Context& c) {
  const double s = c.number("s");
  const auto basis = basis_from(c);
  const auto quad = basis.default_rule(c.integer("order"));
  const FormMatrix f = series::jform(s, basis, quad);
  const double scale = std::abs(f.eig_max());
  c.metric("eig_min", f.eig_min());
  c.metric("eig_max", f.eig_max());
  c.metric("eig_ratio", scale > 0 ? f.eig_min() / scale : 0.0);
  c.metric("radical_dim", f.radical_dim());
  c.metric("complementary", series::SeriesParameter{s}.complementary() ? 1.0 : 0.0);
  c.verdict("psd", f.eig_min() >= -c.number("psd_tol") * scale);

  auto& ev = c.table("eigenvalues.csv", {"index", "eigenvalue"});
  for (Eigen::Index k = 0; k < f.eigenvalues().size(); ++k) {
    ev.add_row({std::to_string(k), num(f.eigenvalues()(k))});
  }
  const auto [lo, hi] = basis.support();
  const int n = 33;
  auto& heat = c.table("kernel_heatmap.csv", {"x", "y", "kernel"});
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = lo + (hi - lo) * i / (n - 1), y = lo + (hi - lo) * j / (n - 1);
      heat.add_row({num(x), num(y), num(kernel_J(x, y, s))});
    }
  }
}

void sl2_contraction(Context& c) {
  const double s = c.number("s");
  const auto basis = basis_from(c);
  const auto quad = basis.default_rule(c.integer("order"));
  const double tol = c.number("tol");
  const double t_max = c.number("t_max");
  const FormMatrix f0 = series::jform(s, basis, quad);

  auto& rows = c.table("contraction.csv", {"t", "r", "sigma", "gamma_norm"});
  double worst = 0, best = std::numeric_limits<double>::infinity();
  bool all = true;
  for (int i = 0; i < c.integer("count"); ++i) {
    const double t = c.rng().uniform(-t_max, t_max);
    const double r = c.rng().uniform(0.05, 1.0);
    const double sigma = c.rng().uniform(-0.9, 0.9) * r;
    const auto g = sl2::h(t) * sl2::exp_lie(sl2::q(r, sigma));
    const auto fg = series::moved_jform(g, s, basis, quad).form;
    const auto res = contraction_check(f0, fg, tol);
    worst = std::max(worst, res.gamma_norm);
    best = std::min(best, res.gamma_norm);
    all = all && res.verdict;
    rows.add_row({num(t), num(r), num(sigma), num(res.gamma_norm)});
  }
  const auto witness =
      sl2::h(c.number("witness_t")) * sl2::exp_lie(sl2::q(c.number("witness_eps"), 0));
  const double wnorm =
      contraction_check(f0, series::moved_jform(witness, s, basis, quad).form, tol).gamma_norm;
  c.metric("max_gamma_norm", worst);
  c.metric("min_gamma_norm", best);
  c.metric("witness_gamma_norm", wnorm);
  c.verdict("contraction", all && worst <= 1.0 + tol);
  c.verdict("sharpness_witness", wnorm >= c.number("witness_min"));
}

void sl2_dual_spectrum(Context& c) {
  const auto basis = basis_from(c);
  const auto quad = basis.default_rule(c.integer("order"));
  const double delta = c.number("delta");
  const double tol = c.number("tol");
  const double bound = c.number("nonpositive_tol");
  const double unitary_t = c.number("unitary_t");

  auto& rows = c.table("spectrum.csv", {"generator", "s", "index", "eigenvalue"});
  bool nonpositive = true, consistent = true, unitary = true;
  double worst_max = -std::numeric_limits<double>::infinity(), worst_gap = 0, worst_unitary = 0;
  for (const auto& name : split(c.text("generators"))) {
    const auto y = parse_generator(name);
    for (double s : c.list("s_values")) {
      const std::string key = name + ".s" + num(s) + ".";
      GeneratorSpectrum sp;
      try {
        sp = series::dual_spectrum(y, s, basis, quad, delta, tol);
      } catch (const ConvergenceError&) {
        consistent = false;
        c.metric(key + "consistency_gap", std::numeric_limits<double>::infinity());
        continue;
      }
      const MatrixXcd u = dual_unitary(sp, unitary_t);
      const MatrixXcd& m = sp.quotient.induced_metric;
      const double ures =
          m.size() ? max_abs(u.adjoint() * m * u - m) / std::max(1e-300, max_abs(m)) : 0.0;
      c.metric(key + "max_eigenvalue", sp.max());
      c.metric(key + "consistency_gap", sp.consistency_gap);
      c.metric(key + "clipped", sp.clipped);
      c.metric(key + "quotient_dim", sp.quotient.dim());
      c.metric(key + "unitary_residual", ures);
      worst_max = std::max(worst_max, sp.max());
      worst_gap = std::max(worst_gap, sp.consistency_gap);
      worst_unitary = std::max(worst_unitary, ures);
      nonpositive = nonpositive && sp.max() <= bound;
      consistent = consistent && sp.consistency_gap <= tol;
      unitary = unitary && ures <= 1e-10;
      for (std::size_t k = 0; k < sp.eigenvalues.size(); ++k) {
        rows.add_row({name, num(s), std::to_string(k), num(sp.eigenvalues[k])});
      }
    }
  }
  c.metric("max_eigenvalue", worst_max);
  c.metric("max_consistency_gap", worst_gap);
  c.metric("max_unitary_residual", worst_unitary);
  c.verdict("nonpositive", nonpositive);
  c.verdict("consistency", consistent);
  c.verdict("unitary", unitary);
}

void sl2_identities(Context& c) {
  const double s = c.number("s");
  const auto basis = basis_from(c);
  const auto quad = basis.default_rule(c.integer("order"));
  auto& rng = c.rng();

  double tanh_res = 0;
  const int tn = c.integer("t_count");
  for (int k = 0; k < tn; ++k) {
    const double t = -10.0 + 20.0 * k / (tn - 1);
    tanh_res = std::max(tanh_res, std::abs(sl2::zeta(sl2::h(t)) - std::tanh(t)));
  }
  c.metric("tanh_residual", tanh_res);
  c.verdict("tanh_identity", tanh_res <= 1e-12);

  std::vector<std::pair<double, double>> pairs;
  for (int k = 0; k < c.integer("pairs"); ++k) {
    pairs.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1));
  }
  const double kres = series::kernel_identity_check(s, pairs);
  c.metric("kernel_identity_residual", kres);
  c.verdict("kernel_identity", kres <= 1e-12);

  const FormMatrix f0 = series::jform(s, basis, quad);
  const double fscale = f0.eig_max();
  const double sa = series::selfadjoint_residual(sl2::exp_lie(sl2::q(1, 0)), s, basis, quad);
  c.metric("selfadjoint_residual", sa);
  c.metric("selfadjoint_residual_relative", sa / fscale);
  c.verdict("selfadjoint", sa <= 1e-7);

  double law = 0;
  auto random_cone = [&](double scale) {
    const double r = rng.uniform(0.05, 1.0) * scale;
    return sl2::q(r, rng.uniform(-1, 1) * r);
  };
  for (int k = 0; k < c.integer("law_pairs"); ++k) {
    const auto g1 = sl2::exp_lie(random_cone(0.5));
    const auto g2 = sl2::exp_lie(random_cone(0.5));
    law = std::max(law, semigroup_law_check(series::semigroup_law_data(g1, g2, s, basis, quad)));
  }
  c.metric("semigroup_law_residual", law);
  c.verdict("semigroup_law", law <= 1e-6);

  std::vector<sl2::GroupElement> group;
  std::vector<sl2::LieElement> cone;
  for (int k = 0; k < 8; ++k) {
    group.push_back(sl2::exp_lie({rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5),
                                  rng.uniform(-0.5, 0.5)}));
    cone.push_back(random_cone(0.5));
  }
  std::vector<double> xs;
  for (int k = 0; k < 41; ++k) xs.push_back(-0.95 + 1.9 * k / 40);
  const auto pr = series::pr_pipeline_check(s, basis, quad, group, cone, xs);
  c.metric("pr.r1_residual", pr.r1_residual);
  c.metric("pr.r2_residual", pr.r2_residual);
  c.metric("pr.pr3_eig_min", pr.pr3_eig_min);
  c.metric("pr.invariance_residual", pr.invariance_residual);
  c.verdict("pr_axioms", pr.passed());

  std::vector<sl2::GroupElement> hgrid;
  for (int k = -4; k <= 4; ++k) hgrid.push_back(sl2::h(0.5 * k));
  const FormMatrix cert = series::positive_kernel_certificate(s, hgrid);
  c.metric("certificate_eig_min", cert.eig_min());
  c.verdict("certificate_psd", psd_report(cert).verdict != Verdict::Indefinite);

  // A_s pi_s(g) f = pi_{-s}(g) A_s f
  double inter = 0;
  const Bump phi = basis[basis.size() / 2];
  const auto f = series::from_bump(phi);
  const sl2::GroupElement gs[] = {sl2::exp_lie(sl2::q(0.3, 0.1)), sl2::h(0.2)};
  for (const auto& g : gs) {
    const auto moved = series::moved(g, s, phi);
    for (double x : {-0.7, -0.3, 0.05, 0.4, 0.8}) {
      const double lhs = series::intertwiner_apply(s, moved, x);
      const double den = -g.b() * x + g.d();
      const double y = (g.a() * x - g.c()) / den;
      const double rhs = std::pow(std::abs(den), s - 1.0) * series::intertwiner_apply(s, f, y);
      inter = std::max(inter, std::abs(lhs - rhs));
    }
  }
  c.metric("intertwining_residual", inter);
  c.verdict("intertwining", inter <= 1e-5);
}

// ---------------------------------------------------------------- kernels

void kernels_bergman(Context& c) {
  auto& rng = c.rng();
  std::vector<cd> pts;
  for (int k = 0; k < c.integer("points"); ++k) {
    pts.push_back(std::polar(c.number("radius") * std::sqrt(rng.uniform()), rng.uniform(0, 2 * kPi)));
  }
  auto& rows = c.table("bergman.csv", {"lambda", "eig_min", "eig_max", "verdict"});
  bool ok = true;
  for (double lambda : c.list("lambdas")) {
    const auto g = bergman_gram(pts, lambda);
    const auto rep = psd_report(g);
    const bool psd = rep.verdict != Verdict::Indefinite;
    ok = ok && (psd == (lambda >= 0));
    c.metric("lambda" + num(lambda) + ".eig_min", rep.eig_min);
    rows.add_row({num(lambda), num(rep.eig_min), num(rep.eig_max), to_string(rep.verdict)});
  }
  c.verdict("iff_criterion", ok);
}

void cayley_table_scenario(Context& c) {
  const auto table = cayley_table(c.integer("n_max"));
  auto& rows = c.table("cayley_table.csv", {"space", "R", "Lpos"});
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& row : table) {
    rows.add_row({row.space.name(), num(row.R), num(row.Lpos)});
    margin = std::min(margin, row.Lpos - row.R);
  }
  c.metric("rows", static_cast<double>(table.size()));
  c.metric("min_lpos_minus_r", margin);
  c.verdict("lpos_at_least_r", margin >= 0);
}

void phillips(Context& c) {
  auto& rng = c.rng();
  const int max_points = c.integer("max_points");
  auto& rows = c.table("phillips.csv", {"points", "fixed", "quotient_dim", "eig_min"});
  bool psd = true, dims = true, fpf = true, invariant = true;
  int fpf_cases = 0;
  for (int trial = 0; trial < c.integer("spaces"); ++trial) {
    const int n = 1 + rng.index(max_points);
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.index(i + 1)]);
    // Pair off a random even-length prefix; the rest are fixed points.
    // Every fourth space is made fixed-point free when n is even.
    int paired = 2 * rng.index(n / 2 + 1);
    if (trial % 4 == 3 && n % 2 == 0) paired = n;
    FiniteReflectionSpace space;
    space.theta.resize(n);
    space.weights.resize(n);
    for (int i = 0; i < n; ++i) space.theta[i] = i;
    for (int i = 0; i + 1 < paired; i += 2) {
      space.theta[perm[i]] = perm[i + 1];
      space.theta[perm[i + 1]] = perm[i];
    }
    for (int i = 0; i < n; ++i) {
      if (space.theta[i] >= i) space.weights[i] = rng.uniform(0.1, 2.0);
    }
    for (int i = 0; i < n; ++i) space.weights[i] = space.weights[std::min(i, space.theta[i])];

    const auto r = phillips_subspace(space);
    const auto rep = psd_report(r.jform);
    const int m0 = static_cast<int>(r.fixed_points.size());
    psd = psd && rep.verdict != Verdict::Indefinite;
    dims = dims && r.quotient_dim == m0;
    if (m0 == 0) {
      ++fpf_cases;
      fpf = fpf && r.quotient_dim == 0;
    }
    // Multiplication by a function constant on theta-orbits keeps K0.
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) d(i) = 1.0 + std::min(i, space.theta[i]);
    const Eigen::MatrixXd moved = d.asDiagonal() * r.k0;
    const Eigen::MatrixXd proj = r.k0 * (r.k0.transpose() * r.k0).inverse() * r.k0.transpose();
    invariant = invariant && (moved - proj * moved).cwiseAbs().maxCoeff() <= 1e-12;
    rows.add_row({std::to_string(n), std::to_string(m0), std::to_string(r.quotient_dim),
                  num(rep.eig_min)});
  }
  c.metric("fixed_point_free_cases", fpf_cases);
  c.verdict("jform_psd", psd);
  c.verdict("quotient_dim_equals_fixed_points", dims);
  c.verdict("fixed_point_free_quotient_zero", fpf && fpf_cases > 0);
  c.verdict("orbit_multipliers_invariant", invariant);
}

// ---------------------------------------------------------------- Heisenberg

heis::HeisenbergTestFunction random_upper_test_function(Rng& rng, int terms) {
  heis::HeisenbergTestFunction f;
  for (int k = 0; k < terms; ++k) {
    heis::TestTerm t;
    t.coeff = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    t.x = {rng.uniform(-1, 1), rng.uniform(0.4, 0.8)};
    const double yc = rng.uniform(0.6, 1.2);
    t.y = {yc, rng.uniform(0.2, std::min(0.5, yc - 0.3))};
    t.c = {rng.uniform(-0.5, 0.5), rng.uniform(0.5, 1.0)};
    t.omega = rng.uniform(-2, 2);
    f.terms.push_back(t);
  }
  return f;
}

void heisenberg_rp(Context& c) {
  auto& rng = c.rng();
  heis::FTableSpec spec;
  spec.r_max = c.number("r_max");
  spec.tol = c.number("table_tol");
  const std::string cache = c.text("cache_dir");
  const auto kernel = cache.empty() ? heis::SubLaplacianKernel::build(spec)
                                    : heis::SubLaplacianKernel::load_or_build(spec, cache);
  c.metric("table_nodes", kernel.node_count());

  auto& rows = c.table("rp_forms.csv", {"function", "direct", "reduced", "relative_difference"});
  double worst_rel = 0, min_reduced = std::numeric_limits<double>::infinity();
  bool nonneg = true;
  for (int k = 0; k < c.integer("functions"); ++k) {
    const auto f = random_upper_test_function(rng, c.integer("terms"));
    const double direct = heis::rp_form_direct(f, kernel, c.integer("order"));
    const double reduced = heis::rp_form_reduced(f);
    const double rel = std::abs(direct - reduced) / std::max(std::abs(reduced), 1e-300);
    worst_rel = std::max(worst_rel, rel);
    min_reduced = std::min(min_reduced, reduced);
    nonneg = nonneg && reduced >= 0.0;
    rows.add_row({std::to_string(k), num(direct), num(reduced), num(rel)});
  }
  c.metric("max_relative_difference", worst_rel);
  c.metric("min_reduced", min_reduced);
  c.verdict("reduced_nonnegative", nonneg);
  c.verdict("direct_matches_reduced", worst_rel <= c.number("agreement_tol"));

  // F o tau = F
  double tau_res = 0;
  for (int k = 0; k < 50; ++k) {
    const double x = rng.uniform(-3, 3), y = rng.uniform(0.05, 3);
    tau_res = std::max(tau_res, std::abs(kernel(x, y) - kernel(x, -y)));
  }
  c.metric("tau_invariance_residual", tau_res);
  c.verdict("tau_invariant", tau_res == 0.0);

  auto& fcurve = c.table("f_table.csv", {"r", "F"});
  for (int k = 0; k <= 200; ++k) {
    const double r = spec.r_min * std::pow(spec.r_max / spec.r_min, k / 200.0);
    fcurve.add_row({num(r), num(kernel(r))});
  }

  // Positive definiteness on a random point cloud, with the mollified kernel.
  // points lie in [-1, 1]^2, so radii stay below 3
  const heis::MollifiedKernel mk(c.number("mollifier"), 3.0, 512);
  const int np = 40;
  std::vector<heis::HeisenbergElement> pts;
  std::vector<double> w(np, 1.0 / np);
  std::vector<cd> fv;
  for (int k = 0; k < np; ++k) {
    pts.push_back(heis::HeisenbergElement::scalar(rng.uniform(-1, 1), rng.uniform(-1, 1),
                                                  rng.uniform(-1, 1)));
    fv.push_back(rng.complex_unit_box());
  }
  const double pd = heis::pd_form(
      [&](const heis::HeisenbergElement& g) { return cd(mk(std::hypot(g.a[0], g.b[0])), 0.0); },
      pts, w, fv);
  c.metric("pd_form_mollified", pd);
  c.verdict("pd_nonnegative", pd >= -1e-8);

  const int trials = c.integer("hardy_trials"), freqs = c.integer("hardy_frequencies");
  const heis::Symbol one = [](double) { return cd(1.0, 0.0); };
  const double hmin = heis::hardy_positivity_probe(one, one, trials, freqs, 1 + c.integer("hardy_seed"));
  const double hzero =
      heis::hardy_positivity_probe(one, one, trials, freqs, 1 + c.integer("hardy_seed"), true);
  c.metric("hardy_min", hmin);
  c.metric("hardy_min_zero_minus", hzero);
  c.verdict("hardy_indefinite", hmin < 0.0);
  c.verdict("hardy_zero_minus", hzero == 0.0);
}

MatrixXcd random_invariant_k0(Rng& rng, int k) {
  std::vector<int> chosen;
  for (int i = 0; i < 2 * k; ++i) {
    if (rng.uniform() < 0.3) chosen.push_back(i);
  }
  if (chosen.empty()) chosen.push_back(rng.index(2 * k));
  const auto r = static_cast<Eigen::Index>(chosen.size());
  MatrixXcd coords = MatrixXcd::Zero(2 * k, r);
  for (Eigen::Index j = 0; j < r; ++j) coords(chosen[j], j) = 1.0;
  MatrixXcd mix(r, r);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < r; ++j) mix(i, j) = rng.complex_unit_box();
    mix(i, i) += 2.0 * static_cast<double>(r);
  }
  return coords * mix;
}

void heisenberg_uncorrelate(Context& c) {
  auto& rng = c.rng();
  const int k = c.integer("points");
  heis::PhaseModel model;
  model.hbar = c.number("hbar");
  for (int i = 0; i < k; ++i) model.x.push_back(0.1 * i + 0.05 * rng.uniform());
  heis::UncorrelateOptions opt;
  opt.tol = c.number("invariance_tol");

  double worst = 0, idem = 0;
  auto& rows = c.table("uncorrelate.csv", {"model", "dim_k0", "dim_plus", "dim_minus", "residual"});
  for (int m = 0; m < c.integer("models"); ++m) {
    const MatrixXcd k0 = random_invariant_k0(rng, k);
    const auto res = heis::uncorrelate(k0, model, opt);
    worst = std::max(worst, res.residual);
    MatrixXcd split = MatrixXcd::Zero(2 * k, res.d_plus.cols() + res.d_minus.cols());
    split.topLeftCorner(k, res.d_plus.cols()) = res.d_plus;
    split.bottomRightCorner(k, res.d_minus.cols()) = res.d_minus;
    const auto again = heis::uncorrelate(split, model, opt);
    idem = std::max({idem, again.residual,
                     static_cast<double>(std::abs(again.d_plus.cols() - res.d_plus.cols()) +
                                         std::abs(again.d_minus.cols() - res.d_minus.cols()))});
    rows.add_row({std::to_string(m), std::to_string(k0.cols()), std::to_string(res.d_plus.cols()),
                  std::to_string(res.d_minus.cols()), num(res.residual)});
  }
  c.metric("max_residual", worst);
  c.metric("idempotence_residual", idem);
  c.verdict("uncorrelated", worst <= c.number("residual_tol"));
  c.verdict("idempotent", idem <= c.number("residual_tol"));

  // A graph {(v, M v)} with M != 0 violates the invariance hypothesis.
  MatrixXcd graph(2 * k, 1);
  graph.setZero();
  graph(0, 0) = 1.0;
  graph(k + 1, 0) = 0.5;
  bool rejected = false;
  try {
    heis::uncorrelate(graph, model, opt);
  } catch (const HypothesisError&) {
    rejected = true;
  }
  c.verdict("graph_rejected", rejected);

  // (e1, e1) in a two-point model: the invariant hull splits as e1 (+) e1.
  heis::PhaseModel two;
  two.x = {0.3, 1.1};
  two.hbar = model.hbar;
  MatrixXcd e11 = MatrixXcd::Zero(4, 1);
  e11(0, 0) = 1.0;
  e11(2, 0) = 1.0;
  auto eopt = opt;
  eopt.enlarge = true;
  const auto hull = heis::uncorrelate(e11, two, eopt);
  const bool split_ok = hull.enlarged && hull.d_plus.cols() == 1 && hull.d_minus.cols() == 1 &&
                        std::abs(std::abs(hull.d_plus(0, 0)) - 1.0) <= 1e-12 &&
                        std::abs(std::abs(hull.d_minus(0, 0)) - 1.0) <= 1e-12 &&
                        hull.residual <= c.number("residual_tol");
  c.metric("enlarged_residual", hull.residual);
  c.verdict("enlarge_two_point", split_ok);
}

// ---------------------------------------------------------------- (ax+b)

void axb_qfield(Context& c) {
  auto& rng = c.rng();
  const int count = c.integer("samples");
  double ident = 0, tr = 0, det = 0, trace_min = std::numeric_limits<double>::infinity();
  for (int k = 0; k < count; ++k) {
    const double scale = std::pow(10.0, rng.uniform(-3, 3));
    const cd mu = k % 10 == 0 ? cd(0.0, rng.uniform(-5, 5))
                              : cd(scale * rng.uniform(), scale * rng.uniform(-1, 1));
    const auto q = axb::q_from_mu(mu);
    const auto r = axb::qfield_residuals(q);
    ident = std::max({ident, r.idempotent, r.hermitian, r.qfield});
    tr = std::max(tr, std::abs(r.trace_qjq - 2 * mu.real() / (1 + std::norm(mu))));
    det = std::max(det, std::abs(r.det_qjq));
    trace_min = std::min(trace_min, r.trace_qjq);
  }
  c.metric("identity_residual", ident);
  c.metric("trace_residual", tr);
  c.metric("det_qjq_max", det);
  c.metric("trace_qjq_min", trace_min);
  c.verdict("qfield_identities", ident <= 1e-12);
  c.verdict("trace_formula", tr <= 1e-12 && trace_min >= 0);
  c.verdict("det_zero", det <= 1e-12);

  double degenerate = 0;
  for (auto which : {axb::DegenerateCase::Zero, axb::DegenerateCase::Plus,
                     axb::DegenerateCase::Minus}) {
    const auto q = axb::q_degenerate(which);
    degenerate = std::max(degenerate, (q * axb::reflection_j() * q).cwiseAbs().maxCoeff());
  }
  c.verdict("degenerate_qjq_zero", degenerate == 0.0);

  const auto xi = axb::ProjectionField::uniform_grid();
  const auto field = axb::ProjectionField::from_mu(
      xi, [](double x) { return cd(x * x / (1 + x * x), std::sin(x)); });
  c.metric("field_identity_residual", field.max_identity_residual());
  c.verdict("field_identities", field.max_identity_residual() <= 1e-12);

  // graph J-form for lambda = i, 1, and a sign-changing real part
  std::vector<double> w(xi.size(), xi[1] - xi[0]);
  std::vector<cd> f0(xi.size()), li(xi.size(), cd(0, 1)), l1(xi.size(), 1.0), lmix(xi.size());
  double norm2 = 0;
  for (std::size_t k = 0; k < xi.size(); ++k) {
    f0[k] = std::exp(-xi[k] * xi[k] / 8) * cd(1.0, 0.3 * xi[k]);
    norm2 += std::norm(f0[k]) * w[k];
    lmix[k] = cd(std::tanh(xi[k]), 0.5);
  }
  c.metric("graph_jform_imaginary", axb::graph_jform(li, f0, w));
  c.metric("graph_jform_one_residual", std::abs(axb::graph_jform(l1, f0, w) - 2 * norm2));
  std::vector<cd> left(xi.size()), right(xi.size());
  for (std::size_t k = 0; k < xi.size(); ++k) {
    left[k] = std::exp(-(xi[k] + 5) * (xi[k] + 5));
    right[k] = std::exp(-(xi[k] - 5) * (xi[k] - 5));
  }
  const double gl = axb::graph_jform(lmix, left, w), gr = axb::graph_jform(lmix, right, w);
  c.metric("graph_jform_mixed_left", gl);
  c.metric("graph_jform_mixed_right", gr);
  c.verdict("graph_jform_cases", axb::graph_jform(li, f0, w) == 0.0 &&
                                     std::abs(axb::graph_jform(l1, f0, w) - 2 * norm2) <=
                                         1e-12 * norm2 &&
                                     gl < 0 && gr > 0);

  double comp = 0;
  const std::function<cd(double)> f = [](double x) {
    return std::exp(-x * x) * cd(std::cos(x), std::sin(2 * x));
  };
  for (int k = 0; k < 100; ++k) {
    const axb::AxbElement g1{rng.uniform(-1, 1), rng.uniform(-2, 2)};
    const axb::AxbElement g2{rng.uniform(-1, 1), rng.uniform(-2, 2)};
    const double x = rng.uniform(-2, 2);
    for (int sign : {1, -1}) {
      const std::function<cd(double)> inner = [&](double y) { return axb::pi_pm(g2, sign, f, y); };
      comp = std::max(comp, std::abs(axb::pi_pm(g1, sign, inner, x) - axb::pi_pm(g1 * g2, sign, f, x)));
    }
  }
  c.metric("composition_residual", comp);
  c.verdict("representation", comp <= 1e-12);
}

void axb_escape(Context& c) {
  const double x0 = c.number("x0");
  auto& rows = c.table("escape.csv", {"energy", "direction", "cutoff", "partial"});
  bool finite = true, closed = true, diverges = true, slope = true;
  for (double e : c.list("energies")) {
    const std::string key = "E" + num(e) + ".";
    const auto plus = axb::escape_time(e, x0, axb::Direction::PlusInfinity);
    double exact = 0;
    if (e > 0) {
      exact = std::asinh(std::sqrt(e) * std::exp(-x0)) / std::sqrt(e);
    } else if (e == 0) {
      exact = std::exp(-x0);
    } else {
      exact = kPi / (2 * std::sqrt(-e));
    }
    c.metric(key + "t_plus", plus.value);
    c.metric(key + "t_plus_error", std::abs(plus.value - exact));
    finite = finite && !plus.diverges;
    closed = closed && std::abs(plus.value - exact) <= 1e-8;
    for (std::size_t k = 0; k < plus.cutoffs.size(); ++k) {
      rows.add_row({num(e), "+inf", num(plus.cutoffs[k]), num(plus.partials[k])});
    }
    if (e > 0) {
      const auto minus = axb::escape_time(e, x0, axb::Direction::MinusInfinity);
      const double rel = std::abs(minus.slope * std::sqrt(e) - 1.0);
      c.metric(key + "minus_slope", minus.slope);
      c.metric(key + "minus_slope_relative_error", rel);
      diverges = diverges && minus.diverges;
      slope = slope && rel <= 0.01;
      for (std::size_t k = 0; k < minus.cutoffs.size(); ++k) {
        rows.add_row({num(e), "-inf", num(minus.cutoffs[k]), num(minus.partials[k])});
      }
    }
  }
  c.verdict("plus_finite", finite);
  c.verdict("plus_closed_form", closed);
  c.verdict("minus_diverges", diverges);
  c.verdict("minus_slope", slope);
}

void axb_deficiency(Context& c) {
  axb::DeficiencyOptions base;
  base.x_range = c.number("x_range");
  base.rel_tol = c.number("rel_tol");
  base.decay_tol = c.number("decay_tol");
  auto refined = base;
  refined.x_range = c.number("x_range_refined");
  auto tight = base;
  tight.rel_tol = c.number("rel_tol_refined");
  auto control = base;
  control.control = true;

  auto& rows = c.table("deficiency.csv", {"z", "run", "plus", "minus", "count_l2", "wronskian"});
  bool plus_lc = true, minus_lp = true, stable = true, ctrl = true;
  for (double im : c.list("imag_parts")) {
    const cd z(0.0, im);
    const std::string key = "z" + num(im) + "i.";
    const std::pair<const char*, const axb::DeficiencyOptions*> runs[] = {
        {"base", &base}, {"refined_range", &refined}, {"refined_tol", &tight}};
    for (const auto& [name, opt] : runs) {
      const auto r = axb::deficiency_probe(z, *opt);
      rows.add_row({num(im), name, axb::to_string(r.plus.classification),
                    axb::to_string(r.minus.classification), std::to_string(r.count_l2),
                    num(r.wronskian)});
      const bool ok = r.plus.classification == axb::EndClass::LimitCircle &&
                      r.minus.classification == axb::EndClass::LimitPoint;
      if (std::string(name) == "base") {
        plus_lc = plus_lc && r.plus.classification == axb::EndClass::LimitCircle;
        minus_lp = minus_lp && r.minus.classification == axb::EndClass::LimitPoint;
        c.metric(key + "plus_l2_count", r.plus.l2_count);
        c.metric(key + "minus_l2_count", r.minus.l2_count);
        c.metric(key + "count_l2", r.count_l2);
        c.metric(key + "wronskian", r.wronskian);
        c.metric(key + "plus_tail_bound", r.plus.tail_bound);
      } else {
        stable = stable && ok;
      }
    }
    const auto cr = axb::deficiency_probe(z, control);
    rows.add_row({num(im), "control", axb::to_string(cr.plus.classification),
                  axb::to_string(cr.minus.classification), std::to_string(cr.count_l2),
                  num(cr.wronskian)});
    c.metric(key + "control_count_l2", cr.count_l2);
    ctrl = ctrl && cr.plus.l2_count == 1 && cr.minus.l2_count == 1 && cr.count_l2 == 0;
  }
  c.verdict("plus_limit_circle", plus_lc);
  c.verdict("minus_limit_point", minus_lp);
  c.verdict("stable_under_refinement", stable);
  c.verdict("control_run", ctrl);
}

void axb_nogo(Context& c) {
  const auto family = axb::default_nogo_family();
  const auto b = c.list("b_samples");
  axb::XGrid grid;
  grid.count = c.integer("grid_points");
  const auto rows = axb::nogo_harness(family, b, grid, c.number("positive_threshold"),
                                      c.number("violation_threshold"));
  auto& table = c.table("nogo.csv", {"member", "violation", "form_max", "form_min",
                                     "nondegenerate", "consistent"});
  bool all = true;
  int nondegenerate = 0;
  for (const auto& r : rows) {
    c.metric(r.name + ".violation", r.violation);
    c.metric(r.name + ".form_max", r.form_max);
    all = all && r.consistent;
    nondegenerate += r.nondegenerate ? 1 : 0;
    table.add_row({r.name, num(r.violation), num(r.form_max), num(r.form_min),
                   r.nondegenerate ? "1" : "0", r.consistent ? "1" : "0"});
  }
  c.metric("members", static_cast<double>(rows.size()));
  c.metric("nondegenerate_members", nondegenerate);
  c.verdict("dichotomy", all);

  auto& cones = c.table("cones.csv", {"name", "description"});
  for (const auto& cone : axb::invariant_cones()) cones.add_row({cone.name, cone.description});
}

// ---------------------------------------------------------------- registry

struct Entry {
  ScenarioInfo info;
  std::function<void(Context&)> body;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = [] {
    std::vector<Entry> e;
    e.push_back({{"sl2-positivity",
                  "eigenvalues of the J-form of the complementary series on bumps",
                  with_basis({{"s", 0.5, "series parameter"},
                              {"psd_tol", 1e-9, "relative eigenvalue tolerance"}})},
                 sl2_positivity});
    e.push_back({{"sl2-contraction", "norm bound of induced operators for random elements of S",
                  with_basis({{"s", 0.5, "series parameter"},
                              {"count", 20.0, "random semigroup elements"},
                              {"t_max", 1.0, "range of the H-component"},
                              {"tol", 1e-6, "contraction tolerance"},
                              {"witness_t", 1.0, "H-component of the sharpness witness"},
                              {"witness_eps", 1e-3, "cone component of the witness"},
                              {"witness_min", 0.99, "lower bound for the witness norm"}})},
                 sl2_contraction});
    e.push_back({{"sl2-dual-spectrum", "spectrum of the generators of the dual representation",
                  with_basis({{"s_values", std::string("0.25,0.5,0.75"), "series parameters"},
                              {"generators", std::string("2X0,q11"),
                               "cone elements: 2X0, X0, q11, q1-1, 0"},
                              {"delta", 1e-2, "time step"},
                              {"tol", 1e-4, "consistency tolerance"},
                              {"nonpositive_tol", 1e-6, "upper bound for eigenvalues"},
                              {"unitary_t", 0.7, "time for the unitarity check"}})},
                 sl2_dual_spectrum});
    e.push_back({{"sl2-identities", "exact identities and axioms of the SL(2,R) model",
                  with_basis({{"s", 0.5, "series parameter"},
                              {"t_count", 201.0, "points of the tanh grid on [-10, 10]"},
                              {"pairs", 1000.0, "random pairs for the kernel identity"},
                              {"law_pairs", 10.0, "random pairs for the semigroup law"}})},
                 sl2_identities});
    e.push_back({{"kernels-bergman", "positivity of (1 - z conj w)^-lambda on random points",
                  {{"lambdas", std::string("-2,-1,-0.5,0,0.5,1,2"), "exponents"},
                   {"points", 8.0, "random points in the disk"},
                   {"radius", 0.9, "radius of the sampling disk"}}},
                 kernels_bergman});
    e.push_back({{"cayley-table", "complementary series constants of Cayley type spaces",
                  {{"n_max", 8.0, "largest n per family"}}},
                 cayley_table_scenario});
    e.push_back({{"phillips", "maximal positive invariant subspaces of finite reflection spaces",
                  {{"spaces", 50.0, "random spaces"}, {"max_points", 32.0, "points per space"}}},
                 phillips});
    e.push_back({{"heisenberg-rp", "reflection positivity of the sub-Laplacian distribution",
                  {{"functions", 10.0, "random test functions"},
                   {"terms", 2.0, "separable terms per test function"},
                   {"order", 20.0, "Gauss order per panel of the direct form"},
                   {"agreement_tol", 1e-4, "relative tolerance direct vs reduced"},
                   {"r_max", 12.0, "largest tabulated radius"},
                   {"table_tol", 1e-8, "F-table stability tolerance"},
                   {"cache_dir", std::string(""), "directory for the F-table cache"},
                   {"mollifier", 0.2, "width of the mollifier for the PD check"},
                   {"hardy_trials", 200.0, "random Hardy trials"},
                   {"hardy_frequencies", 64.0, "frequencies per Hardy space"},
                   {"hardy_seed", 0.0, "seed offset of the Hardy probe"}}},
                 heisenberg_rp});
    e.push_back({{"heisenberg-uncorrelate", "splitting of invariant subspaces in finite models",
                  {{"models", 20.0, "random invariant subspaces"},
                   {"points", 64.0, "grid points per component"},
                   {"hbar", 1.0, "Planck constant"},
                   {"invariance_tol", 1e-10, "hypothesis tolerance"},
                   {"residual_tol", 1e-8, "bound on the splitting residual"}}},
                 heisenberg_uncorrelate});
    e.push_back({{"axb-qfield", "projection field identities and the representations pi_+-",
                  {{"samples", 1000.0, "random mu values"}}},
                 axb_qfield});
    e.push_back({{"axb-escape", "classical escape times for e^{2x} + E",
                  {{"energies", std::string("-1,0,0.5,1,2,4"), "energies E"},
                   {"x0", 0.0, "starting point"}}},
                 axb_escape});
    e.push_back({{"axb-deficiency", "end classification of (d/dx)^2 + e^{2x}",
                  {{"imag_parts", std::string("1,-1"), "z = i v for each v"},
                   {"x_range", 20.0, "integration range X"},
                   {"x_range_refined", 25.0, "refined range"},
                   {"rel_tol", 1e-10, "ODE tolerance"},
                   {"rel_tol_refined", 1e-12, "refined ODE tolerance"},
                   {"decay_tol", 1e-6, "mass stability tolerance"}}},
                 axb_deficiency});
    e.push_back({{"axb-nogo", "invariance violation versus form degeneracy for graph subspaces",
                  {{"b_samples", std::string("0.5,1,2"), "semigroup parameters b"},
                   {"grid_points", 128.0, "x-grid size"},
                   {"positive_threshold", 0.1, "nondegeneracy threshold"},
                   {"violation_threshold", 0.05, "violation threshold"}}},
                 axb_nogo});
    return e;
  }();
  return entries;
}

const Entry& entry(const std::string& name) {
  for (const auto& e : registry()) {
    if (e.info.name == name) return e;
  }
  throw ConfigError("unknown scenario '" + name + "'");
}

}  // namespace

const std::vector<ScenarioInfo>& scenarios() {
  static const std::vector<ScenarioInfo> infos = [] {
    std::vector<ScenarioInfo> out;
    for (const auto& e : registry()) out.push_back(e.info);
    return out;
  }();
  return infos;
}

const ScenarioInfo& scenario_info(const std::string& name) { return entry(name).info; }

ScenarioConfig validate(const ScenarioConfig& config) {
  const auto& info = scenario_info(config.scenario);
  ScenarioConfig out = config;
  out.parameters.clear();
  for (const auto& [name, value] : config.parameters) {
    const auto it = std::find_if(info.schema.begin(), info.schema.end(),
                                 [&](const ParamSpec& p) { return p.name == name; });
    if (it == info.schema.end()) {
      throw ConfigError("scenario '" + config.scenario + "' has no parameter '" + name + "'");
    }
    if (std::holds_alternative<double>(it->default_value)) {
      if (const auto* s = std::get_if<std::string>(&value)) {
        const auto v = parse_double(*s);
        if (!v) throw ConfigError("parameter '" + name + "' must be a number, got '" + *s + "'");
        out.parameters[name] = *v;
      } else {
        out.parameters[name] = value;
      }
    } else {
      if (const auto* d = std::get_if<double>(&value)) {
        out.parameters[name] = format_number(*d);
      } else {
        out.parameters[name] = value;
      }
    }
  }
  for (const auto& p : info.schema) out.parameters.emplace(p.name, p.default_value);
  return out;
}

Report run(const ScenarioConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const ScenarioConfig full = validate(config);
  Report report;
  report.scenario = full.scenario;
  report.parameters = full.parameters;
  report.seed = full.seed;
  report.tool_version = REFLECTLAB_VERSION;
  Context ctx(full, report);
  try {
    entry(full.scenario).body(ctx);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ScenarioError(full.scenario + ": " + e.what());
  }
  report.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace reflectlab::cli
