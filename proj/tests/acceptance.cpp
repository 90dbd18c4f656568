// Acceptance criteria runner: one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "reflectlab/errors.hpp"
#include "reflectlab/oskernel.hpp"
#include "reflectlab/parallel.hpp"
#include "reflectlab/report.hpp"
#include "reflectlab/scenarios.hpp"
#include "reflectlab/sl2series.hpp"

using namespace reflectlab;
using namespace reflectlab::cli;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Report run_default(const std::string& name, double* secs = nullptr) {
  ScenarioConfig c;
  c.scenario = name;
  const auto t0 = Clock::now();
  Report r = run(c);
  if (secs) *secs = seconds_since(t0);
  return r;
}

double metric(const Report& r, const std::string& key) { return r.metrics.at(key); }
bool verdict(const Report& r, const std::string& key) { return r.verdicts.at(key); }

Outcome kernel_positivity() {
  const auto t0 = Clock::now();
  const auto basis = BasisFunctionSet::equispaced(12, -0.8, 0.8, 0.15);
  const auto quad = basis.default_rule(80);
  bool ok = true;
  double worst = 1;
  for (double s : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    const auto f = series::jform(s, basis, quad);
    worst = std::min(worst, f.eig_min() / f.eig_max());
    ok = ok && f.eig_min() >= -1e-9 * f.eig_max();
  }
  const auto f3 = series::jform(3.0, basis, quad);
  const double r3 = f3.eig_min() / f3.eig_max();
  ok = ok && f3.eig_min() < -1e-6 * f3.eig_max();
  const double t = seconds_since(t0);
  return {ok && t < 5.0, fmt("min ratio %.3g on (0,1)", worst) + fmt(", s=3 ratio %.3g", r3) +
                             fmt(", %.2f s", t)};
}

Outcome contraction() {
  double t = 0;
  const Report r = run_default("sl2-contraction", &t);
  const double worst = metric(r, "max_gamma_norm"), witness = metric(r, "witness_gamma_norm");
  return {worst <= 1 + 1e-6 && witness >= 0.99 && t < 10.0,
          fmt("max gamma_norm %.6f", worst) + fmt(", witness %.6f", witness) + fmt(", %.2f s", t)};
}

Outcome dual_spectrum() {
  double t = 0;
  const Report r = run_default("sl2-dual-spectrum", &t);
  const double top = metric(r, "max_eigenvalue"), gap = metric(r, "max_consistency_gap");
  return {top <= 1e-6 && gap <= 1e-4 && t < 10.0,
          fmt("max eigenvalue %.3g", top) + fmt(", consistency gap %.3g", gap) + fmt(", %.2f s", t)};
}

const Report& identities() {
  static const Report r = run_default("sl2-identities");
  return r;
}

Outcome semigroup_law() {
  const double law = metric(identities(), "semigroup_law_residual");
  return {law <= 1e-6, fmt("residual %.3g over 10 pairs", law)};
}

Outcome exact_identities() {
  const double th = metric(identities(), "tanh_residual");
  const double k = metric(identities(), "kernel_identity_residual");
  return {th <= 1e-12 && k <= 1e-12, fmt("tanh residual %.3g", th) + fmt(", kernel residual %.3g", k)};
}

// R and the highest weight threshold as listed for the Cayley-type spaces.
struct Expected {
  double r, lpos;
};
Expected listed_row(CayleyFamily f, int n) {
  switch (f) {
    case CayleyFamily::SU_nn: return {n % 2 == 1 ? double(n) : 0.0, double(n)};
    case CayleyFamily::SOstar_4n: return {double(n), 2.0 * n};
    case CayleyFamily::Sp_nR: return {n % 2 == 0 ? n / 2.0 : 0.0, double(n)};
    case CayleyFamily::SO_n2: return {n % 4 == 0 ? 0.0 : n % 4 == 2 ? 2.0 : 1.0, 2.0};
    case CayleyFamily::E7: return {3.0, 3.0};
  }
  return {};
}

Outcome cayley() {
  const auto rows = cayley_table(12);
  int mismatches = 0, order = 0;
  for (const auto& row : rows) {
    const Expected e = listed_row(row.space.family, row.space.n);
    if (row.R != e.r || row.Lpos != e.lpos) ++mismatches;
    if (row.Lpos < row.R) ++order;
  }
  const bool complete = rows.size() == 4 * 12 + 1;
  return {mismatches == 0 && order == 0 && complete,
          std::to_string(rows.size()) + " rows, " + std::to_string(mismatches) + " mismatches, " +
              std::to_string(order) + " with Lpos < R"};
}

Outcome phillips() {
  const Report r = run_default("phillips");
  const bool ok = verdict(r, "jform_psd") && verdict(r, "quotient_dim_equals_fixed_points") &&
                  verdict(r, "fixed_point_free_quotient_zero");
  return {ok, fmt("50 spaces, %.0f fixed-point-free", metric(r, "fixed_point_free_cases"))};
}

Outcome heisenberg_rp() {
  double t = 0;
  const Report r = run_default("heisenberg-rp", &t);
  const double lo = metric(r, "min_reduced"), rel = metric(r, "max_relative_difference");
  return {lo >= 0 && rel <= 1e-4 && t < 30.0,
          fmt("min reduced %.3g", lo) + fmt(", max relative difference %.3g", rel) +
              fmt(", %.2f s", t)};
}

Outcome uncorrelated() {
  const Report r = run_default("heisenberg-uncorrelate");
  const double res = metric(r, "max_residual");
  return {res <= 1e-8, fmt("max residual %.3g on 20 models", res)};
}

Outcome axb() {
  const Report q = run_default("axb-qfield");
  const Report e = run_default("axb-escape");
  const Report d = run_default("axb-deficiency");
  const Report n = run_default("axb-nogo");
  const bool qf = verdict(q, "qfield_identities") && verdict(q, "trace_formula") && verdict(q, "det_zero");
  const double e0 = std::abs(metric(e, "E0.t_plus") - 1.0);
  const bool esc = e0 <= 1e-8 && verdict(e, "minus_diverges") && verdict(e, "minus_slope");
  const bool def = verdict(d, "plus_limit_circle") && verdict(d, "minus_limit_point") &&
                   verdict(d, "stable_under_refinement");
  const bool nogo = verdict(n, "dichotomy") && metric(n, "members") == 5;
  return {qf && esc && def && nogo, std::string("qfield ") + (qf ? "ok" : "FAIL") +
                                        fmt(", |T(E=0) - 1| %.3g", e0) + ", escape " +
                                        (esc ? "ok" : "FAIL") + ", deficiency " +
                                        (def ? "ok" : "FAIL") + ", no-go " + (nogo ? "ok" : "FAIL")};
}

std::string full_text(const Report& r) {
  std::string s = serialize(r, EmitFormat::Json) + serialize(r, EmitFormat::CsvSummary);
  for (const auto& t : r.tables) {
    for (const auto& h : t.header) s += h + ",";
    for (const auto& row : t.rows) {
      for (const auto& v : row) s += v + ",";
    }
  }
  return s;
}

Outcome determinism() {
  int differing = 0;
  std::string names;
  for (const auto& info : scenarios()) {
    ScenarioConfig c;
    c.scenario = info.name;
    set_thread_count(1);
    const std::string a = full_text(run(c));
    set_thread_count(4);
    const std::string b = full_text(run(c));
    const std::string again = full_text(run(c));
    if (a != b || b != again) {
      ++differing;
      names += " " + info.name;
    }
  }
  set_thread_count(0);
  return {differing == 0, std::to_string(scenarios().size()) + " scenarios at 1 and 4 threads, " +
                              std::to_string(differing) + " differ" + names};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"C1 kernel positivity", kernel_positivity},
      {"C2 contraction", contraction},
      {"C3 dual generator non-positivity", dual_spectrum},
      {"C4 semigroup law", semigroup_law},
      {"C5 exact identities", exact_identities},
      {"C6 Cayley tables", cayley},
      {"C7 Phillips construction", phillips},
      {"C8 Heisenberg reflection positivity", heisenberg_rp},
      {"C9 uncorrelated splitting", uncorrelated},
      {"C10 (ax+b) group", axb},
      {"C11 determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
