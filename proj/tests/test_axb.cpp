#include <cmath>
#include <complex>
#include <random>
#include <set>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <doctest.h>

#include "reflectlab/axb.hpp"
#include "reflectlab/errors.hpp"

using namespace reflectlab;
using namespace reflectlab::axb;

namespace {

constexpr double kPi = 3.14159265358979323846;

// int_{x0}^inf dx / sqrt(E + e^{2x}) by exp-sinh on the shifted half line
double escape_oracle(double e, double x0) {
  boost::math::quadrature::exp_sinh<double> es;
  return es.integrate([&](double u) { return 1.0 / std::sqrt(e + std::exp(2 * (x0 + u))); });
}

}  // namespace

TEST_CASE("(ax+b) group law") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int k = 0; k < 100; ++k) {
    const AxbElement g{u(rng), u(rng)}, h{u(rng), u(rng)};
    const Eigen::Matrix2d gh = (g * h).matrix();
    CHECK((gh - g.matrix() * h.matrix()).cwiseAbs().maxCoeff() <= 1e-12);
    const AxbElement e = g * g.inverse();
    CHECK(std::abs(e.s) + std::abs(e.b) <= 1e-12);
    const AxbElement t1 = tau(g * h), t2 = tau(g) * tau(h);
    CHECK(std::abs(t1.s - t2.s) + std::abs(t1.b - t2.b) <= 1e-12);

    const auto f = [](double x) { return std::complex<double>(std::exp(-x * x), 0.5 * x); };
    for (int sign : {1, -1}) {
      for (double x : {-1.0, 0.3}) {
        const auto inner = [&](double y) { return pi_pm(h, sign, f, y); };
        CHECK(std::abs(pi_pm(g, sign, inner, x) - pi_pm(g * h, sign, f, x)) <= 1e-12);
      }
    }
  }
  const auto f = [](double x) { return cd(x, 0); };
  CHECK(std::abs(pi_pm({0.5, 2.0}, -1, f, 0.0) - std::exp(cd(0, -2.0)) * 0.5) <= 1e-15);
}

TEST_CASE("projection fields from mu") {
  const Mat2c j = reflection_j();
  CHECK((j * j - Mat2c::Identity()).cwiseAbs().maxCoeff() == 0.0);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> re(0, 5), im(-5, 5);
  for (int k = 0; k < 1000; ++k) {
    const cd mu(re(rng), im(rng));
    const Mat2c q = q_from_mu(mu);
    const auto r = qfield_residuals(q);
    CHECK(r.idempotent <= 1e-14);
    CHECK(r.hermitian == 0.0);
    CHECK(r.qfield <= 1e-14);
    CHECK(r.trace_qjq == doctest::Approx(2 * mu.real() / (1 + std::norm(mu))).epsilon(1e-12));
    CHECK(r.trace_qjq >= 0.0);
    CHECK(std::abs(r.det_qjq) <= 1e-14);
    const Mat2c qjq = q * j * q;
    CHECK(std::abs(qjq.trace().real() - r.trace_qjq) <= 1e-14);
  }
  const Mat2c q1 = q_from_mu(1.0);
  CHECK(std::abs(q1(0, 1) - 0.5) <= 1e-16);
  CHECK_THROWS_AS(q_from_mu({-0.1, 0}), DomainError);
  for (auto d : {DegenerateCase::Zero, DegenerateCase::Plus, DegenerateCase::Minus}) {
    const Mat2c q = q_degenerate(d);
    CHECK((q * j * q).cwiseAbs().maxCoeff() == 0.0);
    CHECK(qfield_residuals(q).idempotent == 0.0);
  }
  CHECK(q_degenerate(DegenerateCase::Plus)(0, 0) == 1.0);
  CHECK(q_degenerate(DegenerateCase::Minus)(1, 1) == 1.0);

  const auto xi = ProjectionField::uniform_grid();
  CHECK(xi.size() == 256);
  CHECK(xi.front() == -20.0);
  const auto field = ProjectionField::from_mu(xi, [](double x) { return cd(std::exp(-x * x), x); });
  CHECK(field.q.size() == xi.size());
  CHECK(field.max_identity_residual() <= 1e-13);
}

TEST_CASE("graph J-form") {
  const std::vector<double> w = {1, 1, 1};
  const std::vector<cd> f = {1, 1, 1};
  CHECK(graph_jform(std::vector<cd>{1, cd(0, 1), -1}, f, w) == 0.0);
  CHECK(graph_jform(std::vector<cd>{2}, std::vector<cd>{3}, std::vector<double>{0.5}) == 18.0);
  CHECK(graph_jform(std::vector<cd>{cd(0, 1), cd(0, -2)}, std::vector<cd>{1, 2}, std::vector<double>{1, 1}) == 0.0);
}

TEST_CASE("escape times") {
  for (double e : {0.5, 1.0, 2.0, 4.0}) {
    for (double x0 : {0.0, -1.0, 1.5}) {
      const auto r = escape_time(e, x0, Direction::PlusInfinity);
      CHECK_FALSE(r.diverges);
      CHECK(r.value == doctest::Approx(escape_oracle(e, x0)).epsilon(1e-10));
      CHECK(r.value == doctest::Approx(std::asinh(std::sqrt(e) * std::exp(-x0)) / std::sqrt(e)).epsilon(1e-10));
    }
    const auto m = escape_time(e, 0.0, Direction::MinusInfinity);
    CHECK(m.diverges);
    CHECK(m.slope == doctest::Approx(1 / std::sqrt(e)).epsilon(1e-3));
    CHECK(m.cutoffs.size() == m.partials.size());
  }
  CHECK(escape_time(0.0, 0.3, Direction::PlusInfinity).value == doctest::Approx(std::exp(-0.3)).epsilon(1e-10));
  for (double e : {-1.0, -4.0}) {
    const auto r = escape_time(e, 0.0, Direction::PlusInfinity);
    CHECK(r.start == doctest::Approx(0.5 * std::log(-e)));
    CHECK(r.value == doctest::Approx(kPi / (2 * std::sqrt(-e))).epsilon(1e-8));
  }
  CHECK_THROWS_AS(escape_time(-1.0, 0.0, Direction::MinusInfinity), DomainError);
  const std::vector<double> two = {10, 20};
  CHECK_THROWS_AS(escape_time(1.0, 0.0, Direction::PlusInfinity, two), DomainError);
}

// With t = e^x the equation becomes Bessel's of order nu = sqrt(z): near
// -infinity only J_nu(e^x) ~ e^{nu x} is square integrable, while at
// +infinity every solution decays like e^{-x/2}. Hence exactly one solution
// on the whole line.
TEST_CASE("deficiency probe") {
  for (cd z : {cd(0, 1), cd(0, -1), cd(1, 1)}) {
    const auto r = deficiency_probe(z);
    CHECK(r.plus.classification == EndClass::LimitCircle);
    CHECK(r.plus.l2_count == 2);
    CHECK(r.minus.classification == EndClass::LimitPoint);
    CHECK(r.minus.l2_count == 1);
    CHECK(r.count_l2 == 1);
  }
  DeficiencyOptions longer;
  longer.x_range = 25;
  const auto r = deficiency_probe(cd(0, 1), longer);
  CHECK(r.plus.classification == EndClass::LimitCircle);
  CHECK(r.minus.classification == EndClass::LimitPoint);

  DeficiencyOptions control;
  control.control = true;
  const auto c = deficiency_probe(cd(0, 1), control);
  CHECK(c.plus.l2_count == 1);
  CHECK(c.minus.l2_count == 1);
  CHECK(c.count_l2 == 0);
  CHECK(c.plus.classification == EndClass::LimitPoint);

  DeficiencyOptions starved;
  starved.max_steps = 10;
  CHECK_THROWS_AS(deficiency_probe(cd(0, 1), starved), StiffnessError);
  CHECK(to_string(EndClass::LimitCircle) != to_string(EndClass::LimitPoint));
}

TEST_CASE("graph invariance under the (ax+b) motions") {
  const std::vector<double> bs = {0.5, 1.0, 2.0};
  const auto zero = [](double) { return cd(0, 0); };
  const auto one = [](double) { return cd(1, 0); };
  CHECK(invariance_probe(zero, bs) <= 1e-12);
  CHECK(invariance_probe(one, bs) > 0.5);
  for (double v : normalized_graph_form(one)) CHECK(v == doctest::Approx(1.0));
  for (double v : normalized_graph_form([](double xi) { return cd(0, std::tanh(xi)); })) CHECK(std::abs(v) <= 1e-15);
  for (double v : normalized_graph_form(zero)) CHECK(v == 0.0);
  const XGrid g;
  CHECK(g.x(0) == g.lo);
  CHECK(g.frequency(0) == 0.0);
  CHECK(g.frequency(1) == doctest::Approx(2 * kPi / (g.hi - g.lo)));
  CHECK(g.frequency(g.count - 1) == doctest::Approx(-g.frequency(1)));
}

TEST_CASE("no-go harness") {
  const std::vector<double> bs = {0.5, 1.0, 2.0};
  const auto rows = nogo_harness(default_nogo_family(), bs);
  CHECK(rows.size() == default_nogo_family().size());
  for (const auto& r : rows) {
    CHECK(r.consistent);
    CHECK(r.form_min <= r.form_max);
    if (r.name == "zero") {
      CHECK_FALSE(r.nondegenerate);
      CHECK(r.violation <= 1e-12);
    }
    if (r.name == "one") CHECK(r.nondegenerate);
  }
  std::vector<NoGoMember> fam = {{"half", [](double) { return cd(0.5, 0); }}};
  const auto half = nogo_harness(fam, bs);
  CHECK(half[0].form_max == doctest::Approx(0.8));
  CHECK(half[0].nondegenerate);
  CHECK(half[0].violation > 0.05);
}

TEST_CASE("invariant cones") {
  const auto cones = invariant_cones();
  CHECK(cones.size() >= 2);
  std::set<std::string> names;
  for (const auto& c : cones) {
    names.insert(c.name);
    CHECK_FALSE(c.description.empty());
  }
  CHECK(names.size() == cones.size());
}
