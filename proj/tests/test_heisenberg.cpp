#include <cmath>
#include <complex>
#include <filesystem>
#include <random>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <doctest.h>

#include "reflectlab/errors.hpp"
#include "reflectlab/heisenberg.hpp"

using namespace reflectlab;
using namespace reflectlab::heis;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

constexpr double kPi = 3.14159265358979323846;

double f_bessel(double r) { return 2 * kPi * boost::math::cyl_bessel_k(0, r); }

// K0(r) = int_0^inf exp(-r cosh u) du
double f_cosh(double r) {
  boost::math::quadrature::exp_sinh<double> es;
  return 2 * kPi * es.integrate([r](double u) { return std::exp(-r * std::cosh(u)); });
}

HeisenbergElement random_element(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2, 2);
  return HeisenbergElement::scalar(u(rng), u(rng), u(rng));
}

const SubLaplacianKernel& table() {
  static const SubLaplacianKernel k = SubLaplacianKernel::build();
  return k;
}

HeisenbergTestFunction one_term(double yc, double yw) {
  TestTerm t;
  t.coeff = {0.7, -0.4};
  t.x = {0.2, 0.5};
  t.y = {yc, yw};
  t.c = {0.1, 0.6};
  t.omega = 0.8;
  return {{t}};
}

}  // namespace

TEST_CASE("group law") {
  std::mt19937_64 rng(1);
  const HeisenbergElement e = HeisenbergElement::scalar(0, 0, 0);
  for (int k = 0; k < 100; ++k) {
    const auto g = random_element(rng), h = random_element(rng), j = random_element(rng);
    CHECK(((g * h) * j).distance(g * (h * j)) <= 1e-12);
    CHECK((g * g.inverse()).distance(e) <= 1e-12);
    CHECK((g * e).distance(g) == 0.0);
    CHECK(tau(g * h).distance(tau(g) * tau(h)) <= 1e-12);
    CHECK(tau(tau(g)).distance(g) == 0.0);
  }
  const auto p = HeisenbergElement::scalar(1, 2, 3) * HeisenbergElement::scalar(4, 5, 6);
  CHECK(p.a[0] == 5);
  CHECK(p.b[0] == 7);
  CHECK(p.c == 3 + 6 + 1 * 5);
  CHECK_THROWS_AS(HeisenbergElement({1, 2}, {3, 4}, 0) * HeisenbergElement::scalar(1, 1, 1), DomainError);
}

TEST_CASE("Schroedinger model on a periodic grid") {
  const PeriodicGrid grid{64, -4.0, 0.125};
  const double hbar = 1.0, b0 = 2 * kPi / grid.length();
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  VectorXcd f(grid.count);
  for (int k = 0; k < grid.count; ++k) f(k) = {n(rng), n(rng)};

  const auto g = HeisenbergElement::scalar(3 * grid.step, 2 * b0, 0.4);
  const auto h = HeisenbergElement::scalar(-5 * grid.step, b0, -1.1);
  const VectorXcd gh = pi_hbar(g * h, hbar, f, grid);
  CHECK((pi_hbar(g, hbar, pi_hbar(h, hbar, f, grid), grid) - gh).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(pi_hbar(g, hbar, f, grid).norm() == doctest::Approx(f.norm()).epsilon(1e-13));
  const VectorXcd id = pi_hbar(HeisenbergElement::scalar(0, 0, 0), hbar, f, grid);
  CHECK((id - f).cwiseAbs().maxCoeff() == 0.0);
  const VectorXcd central = pi_hbar(HeisenbergElement::scalar(0, 0, 0.3), hbar, f, grid);
  CHECK((central - std::exp(cd(0, 0.3)) * f).cwiseAbs().maxCoeff() <= 1e-14);

  CHECK_THROWS_AS(pi_hbar(HeisenbergElement::scalar(0.3 * grid.step, 0, 0), hbar, f, grid), GridError);
  CHECK_THROWS_AS(pi_hbar(HeisenbergElement::scalar(0, 0.3 * b0, 0), hbar, f, grid), GridError);
  CHECK_THROWS_AS(pi_hbar(g, hbar, VectorXcd::Zero(3), grid), GridError);

  const auto fn = [](double x) { return cd(std::exp(-x * x), x); };
  const auto g1 = HeisenbergElement::scalar(0.5, 0.7, -0.2);
  for (double x : {-1.0, 0.0, 0.4}) {
    const cd expected = std::exp(cd(0, 2.0 * (-0.2 + 0.7 * x))) * fn(x + 0.5);
    CHECK(std::abs(pi_hbar_eval(g1, 2.0, fn, x) - expected) <= 1e-14);
  }
}

TEST_CASE("uncorrelate splits invariant subspaces") {
  PhaseModel model;
  model.hbar = 1.0;
  model.x = {0.0, 0.13, 0.27, 0.41, 0.52};
  const int k = model.size();

  MatrixXcd k0 = MatrixXcd::Zero(2 * k, 3);
  k0(0, 0) = 1.0;
  k0(2, 1) = 1.0;
  k0(k + 3, 2) = 1.0;
  MatrixXcd mix(3, 3);
  mix << 4, 1, cd(0, 1), 0.5, 5, 1, -1, cd(1, 1), 6;
  const auto res = uncorrelate(k0 * mix, model);
  CHECK(res.d_plus.cols() == 2);
  CHECK(res.d_minus.cols() == 1);
  CHECK(res.residual <= 1e-10);
  CHECK(std::abs(std::abs(res.d_minus(3, 0)) - 1.0) <= 1e-12);
  CHECK_FALSE(res.enlarged);

  MatrixXcd plus_only = MatrixXcd::Zero(2 * k, 1);
  plus_only(1, 0) = 1.0;
  const auto po = uncorrelate(plus_only, model);
  CHECK(po.d_plus.cols() == 1);
  CHECK(po.d_minus.cols() == 0);

  MatrixXcd graph = MatrixXcd::Zero(2 * k, 1);
  graph(0, 0) = 1.0;
  graph(k + 1, 0) = 0.5;
  CHECK_THROWS_AS(uncorrelate(graph, model), HypothesisError);
  UncorrelateOptions grow;
  grow.enlarge = true;
  const auto hull = uncorrelate(graph, model, grow);
  CHECK(hull.enlarged);
  CHECK(hull.d_plus.cols() == 1);
  CHECK(hull.d_minus.cols() == 1);
  CHECK(hull.residual <= 1e-10);

  CHECK_THROWS_AS(uncorrelate(MatrixXcd::Zero(3, 1), model), DomainError);
}

TEST_CASE("pd_form") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<HeisenbergElement> pts;
  std::vector<double> w;
  std::vector<cd> f;
  for (int k = 0; k < 30; ++k) {
    pts.push_back(random_element(rng));
    w.push_back(0.5 + 0.5 * u(rng));
    f.push_back({u(rng), u(rng)});
  }
  cd sum = 0;
  for (int k = 0; k < 30; ++k) sum += w[k] * f[k];
  const double ones = pd_form([](const HeisenbergElement&) { return cd(1, 0); }, pts, w, f);
  CHECK(ones == doctest::Approx(std::norm(sum)).epsilon(1e-12));
  const double gauss = pd_form(
      [](const HeisenbergElement& g) { return cd(std::exp(-(g.a[0] * g.a[0] + g.b[0] * g.b[0]) / 0.02), 0); },
      pts, w, f);
  CHECK(gauss >= 0.0);
  CHECK_THROWS_AS(pd_form([](const HeisenbergElement&) { return cd(1, 0); }, pts, std::vector<double>{1.0}, f),
                  DomainError);
}

TEST_CASE("F quadrature against Bessel K0") {
  for (double r : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 8.0, 12.0}) {
    const double got = sublaplacian_F_quadrature(r);
    CHECK(std::abs(got - f_bessel(r)) <= 1e-12);
    CHECK(got == doctest::Approx(f_bessel(r)).epsilon(1e-9));
    CHECK(f_cosh(r) == doctest::Approx(f_bessel(r)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(sublaplacian_F_quadrature(0.0), DomainError);
}

TEST_CASE("F table") {
  const auto& k = table();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> t(std::log(1e-3), std::log(12.0));
  double worst = 0;
  for (int i = 0; i < 500; ++i) {
    const double r = std::exp(t(rng));
    worst = std::max(worst, std::abs(k(r) - f_bessel(r)) / f_bessel(r));
  }
  CHECK(worst <= 1e-7);
  CHECK(k.interpolate_exact(2.0) == doctest::Approx(f_bessel(2.0)).epsilon(1e-8));
  CHECK(k(0.3, 0.4) == k(0.5));
  CHECK(k(0.3, -0.4) == k(0.3, 0.4));
  CHECK(k(13.0) == 0.0);
  CHECK_THROWS_AS(k(1e-4), DomainError);

  const auto dir = std::filesystem::temp_directory_path() / "reflectlab_ftable_test";
  std::filesystem::remove_all(dir);
  const auto first = SubLaplacianKernel::load_or_build({}, dir.string());
  CHECK(std::filesystem::exists(dir / (FTableSpec{}.key() + ".bin")));
  const auto second = SubLaplacianKernel::load_or_build({}, dir.string());
  for (double r : {0.002, 0.7, 3.3, 11.0}) {
    CHECK(first(r) == k(r));
    CHECK(second(r) == k(r));
  }
  FTableSpec other;
  other.r_max = 8.0;
  CHECK(other.key() != FTableSpec{}.key());
  CHECK_THROWS_AS(SubLaplacianKernel::load((dir / (FTableSpec{}.key() + ".bin")).string(), other), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("mollified kernel") {
  const double eps = 0.5;
  const MollifiedKernel mk(eps, 3.0, 256);
  const double at_zero = kPi * std::exp(eps * eps / 2) * boost::math::expint(1, eps * eps / 2);
  CHECK(mk(0.0) == doctest::Approx(at_zero).epsilon(1e-8));
  CHECK(mk(2.5) == doctest::Approx(f_bessel(2.5)).epsilon(0.05));
  CHECK(mk(1.0) < mk(0.5));
}

TEST_CASE("reflection positivity forms") {
  const HeisenbergTestFunction empty;
  CHECK(rp_form_direct(empty, table()) == 0.0);
  CHECK(rp_form_reduced(empty) == 0.0);
  CHECK_THROWS_AS(rp_form_reduced(one_term(0.2, 0.3)), SupportError);
  CHECK_THROWS_AS(rp_form_direct(one_term(0.2, 0.3), table()), SupportError);

  const auto f = one_term(0.9, 0.4);
  const double reduced = rp_form_reduced(f);
  CHECK(reduced > 0.0);
  CHECK(rp_form_direct(f, table(), 20) == doctest::Approx(reduced).epsilon(1e-4));

  auto scaled = f;
  scaled.terms[0].coeff *= cd(0, 2);
  CHECK(rp_form_reduced(scaled) == doctest::Approx(4 * reduced).epsilon(1e-10));
  const cd peak = f.terms[0].coeff * std::exp(-3.0) * std::exp(cd(0, 0.8 * 0.2));
  CHECK(std::abs(f(0.2, 0.9, 0.1) - peak) <= 1e-15);
}

TEST_CASE("Hardy space pairing is indefinite") {
  const Symbol one = [](double) { return cd(1, 0); };
  CHECK(hardy_positivity_probe(one, one, 100, 16, 1) < 0.0);
  CHECK(hardy_positivity_probe(one, one, 100, 16, 1, true) == 0.0);
  CHECK(hardy_positivity_probe(one, one, 100, 16, 9) == hardy_positivity_probe(one, one, 100, 16, 9));
  CHECK_THROWS_AS(hardy_positivity_probe(one, one, 0, 16, 1), DomainError);
}
