#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <doctest.h>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "reflectlab/errors.hpp"
#include "reflectlab/oskernel.hpp"
#include "reflectlab/quadrature.hpp"
#include "reflectlab/sl2core.hpp"

using namespace reflectlab;

TEST_CASE("kernel values") {
  CHECK(kernel_J(0, 0.7, 0.3) == 1.0);
  CHECK(kernel_J(0.5, 0.5, 0.5) == doctest::Approx(1.1547005383792515).epsilon(1e-14));
  CHECK_THROWS_AS(kernel_J(0.5, 2.0, 0.5), SingularityError);
  CHECK(kernel_A(0, 1, 0.3) == 1.0);
  CHECK(kernel_A(0, 0.25, 0.5) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(kernel_A(0.1, 0.1, 0.5), SingularityError);
}

TEST_CASE("Gauss-Legendre rules") {
  for (int order : {1, 2, 5, 16, 80}) {
    const auto rule = QuadratureRule::gauss_legendre(order, -0.3, 1.7);
    double sum = 0;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      sum += rule.weights[k];
      CHECK(rule.weights[k] > 0);
      CHECK(rule.nodes[k] > -0.3);
      CHECK(rule.nodes[k] < 1.7);
      if (k) CHECK(rule.nodes[k] > rule.nodes[k - 1]);
    }
    CHECK(std::abs(sum - 2.0) <= 1e-13);
    // exact for degree 2 order - 1
    const int deg = 2 * order - 1;
    const double exact = (std::pow(1.7, deg + 1) - std::pow(-0.3, deg + 1)) / (deg + 1);
    CHECK(rule.integrate([&](double x) { return std::pow(x, deg); }) ==
          doctest::Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("composite rules and Moebius transport") {
  const auto rule = QuadratureRule::composite({0.5, -0.5, 0.0, 0.5}, 20);
  CHECK(rule.size() == 40);
  CHECK(rule.integrate([](double x) { return std::exp(x); }) ==
        doctest::Approx(std::exp(0.5) - std::exp(-0.5)).epsilon(1e-14));

  const auto g = sl2::exp_lie(sl2::q(0.7, 0.3));
  const auto base = QuadratureRule::gauss_legendre(40, -0.5, 0.5);
  const auto moved = base.transported(g);
  const double lo = std::min(moved.lo, moved.hi), hi = std::max(moved.lo, moved.hi);
  const double oracle = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [](double x) { return std::cos(3 * x); }, lo, hi);
  CHECK(moved.integrate([](double x) { return std::cos(3 * x); }) ==
        doctest::Approx(oracle).epsilon(1e-12));
  CHECK_THROWS_AS(QuadratureRule::gauss_legendre(10, -1, 1).transported(sl2::GroupElement(1, 2, 0, 1)),
                  PoleError);
}

TEST_CASE("psd_report examples") {
  CHECK(psd_report(FormMatrix::from_real(Eigen::Matrix2d::Identity())).verdict == Verdict::PSD);
  Eigen::Matrix2d m;
  m << 1, 2, 2, 1;
  const auto r = psd_report(FormMatrix::from_real(m));
  CHECK(r.verdict == Verdict::Indefinite);
  CHECK(r.eig_min == doctest::Approx(-1.0));
  CHECK(r.eig_max == doctest::Approx(3.0));
  CHECK(psd_report(FormMatrix::from_real(Eigen::Matrix2d::Zero())).verdict == Verdict::Zero);
  Eigen::Matrix2d skew;
  skew << 1, 2, 2.1, 1;
  CHECK_THROWS_AS(FormMatrix::from_real(skew), DomainError);
}

TEST_CASE("Bergman kernel examples") {
  const std::vector<std::complex<double>> two = {0.0, 0.5};
  const auto g = bergman_gram(two, 1.0);
  CHECK(g.entries()(1, 1).real() == doctest::Approx(4.0 / 3.0));
  CHECK(g.entries()(0, 1).real() == doctest::Approx(1.0));
  CHECK(psd_report(g).verdict == Verdict::PSD);
  const auto ones = bergman_gram(two, 0.0);
  CHECK(ones.radical_dim() == 1);
  const std::vector<std::complex<double>> three = {0.0, 0.5, -0.5};
  CHECK(psd_report(bergman_gram(three, -2.0)).eig_min < 0);
}

TEST_CASE("Bergman positivity iff lambda >= 0 on random point sets") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 3 + trial % 6;
    std::vector<std::complex<double>> pts;
    for (int k = 0; k < n; ++k) pts.push_back(std::polar(0.9 * std::sqrt(u(rng)), 6.283185307179586 * u(rng)));
    for (double lambda : {0.0, 0.3, 1.0, 2.5}) {
      CHECK(psd_report(bergman_gram(pts, lambda)).verdict != Verdict::Indefinite);
    }
    for (double lambda : {-0.5, -1.0, -2.0}) {
      CHECK(psd_report(bergman_gram(pts, lambda)).verdict == Verdict::Indefinite);
    }
  }
}

TEST_CASE("gram_form on separable kernels") {
  const auto basis = BasisFunctionSet::equispaced(5, -0.6, 0.6, 0.2);
  const auto quad = basis.default_rule(40);
  const auto one = gram_form(basis, [](double, double) { return 1.0; }, quad);
  CHECK(one.radical_dim() == 4);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double mi = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double x) { return basis[i](x); }, basis[i].lo(), basis[i].hi());
    CHECK(one.entries()(i, i).real() == doctest::Approx(mi * mi).epsilon(1e-9));
  }
  const auto xy = gram_form(basis, [](double x, double y) { return x * y; }, quad);
  CHECK(xy.radical_dim() == 4);
  CHECK(xy.eig_max() > 0);
}

TEST_CASE("J-form is positive exactly on the complementary range") {
  const auto basis = BasisFunctionSet::equispaced();
  const auto quad = basis.default_rule(80);
  for (double s : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    const auto f = gram_form(basis, [s](double x, double y) { return kernel_J(x, y, s); }, quad);
    CHECK(f.eig_min() >= -1e-9 * f.eig_max());
  }
  // wider support, still inside [-0.95, 0.95]
  const auto wide = BasisFunctionSet::equispaced(8, -0.8, 0.8, 0.15);
  for (double s : {0.25, 0.75}) {
    const auto f = gram_form(wide, [s](double x, double y) { return kernel_J(x, y, s); },
                             wide.default_rule(80));
    CHECK(f.eig_min() >= -1e-9 * f.eig_max());
  }
  for (double s : {2.0, 3.0}) {
    const auto f = gram_form(basis, [s](double x, double y) { return kernel_J(x, y, s); }, quad);
    CHECK(f.eig_min() < -1e-6 * f.eig_max());
  }
}

TEST_CASE("gram_form converges under order doubling") {
  const auto basis = BasisFunctionSet::equispaced(6, -0.75, 0.75, 0.15);
  for (double s : {0.25, 0.5, 0.75}) {
    const auto k = [s](double x, double y) { return kernel_J(x, y, s); };
    const auto a = gram_form(basis, k, basis.default_rule(40));
    const auto b = gram_form(basis, k, basis.default_rule(80));
    CHECK((a.entries() - b.entries()).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("Cayley constants match the closed-form tables") {
  using F = CayleyFamily;
  for (int n = 1; n <= 12; ++n) {
    CHECK(cayley_R({F::SU_nn, n}) == (n % 2 ? n : 0));
    CHECK(cayley_R({F::SOstar_4n, n}) == n);
    CHECK(cayley_R({F::Sp_nR, n}) == (n % 2 ? 0.0 : n / 2.0));
    const int mod = n % 4;
    CHECK(cayley_R({F::SO_n2, n}) == (mod == 0 ? 0 : mod == 2 ? 2 : 1));
    CHECK(cayley_Lpos({F::SU_nn, n}) == n);
    CHECK(cayley_Lpos({F::SOstar_4n, n}) == 2 * n);
    CHECK(cayley_Lpos({F::Sp_nR, n}) == n);
    CHECK(cayley_Lpos({F::SO_n2, n}) == 2);
  }
  CHECK(cayley_R({F::E7, 0}) == 3);
  CHECK(cayley_Lpos({F::E7, 0}) == 3);
  CHECK(cayley_R({F::SU_nn, 3}) == 3);
  CHECK(cayley_R({F::Sp_nR, 3}) == 0);
  CHECK(cayley_Lpos({F::SU_nn, 4}) == 4);
  CHECK(cayley_Lpos({F::SOstar_4n, 2}) == 4);
  CHECK(cayley_Lpos({F::SO_n2, 5}) == 2);
  CHECK_THROWS_AS(cayley_R({F::SU_nn, 0}), DomainError);
  for (const auto& row : cayley_table(10)) CHECK(row.Lpos >= row.R);
  CHECK(cayley_table(8).size() == 33);
}

TEST_CASE("lpos_formula") {
  CHECK(lpos_formula(5.0, 1, 7) == 0.0);
  CHECK(lpos_formula(2.0, 3, 1) == -2.0);
  CHECK(lpos_formula(2.0, 3, 0) == 0.0);
  CHECK_FALSE(std::signbit(lpos_formula(2.0, 3, 0)));
  CHECK_THROWS_AS(lpos_formula(1.0, 0, 1), DomainError);
}
