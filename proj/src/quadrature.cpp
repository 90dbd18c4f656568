#include "reflectlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "reflectlab/errors.hpp"

namespace reflectlab {

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre_unit(int order) {
  static std::mutex mutex;
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  if (order < 1) throw DomainError("Gauss-Legendre order must be positive");
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;

  const int n = order;
  std::vector<double> x(n), w(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
  return cache.emplace(order, std::make_pair(std::move(x), std::move(w))).first->second;
}

QuadratureRule QuadratureRule::gauss_legendre(int order, double lo, double hi) {
  return composite({lo, hi}, order);
}

QuadratureRule QuadratureRule::composite(std::vector<double> breakpoints, int order) {
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end(),
                                [](double u, double v) { return std::abs(u - v) < 1e-15; }),
                    breakpoints.end());
  if (breakpoints.size() < 2) throw DomainError("quadrature needs a non-empty interval");
  const auto& [t, wt] = gauss_legendre_unit(order);
  QuadratureRule rule;
  rule.lo = breakpoints.front();
  rule.hi = breakpoints.back();
  for (std::size_t p = 0; p + 1 < breakpoints.size(); ++p) {
    const double a = breakpoints[p], b = breakpoints[p + 1];
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::size_t k = 0; k < t.size(); ++k) {
      rule.nodes.push_back(mid + half * t[k]);
      rule.weights.push_back(half * wt[k]);
    }
  }
  return rule;
}

QuadratureRule QuadratureRule::transported(const sl2::GroupElement& g) const {
  const double d_lo = g.a() + g.b() * lo, d_hi = g.a() + g.b() * hi;
  if (!(d_lo * d_hi > 0)) throw PoleError("transport pole inside the quadrature interval");
  QuadratureRule out;
  out.nodes.resize(nodes.size());
  out.weights.resize(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const double den = g.a() + g.b() * nodes[k];
    out.nodes[k] = (g.c() + g.d() * nodes[k]) / den;
    out.weights[k] = weights[k] / (den * den);
  }
  out.lo = sl2::point_action(g, lo);
  out.hi = sl2::point_action(g, hi);
  return out;
}

}  // namespace reflectlab
