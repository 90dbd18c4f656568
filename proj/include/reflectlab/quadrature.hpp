#pragma once

#include <span>
#include <vector>

#include "reflectlab/sl2core.hpp"

namespace reflectlab {

/// Nodes strictly inside (lo, hi) in increasing order with positive weights.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  double lo = 0, hi = 0;

  std::size_t size() const { return nodes.size(); }

  static QuadratureRule gauss_legendre(int order, double lo, double hi);
  /// Gauss-Legendre of the given order on each panel between consecutive
  /// breakpoints (sorted and deduplicated).
  static QuadratureRule composite(std::vector<double> breakpoints, int order);

  /// Pushforward under the Moebius action of g: nodes g.u, weights
  /// w / (a + b u)^2. Throws PoleError if the pole meets [lo, hi].
  QuadratureRule transported(const sl2::GroupElement& g) const;

  template <class F>
  auto integrate(F&& f) const {
    decltype(f(0.0) * 1.0) sum{};
    for (std::size_t k = 0; k < nodes.size(); ++k) sum += weights[k] * f(nodes[k]);
    return sum;
  }
};

/// Gauss-Legendre nodes and weights on [-1, 1], cached per order.
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre_unit(int order);

}  // namespace reflectlab
