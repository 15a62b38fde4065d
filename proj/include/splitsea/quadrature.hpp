#pragma once

#include <cstddef>
#include <vector>

namespace splitsea {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }
};

/// n-point Gauss-Legendre rule mapped to [a, b].
QuadratureRule gauss_legendre(std::size_t n, double a = -1.0, double b = 1.0);

/// n-point Clenshaw-Curtis rule (n >= 2) mapped to [a, b].
QuadratureRule clenshaw_curtis(std::size_t n, double a = -1.0, double b = 1.0);

/// `panels` equal panels on [a, b], each with an `order`-point Gauss-Legendre
/// rule.
QuadratureRule composite_gauss_legendre(double a, double b, std::size_t panels,
                                        std::size_t order);

} // namespace splitsea
