#include "splitsea/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace splitsea {

namespace {

// Nodes/weights on [-1, 1]; Newton iteration on P_n from the Chebyshev guess.
QuadratureRule reference_gauss_legendre(std::size_t n) {
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / static_cast<double>(j);
      }
      dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16)
        break;
    }
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

const QuadratureRule &cached_reference(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end())
    it = cache.emplace(n, reference_gauss_legendre(n)).first;
  return it->second;
}

} // namespace

QuadratureRule gauss_legendre(std::size_t n, double a, double b) {
  if (n == 0)
    throw std::invalid_argument("gauss_legendre: n must be positive");
  const QuadratureRule &ref = cached_reference(n);
  QuadratureRule rule = ref;
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (std::size_t i = 0; i < n; ++i) {
    rule.nodes[i] = mid + half * ref.nodes[i];
    rule.weights[i] = half * ref.weights[i];
  }
  return rule;
}

QuadratureRule clenshaw_curtis(std::size_t n, double a, double b) {
  if (n < 2)
    throw std::invalid_argument("clenshaw_curtis: n must be at least 2");
  const std::size_t N = n - 1;
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.assign(n, 0.0);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (std::size_t k = 0; k <= N; ++k) {
    const double t = std::numbers::pi * static_cast<double>(k) / static_cast<double>(N);
    rule.nodes[k] = mid - half * std::cos(t);
    double w = 1.0;
    for (std::size_t j = 1; j <= N / 2; ++j) {
      const double bj = (2 * j == N) ? 1.0 : 2.0;
      w -= bj * std::cos(2.0 * j * t) / (4.0 * j * j - 1.0);
    }
    const double ck = (k == 0 || k == N) ? 1.0 : 2.0;
    rule.weights[k] = half * ck * w / static_cast<double>(N);
  }
  return rule;
}

QuadratureRule composite_gauss_legendre(double a, double b, std::size_t panels,
                                        std::size_t order) {
  QuadratureRule rule;
  rule.nodes.reserve(panels * order);
  rule.weights.reserve(panels * order);
  const double h = (b - a) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + h * static_cast<double>(p);
    const QuadratureRule piece = gauss_legendre(order, lo, lo + h);
    rule.nodes.insert(rule.nodes.end(), piece.nodes.begin(), piece.nodes.end());
    rule.weights.insert(rule.weights.end(), piece.weights.begin(), piece.weights.end());
  }
  return rule;
}

} // namespace splitsea
