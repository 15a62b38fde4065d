#pragma once

// Exact finite-theta correlation kernel and its bulk/edge predictions.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "splitsea/potential.hpp"
#include "splitsea/site.hpp"

namespace splitsea {

/// Laurent coefficients J_{-N..N} of F(z) = exp(theta sum_r gamma_r (z^r - z^-r))
/// on the unit circle.
class CoefficientBand {
public:
  /// Throws BandTooNarrow if the band tail is not negligible after three
  /// grid doublings.
  explicit CoefficientBand(const HoppingCoefficients &coeffs);

  const HoppingCoefficients &coeffs() const noexcept { return coeffs_; }
  std::int64_t half_width() const noexcept { return half_width_; }
  /// J_n, zero outside the band.
  double operator[](std::int64_t n) const noexcept {
    return (n < -half_width_ || n > half_width_) ? 0.0
                                                 : J_[static_cast<std::size_t>(n + half_width_)];
  }
  /// Largest |J_n| over |n| >= N - 8.
  double tail() const noexcept;
  /// sum_n J_n^2 (one by Parseval).
  double parseval_sum() const noexcept;

private:
  HoppingCoefficients coeffs_;
  std::int64_t half_width_ = 0;
  std::vector<double> J_;
};

CoefficientBand coefficient_band(const HoppingCoefficients &coeffs);

/// K(k, l) = sum_{i in Z>=0 + 1/2} J_{k+i} J_{l+i}.
double kernel_eval(const CoefficientBand &band, Site k, Site l);

/// [K(k, l)] over arbitrary sites.
Eigen::MatrixXd kernel_matrix(const CoefficientBand &band, const std::vector<Site> &sites);

/// [K(first + i, first + j)] for 0 <= i, j < size, built with the diagonal
/// recursion K(k-1, l-1) = K(k, l) + J_{k-1/2} J_{l-1/2}.
Eigen::MatrixXd kernel_window(const CoefficientBand &band, Site first, std::int64_t size);

/// Diagonal K(k, k) for k = first .. first + size - 1.
std::vector<double> kernel_diagonal(const CoefficientBand &band, Site first, std::int64_t size);

struct QuadratureKernelValue {
  double value = 0.0;
  int nodes = 0;
};

/// Double contour integral on |z| = 1 + eps, |w| = 1 - eps by the trapezoid
/// rule, doubling the node count from 64 until two values agree to 1e-10.
/// Throws NoConvergence beyond 2^18 nodes.
QuadratureKernelValue kernel_eval_quadrature(const HoppingCoefficients &coeffs, Site k, Site l,
                                             double eps = 0.05);

/// Extended sine kernel of the Fermi sea at integer offset delta; delta = 0
/// gives the density.
double local_sine_prediction(const FermiSea &sea, std::int64_t delta);

/// Oscillating Airy approximation of K(k, l) near the right edge.  Throws
/// UnsupportedEdge unless the edge has a single interior maximizer and at
/// most two cuts.
double edge_prediction(const EdgeProfile &profile, double theta, Site k, Site l);

} // namespace splitsea
