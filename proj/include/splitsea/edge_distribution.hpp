#pragma once

// Law of the rightmost particle: Toeplitz determinants, a Fredholm cross-check,
// edge rescaling and convergence to the limiting laws.

#include <cstdint>
#include <vector>

#include "splitsea/potential.hpp"

namespace splitsea {

/// f_{-n_max..n_max} of the symbol exp(-2 theta sum_r (-1)^r gamma_r cos r phi).
std::vector<double> symbol_coeffs(const HoppingCoefficients &coeffs, int n_max);

/// Bits of working precision needed for the Toeplitz route (53 means double).
int toeplitz_precision_bits(const HoppingCoefficients &coeffs);

/// P(k_max < ell) = exp(logdet T_ell - theta^2 sum r gamma_r^2), Cholesky route.
double toeplitz_cdf(const HoppingCoefficients &coeffs, std::int64_t ell);

struct CdfRow {
  std::int64_t ell = 0;
  double p = 0.0;
};

struct CdfTable {
  double theta = 0.0;
  std::vector<double> gammas;
  std::vector<CdfRow> rows;
  double b = 0.0;
  double d = 0.0;
  int m = 1;
  int n_cuts = 1;

  /// Edge variable of ell, (ell - b theta) / (d theta)^{1/(2m+1)}.
  double scaled(std::int64_t ell) const;
  /// P(k_max < ell) read from the table, clamped to the stored range (0 for
  /// ell < 0).
  double at(std::int64_t ell) const;
};

/// P(k_max < ell) for ell = 0..ell_max by Levinson recursion on T_{ell_max}.
std::vector<double> toeplitz_cdf_prefix(const HoppingCoefficients &coeffs, std::int64_t ell_max);

/// Table over [ell_lo, ell_hi] with the edge scaling copied in.
CdfTable cdf_table(const HoppingCoefficients &coeffs, std::int64_t ell_lo, std::int64_t ell_hi);

/// det(I - K) on the sites ell + 1/2, ..., ell + W - 1/2.  Throws
/// WindowTooSmall if the dropped trace is not below 1e-12 by W = 512.
double fredholm_cdf_check(const HoppingCoefficients &coeffs, std::int64_t ell);

struct ConvergencePoint {
  double theta = 0.0;
  /// sup over lattice images s(ell) in the s range.
  double sup_lattice = 0.0;
  /// sup over real s of |P(k_max < b theta + s scale) - limit(s)|.
  double sup_step = 0.0;
  std::vector<double> s;
  std::vector<double> cdf;
  std::vector<double> limit;
};

struct ConvergenceReport {
  int m = 1;
  int power = 1;
  std::vector<ConvergencePoint> points;
};

/// Compares the rescaled finite-theta law with F_{2m+1}^power on [s_lo, s_hi].
/// power = 0 uses the cut count of the edge.
ConvergenceReport scaled_convergence_study(const std::vector<double> &gammas,
                                           const std::vector<double> &thetas, double s_lo = -6.0,
                                           double s_hi = 4.0, int power = 0);

/// (chi/2pi)^n times the integral over a period cube of prod_i cos chi(x_i - x_{i+1})
/// (cyclic), by the periodic trapezoid rule.
double oscillation_average(int n, double chi_b = 1.0);

} // namespace splitsea
