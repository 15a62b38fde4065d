#pragma once

// Unitary matrix model: supercritical eigenvalue density, Metropolis sampling
// of the joint eigenvalue law and partition functions.

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "splitsea/potential.hpp"

namespace splitsea {

struct EigenSample {
  std::vector<double> angles; // sorted, in [-pi, pi]
  double log_weight = 0.0;
};

struct DensityCurve {
  std::vector<double> alphas;
  std::vector<double> rho;
  /// Arcs [a, b] (a > b wraps through pi) where rho < 1e-3 max rho.
  std::vector<std::pair<double, double>> support_cuts;

  /// Periodic trapezoid integral of rho.
  double integral() const;
};

/// (1/2pi)(1 - D(alpha - pi)/x).  Throws SubcriticalPhase if x < b.
double eigen_density_supercritical(const HoppingCoefficients &coeffs, double x, double alpha);

/// Density on `n_points` equally spaced angles of [-pi, pi).
DensityCurve density_curve(const HoppingCoefficients &coeffs, double x, std::size_t n_points = 4096);

/// Per-eigenvalue potential -2 theta sum_r (-1)^r gamma_r cos r alpha.
double angle_potential(const HoppingCoefficients &coeffs, double alpha);

/// Same term from the polynomial form -theta [V(-e^{i alpha}) + V(-e^{-i alpha})].
double angle_potential_polynomial(const HoppingCoefficients &coeffs, double alpha);

/// Unnormalised log density of the eigenvalue angles (theta from coeffs).
/// Throws CoincidentAngles if two angles coincide.
double log_joint_density(const HoppingCoefficients &coeffs, const std::vector<double> &angles);

/// Metropolis acceptance for log target ratio `log_ratio`.
bool metropolis_accept(double log_ratio, std::mt19937_64 &rng);

struct ChainSummary {
  double acceptance_rate = 0.0; // after burn-in
  double step = 0.0;            // frozen proposal width
  std::uint64_t kept_sweeps = 0;
};

struct ChainOptions {
  std::uint64_t sweeps = 10000;
  double burn_in_fraction = 0.2;
  std::uint64_t seed = 1;
};

/// Runs single-angle Gaussian Metropolis; `observe` sees the state after each
/// retained sweep.  The proposal width is tuned to 20-50% acceptance during
/// burn-in, then frozen.
template <class Observer>
ChainSummary metropolis_chain(const HoppingCoefficients &coeffs, int ell, const ChainOptions &opts,
                              Observer &&observe);

struct AngleHistogram {
  std::vector<double> centres;
  std::vector<double> density; // normalised to integrate to one
  ChainSummary chain;

  /// Histogram value at the bin containing alpha (wrapped to [-pi, pi)).
  double at(double alpha) const;
};

AngleHistogram unitary_histogram(const HoppingCoefficients &coeffs, int ell,
                                 const ChainOptions &opts, std::size_t bins = 72);

/// Histogram at pi +- chi_b over its value at 0.
double dip_ratio(const AngleHistogram &hist, double chi_b);

/// Z_ell = e^{theta^2 sum r gamma_r^2} P(k_max < ell) (Toeplitz route).
double partition_function_toeplitz(const HoppingCoefficients &coeffs, std::int64_t ell);

/// Z_ell for ell in {1, 2} by periodic trapezoid quadrature of the Weyl
/// integral.
double partition_function_quadrature(const HoppingCoefficients &coeffs, int ell);

// ---- implementation of the chain template ----

namespace detail {

double wrap_angle(double a);
double single_angle_delta(const HoppingCoefficients &coeffs, const std::vector<double> &angles,
                          std::size_t j, double proposal);

} // namespace detail

template <class Observer>
ChainSummary metropolis_chain(const HoppingCoefficients &coeffs, int ell, const ChainOptions &opts,
                              Observer &&observe) {
  if (ell < 1)
    throw std::invalid_argument("metropolis_chain: ell must be positive");
  std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32),
                    0x6d63u};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, ell - 1);
  const double pi = 3.141592653589793;
  std::vector<double> angles(static_cast<std::size_t>(ell));
  for (int j = 0; j < ell; ++j)
    angles[static_cast<std::size_t>(j)] = -pi + (2.0 * pi) * (j + 0.5) / ell;

  const auto burn = static_cast<std::uint64_t>(opts.burn_in_fraction * static_cast<double>(opts.sweeps));
  double step = 1.0;
  std::uint64_t tried = 0;
  std::uint64_t accepted = 0;
  ChainSummary summary;
  EigenSample state;
  double log_weight = log_joint_density(coeffs, angles);
  for (std::uint64_t sweep = 0; sweep < opts.sweeps; ++sweep) {
    for (int move = 0; move < ell; ++move) {
      const auto j = static_cast<std::size_t>(pick(rng));
      const double proposal = detail::wrap_angle(angles[j] + step * gauss(rng));
      const double delta = detail::single_angle_delta(coeffs, angles, j, proposal);
      ++tried;
      if (metropolis_accept(delta, rng)) {
        angles[j] = proposal;
        log_weight += delta;
        ++accepted;
      }
    }
    if (sweep < burn) {
      if ((sweep + 1) % 50 == 0) {
        const double rate = static_cast<double>(accepted) / static_cast<double>(tried);
        if (rate > 0.5)
          step = std::min(step * 1.25, pi);
        else if (rate < 0.2)
          step /= 1.25;
        tried = accepted = 0;
      }
      if (sweep + 1 == burn)
        tried = accepted = 0;
      continue;
    }
    state.angles = angles;
    std::sort(state.angles.begin(), state.angles.end());
    state.log_weight = log_weight;
    observe(static_cast<const EigenSample &>(state));
    ++summary.kept_sweeps;
  }
  summary.acceptance_rate = tried ? static_cast<double>(accepted) / static_cast<double>(tried) : 0.0;
  summary.step = step;
  return summary;
}

} // namespace splitsea
