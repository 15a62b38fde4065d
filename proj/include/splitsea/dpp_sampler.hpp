#pragma once

// Exact sampling of the lattice determinantal process on a finite window.

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "splitsea/kernel.hpp"
#include "splitsea/potential.hpp"
#include "splitsea/site.hpp"

namespace splitsea {

struct Window {
  Site lo;
  Site hi; // inclusive
  std::int64_t size() const noexcept { return hi - lo + 1; }
};

/// [-b~ theta - 10 sqrt(theta), b theta + 10 (d theta)^{1/(2m+1)}], widened to
/// at least four sites.
Window auto_window(const HoppingCoefficients &coeffs);

/// Kernel restricted to a window with its spectral decomposition.  Sites
/// below the window count as occupied, sites above as empty.
class WindowedKernel {
public:
  /// Throws LeakageTooLarge if `max_leakage` > 0 and the leakage exceeds it.
  WindowedKernel(const CoefficientBand &band, Window window, double max_leakage = 0.0);
  /// Arbitrary symmetric contraction on the window; leakage is zero.
  WindowedKernel(Window window, Eigen::MatrixXd matrix);

  const Window &window() const noexcept { return window_; }
  const Eigen::MatrixXd &matrix() const noexcept { return matrix_; }
  const Eigen::VectorXd &eigenvalues() const noexcept { return eigenvalues_; }
  const Eigen::MatrixXd &eigenvectors() const noexcept { return eigenvectors_; }
  /// sum_{k < lo} (1 - K(k,k)) + sum_{k > hi} K(k,k).
  double leakage() const noexcept { return leakage_; }

private:
  void decompose();

  Window window_;
  Eigen::MatrixXd matrix_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
  double leakage_ = 0.0;
};

/// Auto window with leakage below 1e-6.
WindowedKernel windowed_kernel(const HoppingCoefficients &coeffs);

/// Deterministic stream for sample `index` under `seed`.
std::mt19937_64 sample_stream(std::uint64_t seed, std::uint64_t index);

/// Occupied sites inside the window, ascending.
std::vector<Site> sample(const WindowedKernel &wk, std::mt19937_64 &rng);
std::vector<Site> sample(const WindowedKernel &wk, std::uint64_t seed, std::uint64_t index = 0);

/// Largest particle of a configuration; lo - 1 if the window is empty.
Site top_particle(const WindowedKernel &wk, const std::vector<Site> &config);

struct SampleStats {
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
  Window window;
  /// Occupation frequency per window site.
  std::vector<double> density;
  /// Top particle of each sample, by sample index.
  std::vector<Site> k_max;
};

SampleStats sample_many(const WindowedKernel &wk, std::uint64_t n_samples, std::uint64_t seed);

struct EdgeLawReport {
  std::vector<Site> k_max;
  std::vector<double> scaled; // (k_max - b theta) / (d theta)^{1/(2m+1)}
  double ks_exact = 0.0;
  double ks_limit = 0.0;
  int m = 1;
  int n_cuts = 1;
};

/// Samples the top particle and compares its law with the Toeplitz law and
/// with F_{2m+1}^{n_cuts}.  Both distances are sup_ell |P_emp(k_max < ell) - P(ell)|.
EdgeLawReport empirical_edge_law(const HoppingCoefficients &coeffs, std::uint64_t n_samples,
                                 std::uint64_t seed);

/// KS distance between the empirical law of `k_max` and an exact table of
/// P(k_max < ell) for ell = 0..p.size()-1.
double ks_against_table(const std::vector<Site> &k_max, const std::vector<double> &p);

struct ShapeDeviation {
  double percentile90 = 0.0;
  std::vector<double> per_sample;
  double leakage = 0.0;
};

/// sup over lattice n in the window of |N(n)/theta - int_{n/theta}^inf rho| per
/// sample, summarised by its 90th percentile.  Needs theta > 0.
ShapeDeviation limit_shape_deviation(const HoppingCoefficients &coeffs, std::uint64_t n_samples,
                                     std::uint64_t seed);

} // namespace splitsea
