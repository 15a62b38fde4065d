#pragma once

// Brute-force Schur-measure quantities for small partitions.

#include <cstddef>
#include <functional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "splitsea/potential.hpp"
#include "splitsea/site.hpp"

namespace splitsea {

using Rational = boost::multiprecision::cpp_rational;

/// Weakly decreasing positive parts.
class Partition {
public:
  Partition() = default;
  /// Throws ConfigError unless the parts are positive and nonincreasing.
  explicit Partition(std::vector<int> parts);

  const std::vector<int> &parts() const noexcept { return parts_; }
  std::size_t length() const noexcept { return parts_.size(); }
  int size() const noexcept;
  /// lambda_i for i >= 1, zero beyond the length.
  int part(std::size_t i) const noexcept {
    return i >= 1 && i <= parts_.size() ? parts_[i - 1] : 0;
  }
  Partition conjugate() const;

  /// Whether the half-integer site is in {lambda_i - i + 1/2}.
  bool occupies(Site k) const noexcept;
  /// Number of occupied sites strictly above the integer n.
  long count_above(long n) const noexcept;

  friend bool operator==(const Partition &, const Partition &) = default;

private:
  std::vector<int> parts_;
};

using MiwaTimes = std::vector<double>;

MiwaTimes miwa_times(const HoppingCoefficients &coeffs);

std::vector<double> complete_homogeneous(const MiwaTimes &t, int n_max);
std::vector<double> elementary(const MiwaTimes &t, int n_max);
std::vector<Rational> complete_homogeneous_exact(const std::vector<Rational> &t, int n_max);
std::vector<Rational> elementary_exact(const std::vector<Rational> &t, int n_max);

/// Jacobi-Trudi value, cross-checked against the dual form.  Throws
/// OracleMismatch if the two disagree beyond 1e-10 relative.
double schur(const Partition &lambda, const MiwaTimes &t);

/// Exact arithmetic variant; both forms must agree exactly.
Rational schur_exact(const Partition &lambda, const std::vector<Rational> &t);

/// Precomputed h and e tables for repeated evaluations.
class SchurTable {
public:
  SchurTable(const MiwaTimes &t, int max_size);
  double operator()(const Partition &lambda) const;
  int max_size() const noexcept { return max_size_; }

private:
  std::vector<double> h_;
  std::vector<double> e_;
  int max_size_;
};

double measure_weight(const Partition &lambda, const HoppingCoefficients &coeffs);

/// All partitions of n in lexicographic order of their parts.
std::vector<Partition> partitions_of(int n);

/// Visits partitions by size 0..max_size, then lexicographically.
void for_each_partition(int max_size, const std::function<void(const Partition &)> &visit);

struct PartialSum {
  double value = 0.0;
  int cap = 0;
  /// Total weight of all partitions beyond the cap, 1 - sum_{|lambda|<=cap}.
  double residual_bound = 0.0;
};

/// Sum of measure weights over lambda_1 <= ell, |lambda| <= size_cap.
PartialSum brute_cdf_first_part(const HoppingCoefficients &coeffs, int ell, int size_cap);

/// Weight of partitions whose site set contains all of `sites`.
PartialSum brute_correlation(const HoppingCoefficients &coeffs, const std::vector<Site> &sites,
                             int size_cap);

/// Sum of measure weights for every |lambda| <= size_cap.
double total_weight(const HoppingCoefficients &coeffs, int size_cap);

/// Upper edge of the Young diagram in rotated coordinates, scaled by 1/theta.
/// At integer x*theta it equals x + 2 N(x theta)/theta with N counting the
/// occupied sites above x*theta.
double rescaled_profile(const Partition &lambda, double theta, double x);

} // namespace splitsea
