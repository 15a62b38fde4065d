#include "splitsea/schur_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "splitsea/errors.hpp"

namespace splitsea {

Partition::Partition(std::vector<int> parts) : parts_(std::move(parts)) {
  while (!parts_.empty() && parts_.back() == 0)
    parts_.pop_back();
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (parts_[i] <= 0)
      throw ConfigError("partition parts must be positive");
    if (i > 0 && parts_[i] > parts_[i - 1])
      throw ConfigError("partition parts must be nonincreasing");
  }
}

int Partition::size() const noexcept { return std::accumulate(parts_.begin(), parts_.end(), 0); }

Partition Partition::conjugate() const {
  std::vector<int> conj;
  if (!parts_.empty()) {
    conj.assign(static_cast<std::size_t>(parts_.front()), 0);
    for (int p : parts_)
      for (int j = 0; j < p; ++j)
        ++conj[static_cast<std::size_t>(j)];
  }
  return Partition(std::move(conj));
}

bool Partition::occupies(Site k) const noexcept {
  const long len = static_cast<long>(parts_.size());
  // Site index i + 1/2 is lambda_j - j + 1/2 iff index == lambda_j - j.
  if (k.index <= -len - 1)
    return true;
  for (long j = 1; j <= len; ++j)
    if (parts_[static_cast<std::size_t>(j - 1)] - j == k.index)
      return true;
  return false;
}

long Partition::count_above(long n) const noexcept {
  const long len = static_cast<long>(parts_.size());
  long count = 0;
  for (long j = 1; j <= len; ++j)
    if (parts_[static_cast<std::size_t>(j - 1)] - j + 0.5 > static_cast<double>(n))
      ++count;
  // Sea sites -len-1/2, -len-3/2, ... above n.
  count += std::max(0L, -len - n);
  return count;
}

MiwaTimes miwa_times(const HoppingCoefficients &coeffs) {
  MiwaTimes t(coeffs.degree());
  for (std::size_t r = 1; r <= coeffs.degree(); ++r)
    t[r - 1] = coeffs.theta() * coeffs.gamma(r);
  return t;
}

namespace {

template <class T> std::vector<T> newton_recurrence(const std::vector<T> &t, int n_max) {
  std::vector<T> h(static_cast<std::size_t>(std::max(n_max, 0)) + 1, T(0));
  h[0] = T(1);
  const int R = static_cast<int>(t.size());
  for (int n = 1; n <= n_max; ++n) {
    T acc(0);
    for (int r = 1; r <= std::min(R, n); ++r)
      acc += T(r) * t[static_cast<std::size_t>(r - 1)] * h[static_cast<std::size_t>(n - r)];
    h[static_cast<std::size_t>(n)] = acc / T(n);
  }
  return h;
}

template <class T> std::vector<T> dual_times(const std::vector<T> &t) {
  std::vector<T> s(t.size());
  for (std::size_t r = 1; r <= t.size(); ++r)
    s[r - 1] = (r % 2 == 1) ? t[r - 1] : T(-t[r - 1]);
  return s;
}

template <class T> T coefficient(const std::vector<T> &c, int n) {
  if (n < 0)
    return T(0);
  return c[static_cast<std::size_t>(n)];
}

struct DetResult {
  double value;
  double hadamard;
};

DetResult jacobi_trudi_det(const std::vector<int> &rows, const std::vector<double> &c) {
  const int n = static_cast<int>(rows.size());
  if (n == 0)
    return {1.0, 1.0};
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m(i, j) = coefficient(c, rows[static_cast<std::size_t>(i)] - (i + 1) + (j + 1));
  double hadamard = 1.0;
  for (int i = 0; i < n; ++i)
    hadamard *= m.row(i).norm();
  return {Eigen::PartialPivLU<Eigen::MatrixXd>(m).determinant(), hadamard};
}

Rational exact_det(std::vector<std::vector<Rational>> a) {
  const std::size_t n = a.size();
  Rational det(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a[piv][col] == 0)
      ++piv;
    if (piv == n)
      return Rational(0);
    if (piv != col) {
      std::swap(a[piv], a[col]);
      det = -det;
    }
    det *= a[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      if (a[r][col] == 0)
        continue;
      const Rational f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c)
        a[r][c] -= f * a[col][c];
    }
  }
  return det;
}

Rational jacobi_trudi_exact(const std::vector<int> &rows, const std::vector<Rational> &c) {
  const std::size_t n = rows.size();
  std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m[i][j] = coefficient(c, rows[i] - static_cast<int>(i) + static_cast<int>(j));
  return exact_det(std::move(m));
}

double checked_schur(const Partition &lambda, const std::vector<double> &h,
                     const std::vector<double> &e) {
  const DetResult primal = jacobi_trudi_det(lambda.parts(), h);
  const DetResult dual = jacobi_trudi_det(lambda.conjugate().parts(), e);
  const double scale = std::max(std::abs(primal.value), std::abs(dual.value));
  // LU rounding is of order eps times the row-norm product, so the check can
  // be no tighter than the worse-conditioned of the two routes.
  const double floor = 1e-13 * std::max(primal.hadamard, dual.hadamard);
  if (std::abs(primal.value - dual.value) > 1e-10 * scale + floor) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "Jacobi-Trudi " << primal.value << " vs dual " << dual.value << " (row-norm products "
        << primal.hadamard << ", " << dual.hadamard << ")";
    throw OracleMismatch(msg.str());
  }
  return primal.value;
}

void partitions_rec(int remaining, int max_part, std::vector<int> &prefix,
                    std::vector<Partition> &out) {
  if (remaining == 0) {
    out.emplace_back(prefix);
    return;
  }
  for (int p = 1; p <= std::min(remaining, max_part); ++p) {
    prefix.push_back(p);
    partitions_rec(remaining - p, p, prefix, out);
    prefix.pop_back();
  }
}

} // namespace

std::vector<double> complete_homogeneous(const MiwaTimes &t, int n_max) {
  return newton_recurrence(t, n_max);
}

std::vector<double> elementary(const MiwaTimes &t, int n_max) {
  return newton_recurrence(dual_times(t), n_max);
}

std::vector<Rational> complete_homogeneous_exact(const std::vector<Rational> &t, int n_max) {
  return newton_recurrence(t, n_max);
}

std::vector<Rational> elementary_exact(const std::vector<Rational> &t, int n_max) {
  return newton_recurrence(dual_times(t), n_max);
}

double schur(const Partition &lambda, const MiwaTimes &t) {
  if (lambda.length() > 64 || lambda.part(1) > 64)
    throw ConfigError("schur: partition exceeds the 64-row guard");
  const int n = lambda.size() + static_cast<int>(std::max<std::size_t>(lambda.length(), 1));
  return checked_schur(lambda, complete_homogeneous(t, n), elementary(t, n));
}

Rational schur_exact(const Partition &lambda, const std::vector<Rational> &t) {
  if (lambda.size() > 10)
    throw ConfigError("schur_exact: exact mode is limited to |lambda| <= 10");
  const int n = lambda.size() + static_cast<int>(std::max<std::size_t>(lambda.length(), 1));
  const Rational primal = jacobi_trudi_exact(lambda.parts(), complete_homogeneous_exact(t, n));
  const Rational dual = jacobi_trudi_exact(lambda.conjugate().parts(), elementary_exact(t, n));
  if (primal != dual)
    throw OracleMismatch("exact Jacobi-Trudi and dual forms differ");
  return primal;
}

SchurTable::SchurTable(const MiwaTimes &t, int max_size)
    : h_(complete_homogeneous(t, 2 * max_size + 1)), e_(elementary(t, 2 * max_size + 1)),
      max_size_(max_size) {}

double SchurTable::operator()(const Partition &lambda) const {
  if (lambda.size() > max_size_)
    throw ConfigError("SchurTable: partition larger than the table");
  return checked_schur(lambda, h_, e_);
}

double measure_weight(const Partition &lambda, const HoppingCoefficients &coeffs) {
  const double s = schur(lambda, miwa_times(coeffs));
  const double th = coeffs.theta();
  return std::exp(-th * th * coeffs.miwa_norm()) * s * s;
}

std::vector<Partition> partitions_of(int n) {
  std::vector<Partition> out;
  if (n < 0)
    return out;
  std::vector<int> prefix;
  partitions_rec(n, n, prefix, out);
  return out;
}

void for_each_partition(int max_size, const std::function<void(const Partition &)> &visit) {
  for (int n = 0; n <= max_size; ++n)
    for (const Partition &p : partitions_of(n))
      visit(p);
}

namespace {

// Weighted sum over |lambda| <= cap of those passing `keep`; also returns the
// unrestricted total for the residual.
struct Sums {
  double kept;
  double total;
};

template <class Keep> Sums weighted_sum(const HoppingCoefficients &coeffs, int cap, Keep keep) {
  if (cap < 0)
    throw ConfigError("size cap must be nonnegative");
  const SchurTable table(miwa_times(coeffs), cap);
  const double th = coeffs.theta();
  const double norm = std::exp(-th * th * coeffs.miwa_norm());
  double kept = 0.0;
  double total = 0.0;
  // Smallest sizes first, so partial sums stay monotone in the cap.
  for (int n = 0; n <= cap; ++n) {
    double kept_n = 0.0;
    double total_n = 0.0;
    for (const Partition &p : partitions_of(n)) {
      const double s = table(p);
      const double w = norm * s * s;
      total_n += w;
      if (keep(p))
        kept_n += w;
    }
    kept += kept_n;
    total += total_n;
  }
  return {kept, total};
}

PartialSum as_partial(Sums s, int cap) { return {s.kept, cap, std::max(0.0, 1.0 - s.total)}; }

} // namespace

PartialSum brute_cdf_first_part(const HoppingCoefficients &coeffs, int ell, int size_cap) {
  return as_partial(
      weighted_sum(coeffs, size_cap, [ell](const Partition &p) { return p.part(1) <= ell; }),
      size_cap);
}

PartialSum brute_correlation(const HoppingCoefficients &coeffs, const std::vector<Site> &sites,
                             int size_cap) {
  const Sums sums = weighted_sum(coeffs, size_cap, [&sites](const Partition &p) {
    return std::all_of(sites.begin(), sites.end(), [&p](Site k) { return p.occupies(k); });
  });
  return as_partial(sums, size_cap);
}

double total_weight(const HoppingCoefficients &coeffs, int size_cap) {
  return weighted_sum(coeffs, size_cap, [](const Partition &) { return true; }).total;
}

double rescaled_profile(const Partition &lambda, double theta, double x) {
  if (!(theta > 0.0))
    throw ConfigError("rescaled_profile: theta must be positive");
  const double s = x * theta;
  const double n = std::floor(s);
  const long ni = static_cast<long>(n);
  const double at_n = n + 2.0 * static_cast<double>(lambda.count_above(ni));
  // Across the site n + 1/2 the profile falls if it is occupied, rises if not.
  const double slope = lambda.occupies(Site{ni}) ? -1.0 : 1.0;
  return (at_n + (s - n) * slope) / theta;
}

} // namespace splitsea
