#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "splitsea/airy.hpp"
#include "splitsea/edge_distribution.hpp"
#include "splitsea/errors.hpp"
#include "splitsea/kernel.hpp"
#include "splitsea/schur_oracle.hpp"

using namespace splitsea;

TEST_CASE("symbol coefficients") {
  const std::vector<double> f = symbol_coeffs(HoppingCoefficients({1.0}, 1.0), 12);
  REQUIRE(f.size() == 25);
  for (int n = -12; n <= 12; ++n)
    CHECK(std::abs(f[static_cast<std::size_t>(n + 12)] - oracle::bessel_i(n, 2.0)) < 1e-13 * oracle::bessel_i(0, 2.0));
  const std::vector<double> g = symbol_coeffs(HoppingCoefficients({1.0, -1.0 / 3.0, 0.2}, 3.0), 30);
  for (int n = 1; n <= 30; ++n)
    CHECK(std::abs(g[static_cast<std::size_t>(30 + n)] - g[static_cast<std::size_t>(30 - n)]) < 1e-13);
  const std::vector<double> z = symbol_coeffs(HoppingCoefficients({1.0}, 1e-13), 3);
  CHECK(std::abs(z[3] - 1.0) < 1e-12);
  CHECK(std::abs(z[4]) < 1e-12);
}

TEST_CASE("toeplitz cdf edge cases") {
  const HoppingCoefficients c({1.0, -1.0 / 3.0}, 0.5);
  CHECK(toeplitz_cdf(c, -1) == 0.0);
  CHECK(toeplitz_cdf(c, 0) == doctest::Approx(std::exp(-0.25 * c.miwa_norm())).epsilon(1e-14));
  CHECK_THROWS_AS(toeplitz_cdf(c, 5000), ConfigError);
  const HoppingCoefficients tiny({1.0, -1.0 / 3.0}, 1e-10);
  for (int ell : {1, 4, 9})
    CHECK(toeplitz_cdf(tiny, ell) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fredholm_cdf_check(tiny, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("brute Schur sum, Toeplitz and Fredholm agree") {
  const HoppingCoefficients c({1.0, -1.0 / 3.0}, 0.5);
  const PartialSum brute = brute_cdf_first_part(c, 3, 22);
  const double toeplitz = toeplitz_cdf(c, 3);
  CHECK(brute.residual_bound < 1e-9);
  CHECK(std::abs(brute.value - toeplitz) < 1e-7);
  CHECK(std::abs(fredholm_cdf_check(c, 3) - toeplitz) < 1e-7);
}

TEST_CASE("Fredholm window matches Toeplitz on random cases") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> theta(0.05, 1.0);
  std::uniform_real_distribution<double> g2(-0.5, 0.5);
  std::uniform_int_distribution<int> ell(1, 10);
  for (int trial = 0; trial < 20; ++trial) {
    const HoppingCoefficients c({1.0, g2(rng)}, theta(rng));
    const int l = ell(rng);
    CHECK(std::abs(fredholm_cdf_check(c, l) - toeplitz_cdf(c, l)) < 1e-7);
  }
}

TEST_CASE("far tail is one minus the trace") {
  const HoppingCoefficients c({1.0, -1.0 / 3.0}, 4.0);
  const CoefficientBand band(c);
  const std::int64_t ell = 16;
  double trace = 0.0;
  for (std::int64_t k = ell; k < ell + 200; ++k)
    trace += kernel_eval(band, Site{k}, Site{k});
  CHECK(trace < 1e-4);
  const double p = toeplitz_cdf(c, ell);
  CHECK(std::abs((1.0 - p) - trace) < 10.0 * trace * trace + 1e-13);
}

TEST_CASE("Levinson prefix matches Cholesky and is monotone") {
  for (double theta : {2.0, 15.0, 40.0}) {
    const HoppingCoefficients c({1.0, -1.0 / 3.0}, theta);
    const auto top = static_cast<std::int64_t>(std::ceil(edge_profile(c).b * theta)) + 20;
    const std::vector<double> prefix = toeplitz_cdf_prefix(c, top);
    REQUIRE(prefix.size() == static_cast<std::size_t>(top + 1));
    for (std::int64_t ell = 1; ell <= top; ++ell) {
      CHECK(prefix[static_cast<std::size_t>(ell)] >= prefix[static_cast<std::size_t>(ell - 1)] - 1e-12);
      CHECK(prefix[static_cast<std::size_t>(ell)] <= 1.0);
    }
    for (std::int64_t ell : {std::int64_t{1}, top / 2, top - 5, top})
      CHECK(std::abs(prefix[static_cast<std::size_t>(ell)] - toeplitz_cdf(c, ell)) < 1e-10);
    CHECK(1.0 - prefix.back() < 1e-3);
  }
}

TEST_CASE("cdf table carries the edge scaling") {
  const HoppingCoefficients c({1.0, -1.0 / 3.0}, 30.0);
  const CdfTable table = cdf_table(c, 40, 60);
  CHECK(table.rows.size() == 21);
  CHECK(table.m == 1);
  CHECK(table.n_cuts == 2);
  CHECK(table.b == doctest::Approx(41.0 / 24.0).epsilon(1e-12));
  CHECK(table.at(-1) == 0.0);
  CHECK(table.at(10) == table.rows.front().p);
  CHECK(table.at(1000) == table.rows.back().p);
  CHECK(table.at(50) == doctest::Approx(toeplitz_cdf(c, 50)).epsilon(1e-10));
  CHECK(table.scaled(50) == doctest::Approx((50.0 - table.b * 30.0) / std::cbrt(table.d * 30.0)));
}

TEST_CASE("median grows like theta^(1/3) past b theta") {
  const HoppingCoefficients base({1.0, -1.0 / 3.0});
  const double b = edge_profile(base).b;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (double theta : {20.0, 40.0, 80.0, 160.0, 320.0}) {
    const HoppingCoefficients c = base.with_theta(theta);
    const auto lo = static_cast<std::int64_t>(b * theta) - 40;
    const auto hi = static_cast<std::int64_t>(b * theta) + 40;
    const CdfTable table = cdf_table(c, lo, hi);
    double median = 0.0;
    for (std::size_t i = 1; i < table.rows.size(); ++i)
      if (table.rows[i - 1].p < 0.5 && table.rows[i].p >= 0.5) {
        const auto &a = table.rows[i - 1];
        const auto &z = table.rows[i];
        median = static_cast<double>(a.ell) + (0.5 - a.p) / (z.p - a.p);
      }
    REQUIRE(median > 0.0);
    // Offset measured from b theta; the median sits below it.
    const double offset = std::abs(median - b * theta);
    sx += std::log(theta);
    sy += std::log(offset);
    sxx += std::log(theta) * std::log(theta);
    sxy += std::log(theta) * std::log(offset);
    ++n;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  INFO("slope = " << slope);
  CHECK(slope >= 0.25);
  CHECK(slope <= 0.42);
}

TEST_CASE("oscillation averages") {
  CHECK(std::abs(oscillation_average(2) - 0.5) < 1e-10);
  CHECK(std::abs(oscillation_average(3) - 0.25) < 1e-10);
  CHECK(std::abs(oscillation_average(4) - 0.125) < 1e-10);
  for (int n : {2, 3, 4})
    CHECK(std::abs(oscillation_average(n, 1.0) - oscillation_average(n, std::acos(3.0 / 8.0))) < 1e-10);
  CHECK_THROWS_AS(oscillation_average(5), ConfigError);
}

TEST_CASE("convergence study reports decreasing distances") {
  const ConvergenceReport r = scaled_convergence_study({1.0, 0.1}, {10.0, 20.0, 40.0});
  CHECK(r.m == 1);
  CHECK(r.power == 1);
  REQUIRE(r.points.size() == 3);
  for (std::size_t i = 1; i < r.points.size(); ++i) {
    CHECK(r.points[i].sup_lattice < r.points[i - 1].sup_lattice);
    CHECK(r.points[i].sup_step < r.points[i - 1].sup_step);
  }
  for (const auto &p : r.points) {
    CHECK(p.sup_step >= p.sup_lattice);
    for (std::size_t i = 0; i < p.s.size(); ++i)
      CHECK(std::abs(p.limit[i] - fredholm_F(AiryOrder(1), p.s[i])) < 1e-12);
  }
  const ConvergenceReport squared = scaled_convergence_study({1.0, -1.0 / 3.0}, {20.0});
  CHECK(squared.power == 2);
}
