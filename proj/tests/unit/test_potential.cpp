#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "splitsea/errors.hpp"
#include "splitsea/potential.hpp"

using namespace splitsea;

namespace {

const HoppingCoefficients two_cut({1.0, -1.0 / 3.0});
const HoppingCoefficients multicritical({1.0, -1.0 / 8.0});
const HoppingCoefficients one_cut({1.0, 0.1});
const HoppingCoefficients left_split({1.0, 1.0 / 3.0});

} // namespace

TEST_CASE("coefficients trim trailing zeros and validate theta") {
  HoppingCoefficients c({1.0, 0.5, 0.0, 0.0}, 2.0);
  CHECK(c.degree() == 2);
  CHECK(c.gamma(3) == 0.0);
  CHECK(c.miwa_norm() == doctest::Approx(1.0 + 2 * 0.25));
  CHECK_THROWS_AS(HoppingCoefficients({1.0}, -1.0), ConfigError);
  CHECK(HoppingCoefficients({0.0, 0.0}).is_degenerate());
}

TEST_CASE("dispersion values and symmetries") {
  CHECK(eval_dispersion(HoppingCoefficients({1.0}), 0.0) == doctest::Approx(2.0));
  CHECK(eval_dispersion(two_cut, 0.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(std::abs(eval_dispersion(multicritical, 0.0, 2)) < 1e-14);
  for (double phi : {0.3, 1.1, 2.9}) {
    CHECK(eval_dispersion(two_cut, -phi) == doctest::Approx(eval_dispersion(two_cut, phi)));
    CHECK(eval_dispersion(two_cut, phi + 2 * std::numbers::pi) ==
          doctest::Approx(eval_dispersion(two_cut, phi)).epsilon(1e-13));
  }
}

TEST_CASE("derivatives agree with central differences") {
  const HoppingCoefficients c({0.7, -0.4, 0.15});
  const double h = 1e-5;
  for (double phi : {0.2, 1.3, 2.4}) {
    for (unsigned p = 1; p <= 4; ++p) {
      const double fd = (eval_dispersion(c, phi + h, p - 1) - eval_dispersion(c, phi - h, p - 1)) / (2 * h);
      const double exact = eval_dispersion(c, phi, p);
      CHECK(std::abs(fd - exact) <= 1e-6 * dispersion_scale(c, p));
    }
  }
}

TEST_CASE("global extrema") {
  Extrema e = global_extrema(two_cut);
  CHECK(std::abs(e.b - 41.0 / 24.0) < 1e-12);
  CHECK(std::abs(e.b_tilde - 10.0 / 3.0) < 1e-12);
  e = global_extrema(HoppingCoefficients({1.0}));
  CHECK(e.b == doctest::Approx(2.0));
  CHECK(e.b_tilde == doctest::Approx(2.0));
  CHECK(std::abs(global_extrema(multicritical).b - 1.5) < 1e-12);
}

TEST_CASE("Fermi sea examples") {
  FermiSea sea = fermi_sea(HoppingCoefficients({1.0}), 1.0);
  REQUIRE(sea.boundaries.size() == 2);
  CHECK(sea.boundaries[0] == 0.0);
  CHECK(sea.boundaries[1] == doctest::Approx(std::acos(0.5)).epsilon(1e-12));
  CHECK(sea.cuts == 1);

  const double g = -1.0 / 3.0, x = 1.6;
  sea = fermi_sea(two_cut, x);
  REQUIRE(sea.boundaries.size() == 2);
  const double disc = std::sqrt(1 + 8 * x * g + 32 * g * g);
  const double r1 = std::acos((-1 + disc) / (8 * g));
  const double r2 = std::acos((-1 - disc) / (8 * g));
  CHECK(std::abs(sea.boundaries[0] - std::min(r1, r2)) < 1e-10);
  CHECK(std::abs(sea.boundaries[1] - std::max(r1, r2)) < 1e-10);
  CHECK(sea.cuts == 2);

  sea = fermi_sea(two_cut, 4.0);
  CHECK(sea.empty());
  CHECK(sea.cuts == 0);

  sea = fermi_sea(two_cut, -4.0);
  REQUIRE(sea.boundaries.size() == 2);
  CHECK(sea.boundaries[0] == 0.0);
  CHECK(sea.boundaries[1] == doctest::Approx(std::numbers::pi));
  CHECK(sea.cuts == 0);
}

TEST_CASE("Fermi sea invariants on a grid") {
  const HoppingCoefficients c({0.6, -0.5, 0.2});
  const Extrema e = global_extrema(c);
  for (int i = 1; i < 40; ++i) {
    const double x = -e.b_tilde + (e.b + e.b_tilde) * i / 40.0;
    const FermiSea sea = fermi_sea(c, x);
    REQUIRE(sea.boundaries.size() % 2 == 0);
    for (double chi : sea.boundaries)
      if (chi > 0.0 && chi < std::numbers::pi)
        CHECK(std::abs(eval_dispersion(c, chi) - x) < 1e-10);
    for (std::size_t k = 0; k + 1 < sea.boundaries.size(); k += 2) {
      const double mid = 0.5 * (sea.boundaries[k] + sea.boundaries[k + 1]);
      CHECK(eval_dispersion(c, mid) >= x);
      if (k + 2 < sea.boundaries.size()) {
        const double gap = 0.5 * (sea.boundaries[k + 1] + sea.boundaries[k + 2]);
        CHECK(eval_dispersion(c, gap) < x);
      }
    }
  }
}

TEST_CASE("quadratic closed form matches the solver") {
  // Oracle examples.  The split-right window for gamma2 = -1/3 is
  // [4 gamma + 2, 41/24] = [2/3, 1.7083]; x = 1.8 is already past the edge.
  FermiSea q = quadratic_fermi_sea_oracle(-1.0 / 3.0, 1.65);
  REQUIRE(q.boundaries.size() == 2);
  CHECK(q.cuts == 2);
  CHECK(quadratic_fermi_sea_oracle(-1.0 / 3.0, 1.8).empty());
  CHECK(quadratic_fermi_sea_oracle(0.0, 2.0).empty());
  // Left split for gamma2 = 1/3 holds on [vertex, 4 gamma - 2] = [-17/12, -2/3].
  q = quadratic_fermi_sea_oracle(1.0 / 3.0, -1.0);
  CHECK(q.cuts == 2);
  REQUIRE(q.boundaries.size() == 4);
  CHECK(q.boundaries.front() == 0.0);
  CHECK(q.boundaries.back() == doctest::Approx(std::numbers::pi));
  // x = 0 lies above the split window: a single arc.
  CHECK(quadratic_fermi_sea_oracle(1.0 / 3.0, 0.0).cuts == 1);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> g2(-0.6, 0.6);
  for (int trial = 0; trial < 60; ++trial) {
    const double gamma2 = g2(rng);
    const HoppingCoefficients c({1.0, gamma2});
    const Extrema e = global_extrema(c);
    for (int i = 0; i <= 30; ++i) {
      const double x = -e.b_tilde - 0.2 + (e.b + e.b_tilde + 0.4) * i / 30.0;
      const FermiSea a = fermi_sea(c, x);
      const FermiSea o = quadratic_fermi_sea_oracle(gamma2, x);
      REQUIRE(a.boundaries.size() == o.boundaries.size());
      for (std::size_t k = 0; k < a.boundaries.size(); ++k)
        CHECK(std::abs(a.boundaries[k] - o.boundaries[k]) < 1e-10);
      CHECK(a.cuts == o.cuts);
    }
  }
}

TEST_CASE("edge profiles of the reference models") {
  EdgeProfile p = edge_profile(two_cut);
  REQUIRE(p.maximizers.size() == 1);
  CHECK(std::abs(p.b - 41.0 / 24.0) < 1e-10);
  CHECK(std::abs(p.b_tilde - 10.0 / 3.0) < 1e-10);
  CHECK(std::abs(p.maximizers[0].chi_b - std::acos(3.0 / 8.0)) < 1e-10);
  CHECK(p.maximizers[0].m == 1);
  CHECK(std::abs(p.maximizers[0].d - 55.0 / 24.0) < 1e-10);
  CHECK(p.n_cuts == 2);
  // d against a finite-difference second derivative.
  const double chi = p.maximizers[0].chi_b, h = 1e-4;
  const double d2 = (eval_dispersion(two_cut, chi + h) - 2 * eval_dispersion(two_cut, chi) +
                     eval_dispersion(two_cut, chi - h)) / (h * h);
  CHECK(-d2 / 2 == doctest::Approx(55.0 / 24.0).epsilon(1e-6));

  p = edge_profile(multicritical);
  REQUIRE(p.maximizers.size() == 1);
  CHECK(std::abs(p.b - 1.5) < 1e-10);
  CHECK(p.maximizers[0].chi_b == 0.0);
  CHECK(p.maximizers[0].m == 2);
  CHECK(std::abs(p.maximizers[0].d - 0.25) < 1e-10);
  CHECK(p.n_cuts == 1);

  p = edge_profile(one_cut);
  CHECK(p.leading().chi_b == 0.0);
  CHECK(p.leading().m == 1);
  CHECK(p.n_cuts == 1);

  CHECK_THROWS_AS(edge_profile(HoppingCoefficients({0.0})), DegenerateEdge);
}

TEST_CASE("profile invariants hold at every maximizer") {
  for (const auto &c : {two_cut, multicritical, one_cut, left_split}) {
    const EdgeProfile p = edge_profile(c);
    for (const Maximizer &mx : p.maximizers) {
      CHECK(std::abs(eval_dispersion(c, mx.chi_b) - p.b) < 1e-10);
      for (unsigned q = 1; q < 2u * mx.m; ++q)
        CHECK(std::abs(eval_dispersion(c, mx.chi_b, q)) < 1e-9 * dispersion_scale(c, q));
      CHECK(eval_dispersion(c, mx.chi_b, 2 * mx.m) < 0.0);
      CHECK(mx.d > 0.0);
    }
  }
}

TEST_CASE("limit density examples and bounds") {
  CHECK(limit_density(HoppingCoefficients({1.0}), 0.0) == doctest::Approx(0.5));
  CHECK(limit_density(two_cut, 5.0) == 0.0);
  CHECK(limit_density(two_cut, -5.0) == 1.0);

  // Near the two-cut edge: (2/pi) sqrt((b - x)/d) and the closed form
  // (2/pi) sqrt(8 gamma / (1 - 64 gamma^2)) sqrt(b - x) agree.
  const double b = 41.0 / 24.0, d = 55.0 / 24.0, g = -1.0 / 3.0;
  CHECK(std::sqrt(1.0 / d) == doctest::Approx(std::sqrt(8 * g / (1 - 64 * g * g))).epsilon(1e-12));
  for (double eps : {1e-4, 1e-5}) {
    const double rho = limit_density(two_cut, b - eps);
    CHECK(rho == doctest::Approx(2 / std::numbers::pi * std::sqrt(eps / d)).epsilon(1e-2));
  }
  const double rho = limit_density(multicritical, 1.49);
  CHECK(rho == doctest::Approx(std::sqrt(2.0) / std::numbers::pi * std::pow(0.01, 0.25)).epsilon(0.05));

  for (int i = 0; i <= 100; ++i) {
    const double x = -4.0 + 6.0 * i / 100.0;
    const double r = limit_density(two_cut, x);
    CHECK(r >= 0.0);
    CHECK(r <= 1.0);
  }
}

TEST_CASE("vanishing exponent at the edge equals 1/(2m)") {
  for (const auto &c : {two_cut, multicritical, one_cut, left_split}) {
    const EdgeProfile p = edge_profile(c);
    // Least squares slope of log rho against log(b - x).
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = 20;
    for (int i = 0; i < n; ++i) {
      const double eps = std::pow(10.0, -2.0 - 2.0 * i / (n - 1));
      const double lx = std::log(eps), ly = std::log(limit_density(c, p.b - eps));
      sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope == doctest::Approx(1.0 / (2 * p.min_order())).epsilon(0.05));
  }
}

TEST_CASE("limit shape examples") {
  const HoppingCoefficients c({1.0});
  CHECK(limit_shape(c, 2.0) == doctest::Approx(2.0));
  CHECK(limit_shape(c, -2.0) == doctest::Approx(2.0));
  CHECK(std::abs(limit_shape(two_cut, -10.0 / 3.0) - 10.0 / 3.0) < 1e-8);
  CHECK(std::abs(limit_shape(two_cut, 41.0 / 24.0) - 41.0 / 24.0) < 1e-8);
}

TEST_CASE("limit shape is 1-Lipschitz and dominates |x|") {
  double prev = limit_shape(two_cut, -4.0);
  for (int i = 1; i <= 80; ++i) {
    const double x = -4.0 + 6.0 * i / 80.0;
    const double cur = limit_shape(two_cut, x);
    CHECK(std::abs(cur - prev) <= 6.0 / 80.0 + 1e-9);
    CHECK(cur >= std::abs(x) - 1e-9);
    prev = cur;
  }
}

TEST_CASE("density continuity near the edge") {
  // |rho(x+h) - rho(x)| <= C h^{1/(2m)} with C frozen from a reference run.
  const EdgeProfile p = edge_profile(two_cut);
  const double C = 1.0;
  for (double h : {1e-2, 1e-3, 1e-4}) {
    const double jump = std::abs(limit_density(two_cut, p.b - h) - limit_density(two_cut, p.b));
    CHECK(jump <= C * std::pow(h, 0.5));
  }
}

TEST_CASE("cut counting") {
  CHECK(count_cuts({}) == 0);
  CHECK(count_cuts({0.0, std::numbers::pi}) == 0);
  CHECK(count_cuts({0.0, 1.0}) == 1);
  CHECK(count_cuts({0.5, 1.0}) == 2);
  CHECK(count_cuts({0.0, 1.0, 2.0, std::numbers::pi}) == 2);
}
