#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "splitsea/dpp_sampler.hpp"
#include "splitsea/edge_distribution.hpp"
#include "splitsea/errors.hpp"
#include "splitsea/parallel.hpp"

using namespace splitsea;

TEST_CASE("toy projection DPP matches exact subset probabilities") {
  // Projection onto two random orthonormal vectors in R^6.
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd A(6, 2);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 2; ++j)
      A(i, j) = gauss(rng);
  const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(A).householderQ() * Eigen::MatrixXd::Identity(6, 2);
  const Eigen::MatrixXd K = Q * Q.transpose();
  const WindowedKernel wk(Window{Site{0}, Site{5}}, K);

  const std::uint64_t n = 200000;
  std::map<unsigned, std::uint64_t> seen;
  for (std::uint64_t s = 0; s < n; ++s) {
    unsigned mask = 0;
    for (Site k : sample(wk, 99, s))
      mask |= 1u << k.index;
    ++seen[mask];
  }
  double tv = 0.0;
  for (unsigned mask = 0; mask < 64; ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < 6; ++i)
      if (mask & (1u << i))
        idx.push_back(i);
    double exact = 0.0;
    if (idx.size() == 2) {
      Eigen::Matrix2d m;
      m << K(idx[0], idx[0]), K(idx[0], idx[1]), K(idx[1], idx[0]), K(idx[1], idx[1]);
      exact = m.determinant();
    }
    const double emp = static_cast<double>(seen[mask]) / static_cast<double>(n);
    tv += 0.5 * std::abs(emp - exact);
  }
  CHECK(tv < 0.01);
}

TEST_CASE("windowed kernel") {
  const HoppingCoefficients c({1.0, -1.0 / 3.0}, 50.0);
  const WindowedKernel wk = windowed_kernel(c);
  CHECK(wk.leakage() < 1e-6);
  CHECK(std::abs(wk.matrix().trace() - wk.eigenvalues().sum()) < 1e-9);
  CHECK(wk.eigenvalues().minCoeff() >= 0.0);
  CHECK(wk.eigenvalues().maxCoeff() <= 1.0);
  CHECK((wk.matrix() - wk.matrix().transpose()).cwiseAbs().maxCoeff() < 1e-12);
  const CoefficientBand band(c);
  for (std::int64_t i = 0; i < wk.window().size(); i += 17)
    CHECK(std::abs(wk.matrix()(i, i) - kernel_eval(band, wk.window().lo + i, wk.window().lo + i)) < 1e-12);
  CHECK_THROWS_AS(WindowedKernel(band, Window{Site{-5}, Site{5}}, 1e-6), LeakageTooLarge);
}

TEST_CASE("small theta gives the domain wall") {
  const HoppingCoefficients c({1.0, -1.0 / 3.0}, 1e-9);
  const WindowedKernel wk = windowed_kernel(c);
  CHECK(wk.window().lo.index == -2);
  CHECK(wk.window().hi.index == 1);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const std::vector<Site> config = sample(wk, 1, s);
    CHECK(config == std::vector<Site>{Site{-2}, Site{-1}});
  }
  const EdgeLawReport law = empirical_edge_law(c, 50, 3);
  for (Site k : law.k_max)
    CHECK(k.value() == -0.5);
  CHECK(law.ks_exact < 1e-12);
}

TEST_CASE("one-point and two-point statistics") {
  const HoppingCoefficients c({1.0}, 30.0);
  const WindowedKernel wk = windowed_kernel(c);
  const std::uint64_t n = 20000;
  const auto width = static_cast<std::size_t>(wk.window().size());
  // Pairs straddling the bulk, as window offsets.
  const auto centre = static_cast<std::size_t>(-wk.window().lo.index);
  const std::pair<std::size_t, std::size_t> pairs[] = {
      {centre, centre + 1}, {centre - 3, centre + 2}, {centre + 10, centre + 12}};
  std::vector<std::uint64_t> hits(width, 0), both(3, 0);
  std::vector<char> occupied(width);
  for (std::uint64_t s = 0; s < n; ++s) {
    std::fill(occupied.begin(), occupied.end(), 0);
    for (Site k : sample(wk, 2024, s))
      occupied[static_cast<std::size_t>(k - wk.window().lo)] = 1;
    for (std::size_t i = 0; i < width; ++i)
      hits[i] += static_cast<std::uint64_t>(occupied[i]);
    for (std::size_t p = 0; p < 3; ++p)
      both[p] += occupied[pairs[p].first] && occupied[pairs[p].second];
  }
  int good = 0;
  for (std::size_t i = 0; i < width; ++i) {
    const double p = wk.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
    const double se = std::sqrt(std::max(p * (1.0 - p), 1e-300) / static_cast<double>(n));
    if (std::abs(static_cast<double>(hits[i]) / static_cast<double>(n) - p) <= 3.0 * se + 1e-12)
      ++good;
  }
  CHECK(static_cast<double>(good) >= 0.95 * static_cast<double>(width));
  // sample_many reproduces the same counts.
  const SampleStats stats = sample_many(wk, 500, 2024);
  std::vector<std::uint64_t> first(width, 0);
  for (std::uint64_t s = 0; s < 500; ++s)
    for (Site k : sample(wk, 2024, s))
      ++first[static_cast<std::size_t>(k - wk.window().lo)];
  for (std::size_t i = 0; i < width; ++i)
    CHECK(stats.density[i] == static_cast<double>(first[i]) / 500.0);

  for (std::size_t p = 0; p < 3; ++p) {
    const auto a = static_cast<Eigen::Index>(pairs[p].first);
    const auto b = static_cast<Eigen::Index>(pairs[p].second);
    const double exact = wk.matrix()(a, a) * wk.matrix()(b, b) - wk.matrix()(a, b) * wk.matrix()(a, b);
    const double emp = static_cast<double>(both[p]) / static_cast<double>(n);
    const double se = std::sqrt(exact * (1.0 - exact) / static_cast<double>(n));
    CHECK(std::abs(emp - exact) <= 4.0 * se);
  }
}

TEST_CASE("number variance does not exceed the mean") {
  const HoppingCoefficients c({1.0, -1.0 / 3.0}, 20.0);
  const WindowedKernel wk = windowed_kernel(c);
  const std::uint64_t n = 4000;
  for (std::int64_t cut : {std::int64_t{0}, std::int64_t{15}, std::int64_t{30}}) {
    double sum = 0, sum2 = 0;
    for (std::uint64_t s = 0; s < n; ++s) {
      double count = 0;
      for (Site k : sample(wk, 77, s))
        count += k.index >= cut ? 1.0 : 0.0;
      sum += count;
      sum2 += count * count;
    }
    const double mean = sum / static_cast<double>(n);
    const double var = sum2 / static_cast<double>(n) - mean * mean;
    // Generous allowance for the sampling error of the variance.
    CHECK(var <= mean + 4.0 * std::sqrt(2.0 / static_cast<double>(n)) * std::max(mean, 1.0));
  }
}

TEST_CASE("sampling is reproducible and thread-count independent") {
  const HoppingCoefficients c({1.0, 0.1}, 15.0);
  const WindowedKernel wk = windowed_kernel(c);
  const std::size_t saved = thread_count();
  set_thread_count(1);
  const SampleStats one = sample_many(wk, 300, 42);
  set_thread_count(4);
  const SampleStats four = sample_many(wk, 300, 42);
  set_thread_count(saved);
  CHECK(one.k_max == four.k_max);
  CHECK(one.density == four.density);
  CHECK(sample(wk, 42, 7) == sample(wk, 42, 7));
  CHECK(sample(wk, 42, 7) != sample(wk, 43, 7));
}

TEST_CASE("empirical edge law against the exact law") {
  const HoppingCoefficients c({1.0, -1.0 / 3.0}, 40.0);
  const std::uint64_t n = 5000;
  const EdgeLawReport law = empirical_edge_law(c, n, 11);
  CHECK(law.m == 1);
  CHECK(law.n_cuts == 2);
  CHECK(law.ks_exact < 1.63 / std::sqrt(static_cast<double>(n)));
  CHECK(law.ks_limit < 0.1);
  CHECK(law.scaled.size() == n);
}

TEST_CASE("ks against a table") {
  const std::vector<Site> pts{Site{0}, Site{1}, Site{1}, Site{3}};
  // P(k_max < ell) for ell = 0..4 of exactly this empirical law.
  CHECK(ks_against_table(pts, {0.0, 0.25, 0.75, 0.75, 1.0}) < 1e-15);
  CHECK(ks_against_table(pts, {0.0, 0.25, 0.5, 0.75, 1.0}) == doctest::Approx(0.25));
}

TEST_CASE("limit shape deviation shrinks with theta") {
  const HoppingCoefficients base({1.0, -1.0 / 3.0});
  const ShapeDeviation small = limit_shape_deviation(base.with_theta(50.0), 40, 8);
  const ShapeDeviation large = limit_shape_deviation(base.with_theta(200.0), 40, 8);
  CHECK(large.percentile90 < small.percentile90);
  CHECK(small.leakage < 1e-6);
  CHECK(large.per_sample.size() == 40);
  CHECK_THROWS_AS(limit_shape_deviation(base.with_theta(0.0), 10, 1), ConfigError);
  const ShapeDeviation wall = limit_shape_deviation(base.with_theta(1e-3), 5, 1);
  for (double v : wall.per_sample)
    CHECK(v == wall.per_sample.front());
}
