#include "splitsea/dpp_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "splitsea/airy.hpp"
#include "splitsea/edge_distribution.hpp"
#include "splitsea/errors.hpp"
#include "splitsea/parallel.hpp"

namespace splitsea {

Window auto_window(const HoppingCoefficients &coeffs) {
  const EdgeProfile profile = edge_profile(coeffs);
  const double theta = coeffs.theta();
  const double left = -profile.b_tilde * theta - 10.0 * std::sqrt(theta);
  const double right = profile.b * theta + 10.0 * profile.edge_scale(theta);
  Window w;
  w.lo = Site{std::min<std::int64_t>(-2, static_cast<std::int64_t>(std::floor(left - 0.5)))};
  w.hi = Site{std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(right - 0.5)))};
  return w;
}

WindowedKernel::WindowedKernel(const CoefficientBand &band, Window window, double max_leakage)
    : window_(window) {
  if (window.size() <= 0)
    throw ConfigError("window must contain at least one site");
  // 1 - K(k,k) = sum_{n <= k} J_n^2 and K(k,k) = sum_{n > k} J_n^2 (k as index).
  const std::int64_t N = band.half_width();
  const std::int64_t lo = window.lo.index;
  const std::int64_t hi = window.hi.index;
  for (std::int64_t n = -N; n <= N; ++n) {
    const double j2 = band[n] * band[n];
    if (n < lo)
      leakage_ += j2 * static_cast<double>(lo - n);
    if (n >= hi + 2)
      leakage_ += j2 * static_cast<double>(n - hi - 1);
  }
  if (max_leakage > 0.0 && leakage_ > max_leakage) {
    std::ostringstream msg;
    msg << "window leakage " << leakage_ << " exceeds " << max_leakage;
    throw LeakageTooLarge(msg.str());
  }
  matrix_ = kernel_window(band, window.lo, window.size());
  decompose();
}

WindowedKernel::WindowedKernel(Window window, Eigen::MatrixXd matrix)
    : window_(window), matrix_(std::move(matrix)) {
  if (window.size() <= 0 || matrix_.rows() != window.size() || matrix_.cols() != window.size())
    throw ConfigError("kernel matrix does not match the window");
  if ((matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw ConfigError("kernel matrix is not symmetric");
  decompose();
}

void WindowedKernel::decompose() {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix_);
  if (solver.info() != Eigen::Success)
    throw SolverFailure("eigendecomposition of the windowed kernel failed");
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
  for (Eigen::Index i = 0; i < eigenvalues_.size(); ++i) {
    double &l = eigenvalues_(i);
    if (l < -1e-9 || l > 1.0 + 1e-9) {
      std::ostringstream msg;
      msg << "kernel eigenvalue " << l << " outside [0, 1]";
      throw SolverFailure(msg.str());
    }
    l = std::clamp(l, 0.0, 1.0);
  }
}

WindowedKernel windowed_kernel(const HoppingCoefficients &coeffs) {
  return WindowedKernel(CoefficientBand(coeffs), auto_window(coeffs), 1e-6);
}

std::mt19937_64 sample_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

std::vector<Site> sample(const WindowedKernel &wk, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Eigen::VectorXd &lambda = wk.eigenvalues();
  std::vector<Eigen::Index> chosen;
  for (Eigen::Index j = 0; j < lambda.size(); ++j)
    if (unif(rng) < lambda(j))
      chosen.push_back(j);
  const auto n = static_cast<Eigen::Index>(wk.window().size());
  const auto k = static_cast<Eigen::Index>(chosen.size());
  Eigen::MatrixXd V(n, k);
  for (Eigen::Index c = 0; c < k; ++c)
    V.col(c) = wk.eigenvectors().col(chosen[static_cast<std::size_t>(c)]);

  // Sequential sampling from the projection kernel V V^T; C holds the
  // Gram-Schmidt directions of the points already placed.
  Eigen::VectorXd d = V.rowwise().squaredNorm();
  Eigen::MatrixXd C(n, k);
  std::vector<Site> out;
  out.reserve(static_cast<std::size_t>(k));
  for (Eigen::Index t = 0; t < k; ++t) {
    const double total = d.sum();
    double u = unif(rng) * total;
    Eigen::Index i = 0;
    for (; i < n - 1; ++i) {
      u -= d(i);
      if (u < 0.0)
        break;
    }
    while (d(i) <= 0.0 && i > 0)
      --i;
    out.push_back(wk.window().lo + i);
    Eigen::VectorXd v = V * V.row(i).transpose();
    if (t > 0)
      v.noalias() -= C.leftCols(t) * C.row(i).leftCols(t).transpose();
    v /= std::sqrt(d(i));
    C.col(t) = v;
    d -= v.cwiseAbs2();
    d(i) = 0.0;
    d = d.cwiseMax(0.0);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Site> sample(const WindowedKernel &wk, std::uint64_t seed, std::uint64_t index) {
  std::mt19937_64 rng = sample_stream(seed, index);
  return sample(wk, rng);
}

Site top_particle(const WindowedKernel &wk, const std::vector<Site> &config) {
  return config.empty() ? wk.window().lo - 1 : config.back();
}

SampleStats sample_many(const WindowedKernel &wk, std::uint64_t n_samples, std::uint64_t seed) {
  SampleStats stats;
  stats.n_samples = n_samples;
  stats.seed = seed;
  stats.window = wk.window();
  const auto width = static_cast<std::size_t>(wk.window().size());
  stats.k_max.resize(n_samples);
  const std::size_t blocks = std::max<std::size_t>(1, std::min<std::size_t>(thread_count() * 4, n_samples));
  std::vector<std::vector<std::uint64_t>> counts(blocks, std::vector<std::uint64_t>(width, 0));
  parallel_for(blocks, [&](std::size_t b) {
    const std::uint64_t lo = n_samples * b / blocks;
    const std::uint64_t hi = n_samples * (b + 1) / blocks;
    for (std::uint64_t s = lo; s < hi; ++s) {
      const std::vector<Site> config = sample(wk, seed, s);
      for (Site k : config)
        ++counts[b][static_cast<std::size_t>(k - wk.window().lo)];
      stats.k_max[s] = top_particle(wk, config);
    }
  });
  stats.density.assign(width, 0.0);
  for (std::size_t i = 0; i < width; ++i) {
    std::uint64_t c = 0;
    for (const auto &block : counts)
      c += block[i];
    stats.density[i] = n_samples ? static_cast<double>(c) / static_cast<double>(n_samples) : 0.0;
  }
  return stats;
}

double ks_against_table(const std::vector<Site> &k_max, const std::vector<double> &p) {
  if (k_max.empty())
    return 0.0;
  std::vector<std::int64_t> idx;
  idx.reserve(k_max.size());
  for (Site k : k_max)
    idx.push_back(k.index);
  std::sort(idx.begin(), idx.end());
  const double n = static_cast<double>(idx.size());
  double ks = 0.0;
  std::size_t below = 0;
  // k_max < ell  <=>  index < ell.
  const auto top = std::max<std::int64_t>(static_cast<std::int64_t>(p.size()), idx.back() + 2);
  for (std::int64_t ell = std::min<std::int64_t>(0, idx.front()); ell < top; ++ell) {
    while (below < idx.size() && idx[below] < ell)
      ++below;
    double exact = 1.0;
    if (ell < 0)
      exact = 0.0;
    else if (ell < static_cast<std::int64_t>(p.size()))
      exact = p[static_cast<std::size_t>(ell)];
    ks = std::max(ks, std::abs(static_cast<double>(below) / n - exact));
  }
  return ks;
}

EdgeLawReport empirical_edge_law(const HoppingCoefficients &coeffs, std::uint64_t n_samples,
                                 std::uint64_t seed) {
  const WindowedKernel wk = windowed_kernel(coeffs);
  const SampleStats stats = sample_many(wk, n_samples, seed);
  const EdgeProfile profile = edge_profile(coeffs);
  EdgeLawReport report;
  report.k_max = stats.k_max;
  report.m = profile.leading().m;
  report.n_cuts = profile.n_cuts;
  const double theta = coeffs.theta();
  std::int64_t top = 0;
  for (Site k : stats.k_max)
    top = std::max(top, k.index + 2);
  report.ks_exact = ks_against_table(stats.k_max, toeplitz_cdf_prefix(coeffs, top));
  if (!(theta > 0.0)) {
    report.ks_limit = std::numeric_limits<double>::quiet_NaN();
    return report;
  }
  const double scale = profile.edge_scale(theta);
  const double centre = profile.b * theta;
  for (Site k : stats.k_max)
    report.scaled.push_back((k.value() - centre) / scale);
  std::vector<std::int64_t> idx;
  for (Site k : stats.k_max)
    idx.push_back(k.index);
  std::sort(idx.begin(), idx.end());
  const AiryOrder order(report.m);
  const auto lo = static_cast<std::int64_t>(std::floor(centre - 6.0 * scale));
  const auto hi = static_cast<std::int64_t>(std::ceil(centre + 4.0 * scale));
  std::vector<double> limit(static_cast<std::size_t>(hi - lo + 1));
  parallel_for(limit.size(), [&](std::size_t i) {
    const double s = (static_cast<double>(lo + static_cast<std::int64_t>(i)) - centre) / scale;
    limit[i] = limiting_cdf(order, report.n_cuts, s);
  });
  std::size_t below = 0;
  for (std::int64_t ell = lo; ell <= hi; ++ell) {
    while (below < idx.size() && idx[below] < ell)
      ++below;
    const double emp = static_cast<double>(below) / static_cast<double>(idx.size());
    report.ks_limit = std::max(report.ks_limit, std::abs(emp - limit[static_cast<std::size_t>(ell - lo)]));
  }
  return report;
}

ShapeDeviation limit_shape_deviation(const HoppingCoefficients &coeffs, std::uint64_t n_samples,
                                     std::uint64_t seed) {
  const double theta = coeffs.theta();
  if (!(theta > 0.0))
    throw ConfigError("limit_shape_deviation needs theta > 0");
  const WindowedKernel wk = windowed_kernel(coeffs);
  const std::int64_t lo = wk.window().lo.index;
  const std::int64_t hi = wk.window().hi.index + 1;
  std::vector<double> expected(static_cast<std::size_t>(hi - lo + 1));
  parallel_for(expected.size(), [&](std::size_t i) {
    expected[i] = tail_mass(coeffs, static_cast<double>(lo + static_cast<std::int64_t>(i)) / theta);
  });
  ShapeDeviation out;
  out.leakage = wk.leakage();
  out.per_sample.resize(n_samples);
  parallel_for(n_samples, [&](std::size_t s) {
    const std::vector<Site> config = sample(wk, seed, s);
    // N(n) counts occupied window sites above n; walk n downward.
    double worst = 0.0;
    std::size_t above = 0;
    std::size_t next = config.size();
    for (std::int64_t n = hi; n >= lo; --n) {
      while (next > 0 && config[next - 1].value() > static_cast<double>(n)) {
        --next;
        ++above;
      }
      const double dev = std::abs(static_cast<double>(above) / theta -
                                  expected[static_cast<std::size_t>(n - lo)]);
      worst = std::max(worst, dev);
    }
    out.per_sample[s] = worst;
  });
  std::vector<double> sorted = out.per_sample;
  std::sort(sorted.begin(), sorted.end());
  if (!sorted.empty()) {
    const auto rank = static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(sorted.size())));
    out.percentile90 = sorted[std::max<std::size_t>(rank, 1) - 1];
  }
  return out;
}

} // namespace splitsea
