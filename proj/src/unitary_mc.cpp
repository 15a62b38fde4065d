#include "splitsea/unitary_mc.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

#include "splitsea/edge_distribution.hpp"
#include "splitsea/errors.hpp"

namespace splitsea {

double DensityCurve::integral() const {
  if (alphas.size() < 2)
    return 0.0;
  double sum = 0.0;
  for (double r : rho)
    sum += r;
  return sum * 2.0 * std::numbers::pi / static_cast<double>(rho.size());
}

namespace {

void require_supercritical(const HoppingCoefficients &coeffs, double x) {
  const double b = global_extrema(coeffs).b;
  if (x < b * (1.0 - 1e-12)) {
    std::ostringstream msg;
    msg << "x = " << x << " is below the edge b = " << b;
    throw SubcriticalPhase(msg.str());
  }
}

double density_formula(const HoppingCoefficients &coeffs, double x, double alpha) {
  return (1.0 - eval_dispersion(coeffs, alpha - std::numbers::pi) / x) / (2.0 * std::numbers::pi);
}

} // namespace

double eigen_density_supercritical(const HoppingCoefficients &coeffs, double x, double alpha) {
  require_supercritical(coeffs, x);
  return density_formula(coeffs, x, alpha);
}

DensityCurve density_curve(const HoppingCoefficients &coeffs, double x, std::size_t n_points) {
  if (n_points < 8)
    throw ConfigError("density_curve: need at least 8 points");
  require_supercritical(coeffs, x);
  DensityCurve curve;
  curve.alphas.resize(n_points);
  curve.rho.resize(n_points);
  double peak = 0.0;
  for (std::size_t i = 0; i < n_points; ++i) {
    const double a = -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(i) / n_points;
    curve.alphas[i] = a;
    curve.rho[i] = density_formula(coeffs, x, a);
    peak = std::max(peak, curve.rho[i]);
  }
  const double floor = 1e-3 * peak;
  std::vector<bool> low(n_points);
  for (std::size_t i = 0; i < n_points; ++i)
    low[i] = curve.rho[i] < floor;
  // Start scanning right after a non-low point so arcs through pi stay whole.
  std::size_t start = 0;
  while (start < n_points && low[start])
    ++start;
  if (start == n_points) {
    curve.support_cuts.emplace_back(-std::numbers::pi, std::numbers::pi);
    return curve;
  }
  for (std::size_t step = 1; step <= n_points; ++step) {
    const std::size_t i = (start + step) % n_points;
    if (low[i] && !low[(i + n_points - 1) % n_points]) {
      std::size_t j = i;
      while (low[(j + 1) % n_points])
        j = (j + 1) % n_points;
      curve.support_cuts.emplace_back(curve.alphas[i], curve.alphas[j]);
    }
  }
  return curve;
}

double angle_potential(const HoppingCoefficients &coeffs, double alpha) {
  double s = 0.0;
  for (std::size_t r = 1; r <= coeffs.degree(); ++r) {
    const double sign = (r % 2 == 0) ? 1.0 : -1.0;
    s += sign * coeffs.gamma(r) * std::cos(static_cast<double>(r) * alpha);
  }
  return -2.0 * coeffs.theta() * s;
}

double angle_potential_polynomial(const HoppingCoefficients &coeffs, double alpha) {
  auto V = [&](std::complex<double> z) {
    std::complex<double> acc = 0.0;
    std::complex<double> zr = 1.0;
    for (std::size_t r = 1; r <= coeffs.degree(); ++r) {
      zr *= z;
      acc += coeffs.gamma(r) * zr;
    }
    return acc;
  };
  const std::complex<double> u = std::polar(1.0, alpha);
  return -coeffs.theta() * (V(-u) + V(-1.0 / u)).real();
}

double log_joint_density(const HoppingCoefficients &coeffs, const std::vector<double> &angles) {
  double total = 0.0;
  for (std::size_t j = 0; j < angles.size(); ++j) {
    total += angle_potential(coeffs, angles[j]);
    for (std::size_t k = j + 1; k < angles.size(); ++k) {
      const double s = std::abs(std::sin(0.5 * (angles[j] - angles[k])));
      if (s == 0.0)
        throw CoincidentAngles("two eigenvalue angles coincide");
      total += 2.0 * std::log(s);
    }
  }
  return total;
}

bool metropolis_accept(double log_ratio, std::mt19937_64 &rng) {
  if (log_ratio >= 0.0)
    return true;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  return std::log(unif(rng)) < log_ratio;
}

double detail::wrap_angle(double a) {
  const double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a + std::numbers::pi, two_pi);
  if (a < 0.0)
    a += two_pi;
  return a - std::numbers::pi;
}

double detail::single_angle_delta(const HoppingCoefficients &coeffs, const std::vector<double> &angles,
                                  std::size_t j, double proposal) {
  double delta = angle_potential(coeffs, proposal) - angle_potential(coeffs, angles[j]);
  for (std::size_t k = 0; k < angles.size(); ++k) {
    if (k == j)
      continue;
    const double s_new = std::abs(std::sin(0.5 * (proposal - angles[k])));
    if (s_new == 0.0)
      return -std::numeric_limits<double>::infinity();
    delta += 2.0 * (std::log(s_new) - std::log(std::abs(std::sin(0.5 * (angles[j] - angles[k])))));
  }
  return delta;
}

double AngleHistogram::at(double alpha) const {
  const double a = detail::wrap_angle(alpha);
  const std::size_t bins = density.size();
  auto i = static_cast<std::size_t>((a + std::numbers::pi) / (2.0 * std::numbers::pi) * bins);
  return density[std::min(i, bins - 1)];
}

AngleHistogram unitary_histogram(const HoppingCoefficients &coeffs, int ell, const ChainOptions &opts,
                                 std::size_t bins) {
  if (bins < 4)
    throw ConfigError("unitary_histogram: need at least 4 bins");
  std::vector<std::uint64_t> counts(bins, 0);
  std::uint64_t total = 0;
  AngleHistogram hist;
  hist.chain = metropolis_chain(coeffs, ell, opts, [&](const EigenSample &s) {
    for (double a : s.angles) {
      auto i = static_cast<std::size_t>((a + std::numbers::pi) / (2.0 * std::numbers::pi) * bins);
      ++counts[std::min(i, bins - 1)];
      ++total;
    }
  });
  const double width = 2.0 * std::numbers::pi / static_cast<double>(bins);
  hist.centres.resize(bins);
  hist.density.resize(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    hist.centres[i] = -std::numbers::pi + width * (static_cast<double>(i) + 0.5);
    hist.density[i] = total ? static_cast<double>(counts[i]) / (static_cast<double>(total) * width) : 0.0;
  }
  return hist;
}

double dip_ratio(const AngleHistogram &hist, double chi_b) {
  const double dips = 0.5 * (hist.at(std::numbers::pi + chi_b) + hist.at(std::numbers::pi - chi_b));
  const double centre = hist.at(0.0);
  return centre > 0.0 ? dips / centre : std::numeric_limits<double>::infinity();
}

double partition_function_toeplitz(const HoppingCoefficients &coeffs, std::int64_t ell) {
  const double th = coeffs.theta();
  return std::exp(th * th * coeffs.miwa_norm()) * toeplitz_cdf(coeffs, ell);
}

double partition_function_quadrature(const HoppingCoefficients &coeffs, int ell) {
  if (ell != 1 && ell != 2)
    throw ConfigError("direct quadrature is limited to ell in {1, 2}");
  auto trapezoid = [&](int M) {
    std::vector<double> a(static_cast<std::size_t>(M));
    std::vector<double> w(static_cast<std::size_t>(M));
    for (int j = 0; j < M; ++j) {
      a[static_cast<std::size_t>(j)] = 2.0 * std::numbers::pi * j / M;
      w[static_cast<std::size_t>(j)] = std::exp(angle_potential(coeffs, a[static_cast<std::size_t>(j)]));
    }
    // sum_ij w_i w_j 4 sin^2((a_i - a_j)/2) = 2 |sum w|^2 - 2 |sum w e^{ia}|^2.
    double w0 = 0.0, c1 = 0.0, s1 = 0.0;
    for (int j = 0; j < M; ++j) {
      const double v = w[static_cast<std::size_t>(j)];
      w0 += v;
      c1 += v * std::cos(a[static_cast<std::size_t>(j)]);
      s1 += v * std::sin(a[static_cast<std::size_t>(j)]);
    }
    w0 /= M;
    if (ell == 1)
      return w0;
    c1 /= M;
    s1 /= M;
    // 1/2! of the normalised double integral.
    return w0 * w0 - (c1 * c1 + s1 * s1);
  };
  double prev = trapezoid(32);
  for (int M = 64; M <= 8192; M *= 2) {
    const double cur = trapezoid(M);
    if (std::abs(cur - prev) <= 1e-14 * std::abs(cur))
      return cur;
    prev = cur;
  }
  throw NoConvergence("Weyl integral quadrature did not settle");
}

} // namespace splitsea
