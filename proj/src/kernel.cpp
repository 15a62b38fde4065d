#include "splitsea/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <sstream>

#include <fftw3.h>

#include "splitsea/airy.hpp"
#include "splitsea/errors.hpp"
#include "fftw_lock.hpp"

namespace splitsea {

namespace {

using cplx = std::complex<double>;

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n)
    p <<= 1;
  return p;
}

// Forward DFT of samples, divided by the size (Laurent coefficients).
std::vector<cplx> laurent_fft(std::vector<cplx> samples) {
  const int G = static_cast<int>(samples.size());
  std::vector<cplx> out(samples.size());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    plan = fftw_plan_dft_1d(G, reinterpret_cast<fftw_complex *>(samples.data()),
                            reinterpret_cast<fftw_complex *>(out.data()), FFTW_FORWARD,
                            FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  for (auto &c : out)
    c /= static_cast<double>(G);
  return out;
}

// exp(theta sum_r gamma_r (z^r - z^-r)) for complex z.
cplx laurent_symbol(const HoppingCoefficients &coeffs, cplx z) {
  cplx acc = 0.0;
  cplx zr = 1.0;
  for (std::size_t r = 1; r <= coeffs.degree(); ++r) {
    zr *= z;
    acc += coeffs.gamma(r) * (zr - 1.0 / zr);
  }
  return std::exp(coeffs.theta() * acc);
}

} // namespace

std::mutex &detail::fftw_planner_mutex() {
  static std::mutex mu;
  return mu;
}

CoefficientBand::CoefficientBand(const HoppingCoefficients &coeffs) : coeffs_(coeffs) {
  const double width = coeffs.theta() * coeffs.band_scale();
  std::size_t G = next_pow2(8 * (static_cast<std::size_t>(std::ceil(width)) + 64));
  for (int attempt = 0; attempt < 4; ++attempt, G *= 2) {
    std::vector<cplx> samples(G);
    for (std::size_t j = 0; j < G; ++j) {
      const double phi = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(G);
      double arg = 0.0;
      for (std::size_t r = 1; r <= coeffs.degree(); ++r)
        arg += coeffs.gamma(r) * std::sin(static_cast<double>(r) * phi);
      samples[j] = std::polar(1.0, 2.0 * coeffs.theta() * arg);
    }
    const std::vector<cplx> c = laurent_fft(std::move(samples));
    const auto N = static_cast<std::int64_t>(G / 2 - 1);
    auto at = [&](std::int64_t n) { return c[static_cast<std::size_t>((n + static_cast<std::int64_t>(G)) % static_cast<std::int64_t>(G))]; };
    double tail = 0.0;
    double imag = 0.0;
    for (std::int64_t n = -N; n <= N; ++n) {
      imag = std::max(imag, std::abs(at(n).imag()));
      if (std::abs(n) >= N - 8)
        tail = std::max(tail, std::abs(at(n)));
    }
    if (tail >= 1e-15 || imag > 1e-13)
      continue;
    // Trim to the significant part plus a margin.
    std::int64_t last = 0;
    for (std::int64_t n = -N; n <= N; ++n)
      if (std::abs(at(n).real()) > 1e-17)
        last = std::max(last, std::abs(n));
    half_width_ = std::min(N, last + 16);
    J_.resize(static_cast<std::size_t>(2 * half_width_ + 1));
    for (std::int64_t n = -half_width_; n <= half_width_; ++n)
      J_[static_cast<std::size_t>(n + half_width_)] = at(n).real();
    return;
  }
  throw BandTooNarrow("Laurent coefficients not captured on a grid of " + std::to_string(G / 2));
}

double CoefficientBand::tail() const noexcept {
  double t = 0.0;
  for (std::int64_t n = -half_width_; n <= half_width_; ++n)
    if (std::abs(n) >= half_width_ - 8)
      t = std::max(t, std::abs((*this)[n]));
  return t;
}

double CoefficientBand::parseval_sum() const noexcept {
  double s = 0.0;
  for (double j : J_)
    s += j * j;
  return s;
}

CoefficientBand coefficient_band(const HoppingCoefficients &coeffs) { return CoefficientBand(coeffs); }

double kernel_eval(const CoefficientBand &band, Site k, Site l) {
  // K = sum_{j >= 0} J_{a+j+1} J_{b+j+1} with a, b the site indices.
  const std::int64_t N = band.half_width();
  const std::int64_t a = k.index + 1;
  const std::int64_t b = l.index + 1;
  const std::int64_t start = std::max<std::int64_t>({0, -N - a, -N - b});
  const std::int64_t stop = std::min(N - a, N - b);
  double sum = 0.0;
  for (std::int64_t j = start; j <= stop; ++j)
    sum += band[a + j] * band[b + j];
  return sum;
}

Eigen::MatrixXd kernel_matrix(const CoefficientBand &band, const std::vector<Site> &sites) {
  const auto n = static_cast<Eigen::Index>(sites.size());
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      K(i, j) = kernel_eval(band, sites[static_cast<std::size_t>(i)], sites[static_cast<std::size_t>(j)]);
      K(j, i) = K(i, j);
    }
  return K;
}

Eigen::MatrixXd kernel_window(const CoefficientBand &band, Site first, std::int64_t size) {
  const auto n = static_cast<Eigen::Index>(size);
  Eigen::MatrixXd K(n, n);
  if (n == 0)
    return K;
  const Site top = first + (size - 1);
  for (Eigen::Index j = 0; j < n; ++j) {
    K(n - 1, j) = kernel_eval(band, top, first + j);
    K(j, n - 1) = K(n - 1, j);
  }
  const std::int64_t base = first.index;
  for (Eigen::Index i = n - 2; i >= 0; --i)
    for (Eigen::Index j = i; j >= 0; --j) {
      K(i, j) = K(i + 1, j + 1) + band[base + i + 1] * band[base + j + 1];
      K(j, i) = K(i, j);
    }
  return K;
}

std::vector<double> kernel_diagonal(const CoefficientBand &band, Site first, std::int64_t size) {
  std::vector<double> d(static_cast<std::size_t>(std::max<std::int64_t>(size, 0)));
  if (size <= 0)
    return d;
  d.back() = kernel_eval(band, first + (size - 1), first + (size - 1));
  for (std::int64_t i = size - 2; i >= 0; --i) {
    const double j = band[first.index + i + 1];
    d[static_cast<std::size_t>(i)] = d[static_cast<std::size_t>(i + 1)] + j * j;
  }
  return d;
}

QuadratureKernelValue kernel_eval_quadrature(const HoppingCoefficients &coeffs, Site k, Site l,
                                             double eps) {
  if (!(eps > 0.0 && eps <= 0.2))
    throw ConfigError("kernel quadrature radius must lie in (0, 0.2]");
  // Integer exponents: z^{1/2 - k} = z^{-k.index}, w^{l + 1/2} = w^{l.index + 1}.
  const auto pz = static_cast<int>(-k.index);
  const auto pw = static_cast<int>(l.index + 1);
  auto trapezoid = [&](int M) {
    std::vector<cplx> zs(static_cast<std::size_t>(M));
    std::vector<cplx> ws(static_cast<std::size_t>(M));
    std::vector<cplx> fz(static_cast<std::size_t>(M));
    std::vector<cplx> fw(static_cast<std::size_t>(M));
    for (int j = 0; j < M; ++j) {
      const double phi = 2.0 * std::numbers::pi * j / M;
      const cplx u = std::polar(1.0, phi);
      const cplx z = (1.0 + eps) * u;
      const cplx w = (1.0 - eps) * u;
      zs[static_cast<std::size_t>(j)] = z;
      ws[static_cast<std::size_t>(j)] = w;
      fz[static_cast<std::size_t>(j)] = laurent_symbol(coeffs, z) * std::pow(z, pz);
      fw[static_cast<std::size_t>(j)] = std::pow(w, pw) / laurent_symbol(coeffs, w);
    }
    cplx sum = 0.0;
    for (int j = 0; j < M; ++j) {
      cplx inner = 0.0;
      const cplx z = zs[static_cast<std::size_t>(j)];
      for (int i = 0; i < M; ++i)
        inner += fw[static_cast<std::size_t>(i)] / (z - ws[static_cast<std::size_t>(i)]);
      sum += fz[static_cast<std::size_t>(j)] * inner;
    }
    return sum.real() / (static_cast<double>(M) * M);
  };
  double prev = trapezoid(64);
  for (int M = 128; M <= (1 << 18); M *= 2) {
    const double cur = trapezoid(M);
    if (std::abs(cur - prev) < 1e-10)
      return {cur, M};
    prev = cur;
  }
  throw NoConvergence("kernel quadrature did not settle by 2^18 nodes");
}

double local_sine_prediction(const FermiSea &sea, std::int64_t delta) {
  double sum = 0.0;
  const auto d = static_cast<double>(delta);
  for (std::size_t i = 0; i + 1 < sea.boundaries.size(); i += 2) {
    const double a = sea.boundaries[i];
    const double c = sea.boundaries[i + 1];
    if (delta == 0)
      sum += c - a;
    else
      sum += (std::sin(c * d) - std::sin(a * d)) / d;
  }
  return sum / std::numbers::pi;
}

double edge_prediction(const EdgeProfile &profile, double theta, Site k, Site l) {
  if (profile.maximizers.size() != 1)
    throw UnsupportedEdge("edge prediction needs a single maximizer in [0, pi]");
  const Maximizer &top = profile.maximizers.front();
  if (top.at_endpoint())
    throw UnsupportedEdge("maximizer at 0 or pi has no oscillating factor");
  if (profile.n_cuts > 2)
    throw UnsupportedEdge("more than two cuts at the edge");
  const double scale = profile.edge_scale(theta);
  const double x = (k.value() - profile.b * theta) / scale;
  const double y = (l.value() - profile.b * theta) / scale;
  if (std::abs(x) > 6.0 || std::abs(y) > 6.0)
    throw ConfigError("edge prediction is limited to |x|, |y| <= 6");
  const double phase = top.chi_b * static_cast<double>(k - l);
  return 2.0 * std::cos(phase) * airy_kernel(AiryOrder(top.m), x, y) / scale;
}

} // namespace splitsea
