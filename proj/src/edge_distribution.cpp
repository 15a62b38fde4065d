#include "splitsea/edge_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <sstream>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/mpfr.hpp>
#include <Eigen/Dense>
#include <fftw3.h>

#include "splitsea/airy.hpp"
#include "splitsea/errors.hpp"
#include "fftw_lock.hpp"
#include "splitsea/kernel.hpp"
#include "splitsea/parallel.hpp"

namespace splitsea {

namespace {

using mpfr_float = boost::multiprecision::mpfr_float;
constexpr std::int64_t kMaxEll = 4096;

// log of the symbol, -2 theta sum_r (-1)^r gamma_r cos r phi.
double log_symbol(const HoppingCoefficients &coeffs, double phi) {
  double s = 0.0;
  for (std::size_t r = 1; r <= coeffs.degree(); ++r) {
    const double sign = (r % 2 == 0) ? 1.0 : -1.0;
    s += sign * coeffs.gamma(r) * std::cos(static_cast<double>(r) * phi);
  }
  return -2.0 * coeffs.theta() * s;
}

struct SymbolRange {
  double lo;
  double hi;
};

SymbolRange symbol_range(const HoppingCoefficients &coeffs) {
  const std::size_t n = 8192 * std::max<std::size_t>(1, coeffs.degree());
  SymbolRange r{1e300, -1e300};
  for (std::size_t j = 0; j < n; ++j) {
    const double v = log_symbol(coeffs, 2.0 * std::numbers::pi * static_cast<double>(j) / n);
    r.lo = std::min(r.lo, v);
    r.hi = std::max(r.hi, v);
  }
  return r;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n)
    p <<= 1;
  return p;
}

// Serialises MPFR work: the default precision is process-wide.
std::mutex &mpfr_mutex() {
  static std::mutex mu;
  return mu;
}

class PrecisionScope {
public:
  explicit PrecisionScope(int bits) : saved_(mpfr_float::default_precision()) {
    mpfr_float::default_precision(static_cast<unsigned>(std::ceil(bits * 0.30103)) + 2);
  }
  ~PrecisionScope() { mpfr_float::default_precision(saved_); }
  PrecisionScope(const PrecisionScope &) = delete;
  PrecisionScope &operator=(const PrecisionScope &) = delete;

private:
  unsigned saved_;
};

// Sample count for a DFT whose aliasing stays below 2^-bits relative to the
// symbol maximum, from Cauchy bounds on circles of radius rho.
std::size_t aliasing_free_samples(const HoppingCoefficients &coeffs, double log_max, int bits,
                                  std::int64_t n_max) {
  double best = 1e300;
  for (double rho : {1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 32.0}) {
    double log_bound = -log_max;
    for (std::size_t r = 1; r <= coeffs.degree(); ++r)
      log_bound += coeffs.theta() * std::abs(coeffs.gamma(r)) *
                   (std::pow(rho, static_cast<double>(r)) + std::pow(rho, -static_cast<double>(r)));
    const double need = log_bound + (bits + 16) * std::numbers::ln2;
    best = std::min(best, need / std::log(rho));
  }
  return static_cast<std::size_t>(std::ceil(std::max(best, 0.0))) + 2 * static_cast<std::size_t>(n_max) + 8;
}

// f_0..f_{n_max-1} of the symbol divided by exp(shift), in MPFR.
std::vector<mpfr_float> mpfr_symbol_coeffs(const HoppingCoefficients &coeffs, double shift,
                                           int bits, std::int64_t n_max) {
  const std::size_t G = aliasing_free_samples(coeffs, shift, bits, n_max);
  const mpfr_float two_pi = boost::math::constants::two_pi<mpfr_float>();
  std::vector<mpfr_float> cos_table(G);
  for (std::size_t k = 0; k < G; ++k)
    cos_table[k] = cos(two_pi * k / G);
  std::vector<mpfr_float> samples(G);
  const mpfr_float theta = coeffs.theta();
  for (std::size_t j = 0; j < G; ++j) {
    mpfr_float s = 0;
    for (std::size_t r = 1; r <= coeffs.degree(); ++r) {
      const double sign = (r % 2 == 0) ? 1.0 : -1.0;
      s += sign * coeffs.gamma(r) * cos_table[(r * j) % G];
    }
    samples[j] = exp(-2 * theta * s - shift);
  }
  // The symbol is even, so pair j with G - j.
  std::vector<mpfr_float> f(static_cast<std::size_t>(n_max));
  for (std::int64_t n = 0; n < n_max; ++n) {
    mpfr_float acc = samples[0];
    const auto nn = static_cast<std::size_t>(n);
    for (std::size_t j = 1; j < G; ++j)
      acc += samples[j] * cos_table[(nn * j) % G];
    f[static_cast<std::size_t>(n)] = acc / G;
  }
  return f;
}

template <class T> T log_of(const T &x) {
  using std::log;
  return log(x);
}

// log det of the leading ell x ell block of [f_|i-j|] by LDL^T.
template <class T> T cholesky_logdet(const std::vector<T> &f, std::int64_t ell) {
  const auto n = static_cast<std::size_t>(ell);
  std::vector<std::vector<T>> L(n, std::vector<T>(n, T(0)));
  std::vector<T> d(n);
  T logdet = 0;
  for (std::size_t j = 0; j < n; ++j) {
    T dj = f[0];
    for (std::size_t k = 0; k < j; ++k)
      dj -= L[j][k] * L[j][k] * d[k];
    if (!(dj > 0))
      throw NotPositiveDefinite("Toeplitz pivot " + std::to_string(j) + " is not positive");
    d[j] = dj;
    logdet += log_of(dj);
    for (std::size_t i = j + 1; i < n; ++i) {
      T s = f[i - j];
      for (std::size_t k = 0; k < j; ++k)
        s -= L[i][k] * L[j][k] * d[k];
      L[i][j] = s / dj;
    }
  }
  return logdet;
}

// log det T_k for k = 0..ell_max by Levinson-Durbin.
template <class T> std::vector<T> levinson_logdets(const std::vector<T> &f, std::int64_t ell_max) {
  std::vector<T> out(static_cast<std::size_t>(ell_max) + 1);
  out[0] = 0;
  if (ell_max == 0)
    return out;
  if (!(f[0] > 0))
    throw NotPositiveDefinite("symbol has nonpositive mean");
  T err = f[0];
  out[1] = log_of(err);
  std::vector<T> a; // predictor coefficients a_1..a_k
  a.reserve(static_cast<std::size_t>(ell_max));
  for (std::int64_t k = 1; k < ell_max; ++k) {
    T acc = f[static_cast<std::size_t>(k)];
    for (std::int64_t i = 1; i < k; ++i)
      acc += a[static_cast<std::size_t>(i - 1)] * f[static_cast<std::size_t>(k - i)];
    const T kappa = -acc / err;
    std::vector<T> next(static_cast<std::size_t>(k));
    for (std::int64_t i = 1; i < k; ++i)
      next[static_cast<std::size_t>(i - 1)] =
          a[static_cast<std::size_t>(i - 1)] + kappa * a[static_cast<std::size_t>(k - i - 1)];
    next[static_cast<std::size_t>(k - 1)] = kappa;
    a = std::move(next);
    err *= (1 - kappa * kappa);
    if (!(err > 0))
      throw NotPositiveDefinite("Toeplitz prediction error vanished at order " + std::to_string(k));
    out[static_cast<std::size_t>(k) + 1] = out[static_cast<std::size_t>(k)] + log_of(err);
  }
  return out;
}

double finish_probability(double logp) {
  double p = std::exp(logp);
  if (p > 1.0) {
    if (p > 1.0 + 1e-9) {
      std::ostringstream msg;
      msg.precision(15);
      msg << "probability " << p << " exceeds one";
      throw SolverFailure(msg.str());
    }
    p = 1.0;
  }
  return p;
}

void check_ell(std::int64_t ell) {
  if (ell > kMaxEll)
    throw ConfigError("ell exceeds the 4096 guard");
}

} // namespace

std::vector<double> symbol_coeffs(const HoppingCoefficients &coeffs, int n_max) {
  if (n_max < 0)
    throw ConfigError("symbol_coeffs: n_max must be nonnegative");
  const double width = coeffs.theta() * coeffs.band_scale();
  std::size_t G = next_pow2(std::max<std::size_t>(
      8 * (static_cast<std::size_t>(std::ceil(width)) + 64), 4 * static_cast<std::size_t>(n_max) + 32));
  for (int attempt = 0; attempt < 4; ++attempt, G *= 2) {
    std::vector<std::complex<double>> in(G);
    std::vector<std::complex<double>> out(G);
    for (std::size_t j = 0; j < G; ++j)
      in[j] = std::exp(log_symbol(coeffs, 2.0 * std::numbers::pi * static_cast<double>(j) / G));
    fftw_plan plan;
    {
      std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
      plan = fftw_plan_dft_1d(static_cast<int>(G), reinterpret_cast<fftw_complex *>(in.data()),
                              reinterpret_cast<fftw_complex *>(out.data()), FFTW_FORWARD,
                              FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
      std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
    const auto N = static_cast<std::int64_t>(G / 2 - 1);
    auto at = [&](std::int64_t n) {
      return out[static_cast<std::size_t>((n + static_cast<std::int64_t>(G)) % static_cast<std::int64_t>(G))] /
             static_cast<double>(G);
    };
    double peak = 0.0;
    double tail = 0.0;
    for (std::int64_t n = -N; n <= N; ++n) {
      peak = std::max(peak, std::abs(at(n)));
      if (std::abs(n) >= N - 8)
        tail = std::max(tail, std::abs(at(n)));
    }
    if (tail >= 1e-15 * peak)
      continue;
    std::vector<double> f(2 * static_cast<std::size_t>(n_max) + 1);
    for (std::int64_t n = -n_max; n <= n_max; ++n) {
      // Average the two halves so the even symmetry is exact.
      const double v = 0.5 * (at(n).real() + at(-n).real());
      f[static_cast<std::size_t>(n + n_max)] = v;
    }
    return f;
  }
  throw BandTooNarrow("symbol coefficients not captured");
}

int toeplitz_precision_bits(const HoppingCoefficients &coeffs) {
  const SymbolRange r = symbol_range(coeffs);
  const double lost = (r.hi - r.lo) * std::numbers::log2e;
  if (lost <= 10.0)
    return 53;
  return static_cast<int>(std::ceil(lost)) + 96;
}

double toeplitz_cdf(const HoppingCoefficients &coeffs, std::int64_t ell) {
  check_ell(ell);
  if (ell < 0)
    return 0.0;
  const double th = coeffs.theta();
  const double norm = th * th * coeffs.miwa_norm();
  if (ell == 0)
    return std::exp(-norm);
  const int bits = toeplitz_precision_bits(coeffs);
  if (bits == 53) {
    const std::vector<double> full = symbol_coeffs(coeffs, static_cast<int>(ell));
    const std::vector<double> f(full.begin() + ell, full.end());
    return finish_probability(cholesky_logdet(f, ell) - norm);
  }
  std::lock_guard<std::mutex> lock(mpfr_mutex());
  PrecisionScope scope(bits);
  const double shift = symbol_range(coeffs).hi;
  const std::vector<mpfr_float> f = mpfr_symbol_coeffs(coeffs, shift, bits, ell);
  const mpfr_float logp = cholesky_logdet(f, ell) + mpfr_float(shift) * ell - mpfr_float(norm);
  return finish_probability(logp.convert_to<double>());
}

std::vector<double> toeplitz_cdf_prefix(const HoppingCoefficients &coeffs, std::int64_t ell_max) {
  check_ell(ell_max);
  if (ell_max < 0)
    throw ConfigError("toeplitz_cdf_prefix: ell_max must be nonnegative");
  const double th = coeffs.theta();
  const double norm = th * th * coeffs.miwa_norm();
  std::vector<double> p(static_cast<std::size_t>(ell_max) + 1);
  const int bits = toeplitz_precision_bits(coeffs);
  if (bits == 53) {
    const std::vector<double> full = symbol_coeffs(coeffs, static_cast<int>(ell_max));
    const std::vector<double> f(full.begin() + ell_max, full.end());
    const std::vector<double> logdets = levinson_logdets(f, ell_max);
    for (std::size_t k = 0; k < p.size(); ++k)
      p[k] = finish_probability(logdets[k] - norm);
    return p;
  }
  std::lock_guard<std::mutex> lock(mpfr_mutex());
  PrecisionScope scope(bits);
  const double shift = symbol_range(coeffs).hi;
  const std::vector<mpfr_float> f = mpfr_symbol_coeffs(coeffs, shift, bits, std::max<std::int64_t>(ell_max, 1));
  const std::vector<mpfr_float> logdets = levinson_logdets(f, ell_max);
  for (std::size_t k = 0; k < p.size(); ++k) {
    const mpfr_float logp = logdets[k] + mpfr_float(shift) * static_cast<long>(k) - mpfr_float(norm);
    p[k] = finish_probability(logp.convert_to<double>());
  }
  return p;
}

double CdfTable::scaled(std::int64_t ell) const {
  const double scale = std::pow(d * theta, 1.0 / (2.0 * m + 1.0));
  return (static_cast<double>(ell) - b * theta) / scale;
}

double CdfTable::at(std::int64_t ell) const {
  if (ell < 0 || rows.empty())
    return 0.0;
  if (ell < rows.front().ell)
    return rows.front().p;
  if (ell > rows.back().ell)
    return rows.back().p;
  return rows[static_cast<std::size_t>(ell - rows.front().ell)].p;
}

CdfTable cdf_table(const HoppingCoefficients &coeffs, std::int64_t ell_lo, std::int64_t ell_hi) {
  if (ell_hi < ell_lo)
    throw ConfigError("cdf_table: empty ell range");
  const EdgeProfile profile = edge_profile(coeffs);
  CdfTable table;
  table.theta = coeffs.theta();
  table.gammas = coeffs.gammas();
  table.b = profile.b;
  table.d = profile.leading().d;
  table.m = profile.leading().m;
  table.n_cuts = profile.n_cuts;
  const std::vector<double> prefix = toeplitz_cdf_prefix(coeffs, std::max<std::int64_t>(ell_hi, 0));
  for (std::int64_t ell = ell_lo; ell <= ell_hi; ++ell)
    table.rows.push_back({ell, ell < 0 ? 0.0 : prefix[static_cast<std::size_t>(ell)]});
  return table;
}

double fredholm_cdf_check(const HoppingCoefficients &coeffs, std::int64_t ell) {
  check_ell(ell);
  const CoefficientBand band(coeffs);
  const std::int64_t N = band.half_width();
  for (std::int64_t W = 16; W <= 512; W *= 2) {
    // K(k, k) vanishes once k + 1/2 exceeds the band.
    const Site beyond{ell + W};
    const std::int64_t rest = std::max<std::int64_t>(0, N - beyond.index + 1);
    const std::vector<double> diag = kernel_diagonal(band, beyond, rest);
    double dropped = 0.0;
    for (double v : diag)
      dropped += v;
    if (dropped >= 1e-12)
      continue;
    Eigen::MatrixXd M = -kernel_window(band, Site{ell}, W);
    M.diagonal().array() += 1.0;
    return Eigen::PartialPivLU<Eigen::MatrixXd>(M).determinant();
  }
  throw WindowTooSmall("kernel trace above ell + 512 is not negligible");
}

ConvergenceReport scaled_convergence_study(const std::vector<double> &gammas,
                                           const std::vector<double> &thetas, double s_lo,
                                           double s_hi, int power) {
  if (s_hi <= s_lo)
    throw ConfigError("convergence study: empty s range");
  ConvergenceReport report;
  const EdgeProfile shape = edge_profile(HoppingCoefficients(gammas));
  report.m = shape.leading().m;
  report.power = power > 0 ? power : shape.n_cuts;
  const AiryOrder order(report.m);

  for (double theta : thetas) {
    const HoppingCoefficients coeffs(gammas, theta);
    const EdgeProfile profile = edge_profile(coeffs);
    const double scale = profile.edge_scale(theta);
    const double centre = profile.b * theta;
    auto s_of = [&](double t) { return (t - centre) / scale; };
    // P(k_max < t) for real t is P(k_max < ell) on (ell - 1/2, ell + 1/2].
    const auto ell_lo = static_cast<std::int64_t>(std::ceil(centre + s_lo * scale - 0.5));
    const auto ell_hi = static_cast<std::int64_t>(std::ceil(centre + s_hi * scale - 0.5));
    const CdfTable table = cdf_table(coeffs, std::max<std::int64_t>(ell_lo, 0), ell_hi);

    ConvergencePoint point;
    point.theta = theta;
    const auto count = static_cast<std::size_t>(ell_hi - ell_lo + 1);
    // Limit at the lattice image and at both ends of each flat piece.
    std::vector<double> at_ell(count), at_left(count), at_right(count);
    parallel_for(count, [&](std::size_t i) {
      const double ell = static_cast<double>(ell_lo + static_cast<std::int64_t>(i));
      at_ell[i] = limiting_cdf(order, report.power, s_of(ell));
      at_left[i] = limiting_cdf(order, report.power, std::max(s_lo, s_of(ell - 0.5)));
      at_right[i] = limiting_cdf(order, report.power, std::min(s_hi, s_of(ell + 0.5)));
    });
    for (std::size_t i = 0; i < count; ++i) {
      const std::int64_t ell = ell_lo + static_cast<std::int64_t>(i);
      const double p = table.at(ell);
      const double s = s_of(static_cast<double>(ell));
      if (s >= s_lo && s <= s_hi) {
        point.s.push_back(s);
        point.cdf.push_back(p);
        point.limit.push_back(at_ell[i]);
        point.sup_lattice = std::max(point.sup_lattice, std::abs(p - at_ell[i]));
      }
      // F is monotone, so the sup over a piece sits at one of its ends.
      point.sup_step = std::max({point.sup_step, std::abs(p - at_left[i]), std::abs(p - at_right[i])});
    }
    report.points.push_back(std::move(point));
  }
  return report;
}

double oscillation_average(int n, double chi_b) {
  if (n < 2 || n > 4)
    throw ConfigError("oscillation_average: n must be in 2..4");
  if (!(chi_b > 0.0))
    throw ConfigError("oscillation_average: chi_b must be positive");
  constexpr int M = 16;
  const double period = 2.0 * std::numbers::pi / chi_b;
  std::vector<double> x(static_cast<std::size_t>(M));
  for (int j = 0; j < M; ++j)
    x[static_cast<std::size_t>(j)] = period * j / M;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  double sum = 0.0;
  long count = 0;
  while (true) {
    double prod = 1.0;
    for (int i = 0; i < n; ++i) {
      const double a = x[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
      const double b = x[static_cast<std::size_t>(idx[static_cast<std::size_t>((i + 1) % n)])];
      prod *= std::cos(chi_b * (a - b));
    }
    sum += prod;
    ++count;
    int pos = 0;
    while (pos < n && ++idx[static_cast<std::size_t>(pos)] == M)
      idx[static_cast<std::size_t>(pos++)] = 0;
    if (pos == n)
      break;
  }
  return sum / static_cast<double>(count);
}

} // namespace splitsea
