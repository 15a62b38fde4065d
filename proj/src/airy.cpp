#include "splitsea/airy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "splitsea/errors.hpp"
#include "splitsea/quadrature.hpp"

namespace splitsea {

namespace {

using cplx = std::complex<double>;

constexpr double kLogTail = -41.45; // log(1e-18)
constexpr int kPanelOrder = 20;
constexpr int kChebDegree = 25;
constexpr double kTableLo = -20.0;
constexpr double kTableHi = 40.0;
constexpr double kTablePanel = 1.0;

// Exponent (-1)^{m-1} z^{2m+1}/(2m+1) - x z.
cplx exponent(int m, double x, cplx z) {
  const cplx z2 = z * z;
  cplx zp = z;
  for (int i = 0; i < m; ++i)
    zp *= z2;
  const double sign = (m % 2 == 1) ? 1.0 : -1.0;
  return sign * zp / static_cast<double>(2 * m + 1) - x * z;
}

double log_modulus(int m, double x, double sigma, double t) {
  return exponent(m, x, cplx(sigma, t)).real();
}

bool tail_below(int m, double x, double sigma, double t) {
  for (double f : {1.0, 1.1, 1.25, 1.5, 2.0})
    if (log_modulus(m, x, sigma, f * t) > kLogTail)
      return false;
  return true;
}

} // namespace

AiryOrder::AiryOrder(int m) : m_(m) {
  if (m < 1 || m > 4)
    throw ConfigError("Airy order m must be in 1..4");
}

AiryContour airy_contour(const AiryOrder &order, double x) {
  const int m = order.m();
  const double root = 1.0 / (2.0 * m);
  AiryContour c;
  // Through the dominant saddle pair x^{1/2m} exp(+-i(m-1)pi/2m); the
  // line maximum then sits at the saddles and nothing cancels.
  const double lean = std::cos((m - 1) * std::numbers::pi / (2.0 * m));
  if (x > 0.0)
    c.sigma = std::max(1.0, std::pow(x, root)) * lean;
  else // line maximum is about |x| sigma; keep it O(1)
    c.sigma = std::min(lean, 1.0 / std::abs(x));
  const double peak = std::max(0.0, log_modulus(m, x, c.sigma, 0.0));
  double t = std::pow((-kLogTail + peak + std::abs(x) * c.sigma) / c.sigma, root);
  for (int attempt = 0; attempt < 3; ++attempt, t *= 2.0) {
    if (tail_below(m, x, c.sigma, t)) {
      c.t_max = t;
      return c;
    }
  }
  std::ostringstream msg;
  msg << "integrand not below 1e-18 at t = " << t << " for x = " << x;
  throw TruncationFailure(msg.str());
}

double airy_fn(const AiryOrder &order, double x) {
  if (!(std::abs(x) <= 40.0))
    throw ConfigError("airy_fn: |x| must be at most 40");
  const int m = order.m();
  const AiryContour c = airy_contour(order, x);
  static const QuadratureRule ref = gauss_legendre(kPanelOrder);
  // Panel widths follow the local phase rate |z|^{2m} + |x|.
  auto rate = [&](double t) { return std::pow(std::norm(cplx(c.sigma, t)), m) + std::abs(x); };
  double sum = 0.0;
  double t = 0.0;
  while (t < c.t_max) {
    double h = std::min(0.5, 3.0 / rate(t));
    h = std::min(0.5, 3.0 / rate(t + h));
    h = std::min(h, c.t_max - t);
    const double mid = t + 0.5 * h;
    double panel = 0.0;
    for (int i = 0; i < kPanelOrder; ++i) {
      const double ti = mid + 0.5 * h * ref.nodes[static_cast<std::size_t>(i)];
      panel += ref.weights[static_cast<std::size_t>(i)] *
               std::exp(exponent(m, x, cplx(c.sigma, ti))).real();
    }
    sum += 0.5 * h * panel;
    t += h;
  }
  return sum / std::numbers::pi;
}

AiryTable::AiryTable(const AiryOrder &order, double lo, double hi)
    : order_(order), lo_(lo), hi_(hi), cutoff_(hi) {
  const int panels = static_cast<int>(std::ceil((hi - lo) / kTablePanel));
  hi_ = lo + panels * kTablePanel;
  coeffs_.assign(static_cast<std::size_t>(panels * kChebDegree), 0.0);
  std::array<double, kChebDegree> f{};
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * kTablePanel;
    for (int j = 0; j < kChebDegree; ++j) {
      const double u = std::cos(std::numbers::pi * (j + 0.5) / kChebDegree);
      f[static_cast<std::size_t>(j)] = airy_fn(order, a + 0.5 * kTablePanel * (u + 1.0));
    }
    for (int k = 0; k < kChebDegree; ++k) {
      double s = 0.0;
      for (int j = 0; j < kChebDegree; ++j)
        s += f[static_cast<std::size_t>(j)] *
             std::cos(std::numbers::pi * k * (j + 0.5) / kChebDegree);
      coeffs_[static_cast<std::size_t>(p * kChebDegree + k)] = 2.0 * s / kChebDegree;
    }
  }
  // Scan down from the top for the last non-negligible value.
  cutoff_ = lo_;
  for (double x = hi_; x >= lo_; x -= 0.05) {
    if (std::abs((*this)(x)) >= 1e-17) {
      cutoff_ = x + 0.05;
      break;
    }
  }
}

double AiryTable::operator()(double x) const {
  if (x >= hi_)
    return 0.0;
  if (x < lo_)
    return airy_fn(order_, x);
  const int panels = static_cast<int>(coeffs_.size()) / kChebDegree;
  const int p = std::min(panels - 1, static_cast<int>((x - lo_) / kTablePanel));
  const double a = lo_ + p * kTablePanel;
  const double u = 2.0 * (x - a) / kTablePanel - 1.0;
  const double *c = coeffs_.data() + p * kChebDegree;
  double b1 = 0.0;
  double b2 = 0.0;
  for (int k = kChebDegree - 1; k >= 1; --k) {
    const double b0 = 2.0 * u * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return u * b1 - b2 + 0.5 * c[0];
}

const AiryTable &airy_table(const AiryOrder &order) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<AiryTable>> tables;
  std::lock_guard<std::mutex> lock(mu);
  auto &slot = tables[order.m()];
  if (!slot)
    slot = std::make_unique<AiryTable>(order, kTableLo, kTableHi);
  return *slot;
}

namespace {

// v-quadrature on [0, V] reaching the decay cutoff from `lowest`.
QuadratureRule shift_rule(const AiryTable &table, double lowest) {
  const double V = std::max(0.5, table.decay_cutoff() - lowest + 0.5);
  const auto panels = static_cast<std::size_t>(std::ceil(V / 0.5));
  return composite_gauss_legendre(0.0, panels * 0.5, panels, 16);
}

double upper_end(const AiryOrder &order, const FredholmConfig &config, double s) {
  const double L = config.upper_cut > 0.0 ? config.upper_cut : (order.m() == 1 ? 14.0 : 10.0);
  return std::max(s + L, airy_table(order).decay_cutoff());
}

// det(I - W^{1/2} B B^T W^{1/2}) with B_ik = Ai(x_i + v_k) sqrt(u_k).
double nystrom_det(const AiryOrder &order, const QuadratureRule &rule) {
  const AiryTable &table = airy_table(order);
  const double lowest = *std::min_element(rule.nodes.begin(), rule.nodes.end());
  const QuadratureRule v = shift_rule(table, lowest);
  const auto n = static_cast<Eigen::Index>(rule.size());
  const auto nv = static_cast<Eigen::Index>(v.size());
  Eigen::MatrixXd B(n, nv);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sw = std::sqrt(rule.weights[static_cast<std::size_t>(i)]);
    for (Eigen::Index k = 0; k < nv; ++k)
      B(i, k) = sw * std::sqrt(v.weights[static_cast<std::size_t>(k)]) *
                table(rule.nodes[static_cast<std::size_t>(i)] + v.nodes[static_cast<std::size_t>(k)]);
  }
  Eigen::MatrixXd M = -B * B.transpose();
  M.diagonal().array() += 1.0;
  return Eigen::PartialPivLU<Eigen::MatrixXd>(M).determinant();
}

} // namespace

double airy_kernel(const AiryOrder &order, double x, double y) {
  const AiryTable &table = airy_table(order);
  const QuadratureRule v = shift_rule(table, std::min(x, y));
  double sum = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k)
    sum += v.weights[k] * table(x + v.nodes[k]) * table(y + v.nodes[k]);
  return sum;
}

FredholmValue fredholm_detail(const AiryOrder &order, const FredholmConfig &config, double s) {
  if (s < -12.0)
    throw ConfigError("fredholm_F: s must be at least -12");
  if (config.n_nodes < 2)
    throw ConfigError("fredholm_F: need at least two nodes");
  const double top = upper_end(order, config, s);
  FredholmValue out;
  out.value = nystrom_det(order, gauss_legendre(static_cast<std::size_t>(config.n_nodes), s, top));
  out.doubled =
      nystrom_det(order, gauss_legendre(2 * static_cast<std::size_t>(config.n_nodes), s, top));
  if (std::abs(out.value - out.doubled) > 1e-8) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "F(" << s << ") moved from " << out.value << " to " << out.doubled
        << " under node doubling";
    throw NodeCountInsufficient(msg.str());
  }
  return out;
}

double fredholm_F(const AiryOrder &order, const FredholmConfig &config, double s) {
  return fredholm_detail(order, config, s).value;
}

double fredholm_F(const AiryOrder &order, double s) { return fredholm_F(order, FredholmConfig{}, s); }

double fredholm_F_clenshaw_curtis(const AiryOrder &order, int n_nodes, double s) {
  const double top = upper_end(order, FredholmConfig{}, s);
  return nystrom_det(order, clenshaw_curtis(static_cast<std::size_t>(n_nodes), s, top));
}

double airy_kernel_trace(const AiryOrder &order, double s) {
  const double top = upper_end(order, FredholmConfig{}, s);
  const QuadratureRule rule = gauss_legendre(128, s, top);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i)
    sum += rule.weights[i] * airy_kernel(order, rule.nodes[i], rule.nodes[i]);
  return sum;
}

double limiting_cdf(const AiryOrder &order, int n_cuts, double s) {
  if (n_cuts < 1)
    throw ConfigError("limiting_cdf: n_cuts must be positive");
  if (s > airy_table(order).decay_cutoff() + 2.0)
    return 1.0;
  return std::pow(fredholm_F(order, std::max(s, -12.0)), n_cuts);
}

} // namespace splitsea
