#include "splitsea/potential.hpp"

#include "splitsea/errors.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace splitsea {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRootResidual = 1e-12;
constexpr std::size_t kGridPerDegree = 4096;

// Safeguarded Newton on a sign-changing bracket [a, b].
double polish_root(const std::function<double(double)> &f,
                   const std::function<double(double)> &fprime, double a,
                   double b) {
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0)
    return a;
  if (fb == 0.0)
    return b;
  double x = 0.5 * (a + b);
  for (int it = 0; it < 300; ++it) {
    const double fx = f(x);
    if (fx == 0.0)
      return x;
    if ((fx < 0.0) == (fa < 0.0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
      fb = fx;
    }
    if (b - a <= 2.0 * std::numeric_limits<double>::epsilon() *
                      std::max(1.0, std::abs(a)))
      break;
    const double d = fprime(x);
    double next = d != 0.0 ? x - fx / d : a - 1.0;
    if (!(next > a && next < b))
      next = 0.5 * (a + b);
    if (next == x)
      break;
    x = next;
  }
  return std::abs(fa) < std::abs(fb) ? a : b;
}

// Critical points of D plus everything derived from them; computed once and
// reused for repeated Fermi-sea queries on the same coefficients.
class SeaSolver {
public:
  explicit SeaSolver(const HoppingCoefficients &coeffs) : coeffs_(coeffs) {
    critical_ = critical_points(coeffs_);
    values_.reserve(critical_.size());
    for (double c : critical_)
      values_.push_back(eval_dispersion(coeffs_, c));
    b_ = *std::max_element(values_.begin(), values_.end());
    b_tilde_ = -*std::min_element(values_.begin(), values_.end());
    scale_ = std::max(1.0, dispersion_scale(coeffs_, 0));
  }

  double b() const { return b_; }
  double b_tilde() const { return b_tilde_; }
  const std::vector<double> &critical() const { return critical_; }
  const std::vector<double> &critical_values() const { return values_; }

  FermiSea sea(double x) const {
    FermiSea out;
    out.x = x;
    if (x >= b_) {
      // x == b leaves only tangential points, which carry no measure
      return out;
    }
    if (x < -b_tilde_) {
      out.boundaries = {0.0, kPi};
      out.cuts = 0;
      return out;
    }
    const auto g = [&](double phi) { return eval_dispersion(coeffs_, phi) - x; };
    const auto gp = [&](double phi) { return eval_dispersion(coeffs_, phi, 1); };
    const double tangent_tol = kRootResidual * scale_;

    // D is monotone between consecutive critical points, so each piece holds
    // at most one crossing.
    std::vector<double> breaks{critical_.front()};
    for (std::size_t i = 0; i + 1 < critical_.size(); ++i) {
      double ga = values_[i] - x;
      double gb = values_[i + 1] - x;
      if (std::abs(ga) <= tangent_tol)
        ga = 0.0;
      if (std::abs(gb) <= tangent_tol)
        gb = 0.0;
      if (ga != 0.0 && gb != 0.0 && (ga < 0.0) != (gb < 0.0)) {
        const double root = polish_root(g, gp, critical_[i], critical_[i + 1]);
        if (std::abs(g(root)) > kRootResidual * scale_)
          throw SolverFailure("root of D(chi) = x not resolved at x = " +
                              std::to_string(x));
        breaks.push_back(root);
      }
      breaks.push_back(critical_[i + 1]);
    }

    // Mark each piece by the sign of D - x at its midpoint and merge runs.
    std::vector<double> bounds;
    bool open = false;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
      const double lo = breaks[i];
      const double hi = breaks[i + 1];
      if (hi <= lo)
        continue;
      const bool inside = g(0.5 * (lo + hi)) >= 0.0;
      if (inside && !open) {
        bounds.push_back(lo);
        open = true;
      } else if (!inside && open) {
        bounds.push_back(lo);
        open = false;
      }
    }
    if (open)
      bounds.push_back(breaks.back());
    out.boundaries = std::move(bounds);
    out.cuts = count_cuts(out.boundaries);
    return out;
  }

  double density(double x) const {
    if (x >= b_)
      return 0.0;
    if (x <= -b_tilde_)
      return 1.0;
    const FermiSea s = sea(x);
    double rho = 0.0;
    for (std::size_t i = 0; i + 1 < s.boundaries.size(); i += 2)
      rho += s.boundaries[i + 1] - s.boundaries[i];
    return std::clamp(rho / kPi, 0.0, 1.0);
  }

  // int_x^b rho, split at the critical values where rho has kinks or
  // root-type endpoint singularities.
  double tail(double x) const {
    if (x >= b_)
      return 0.0;
    double frozen = 0.0;
    double lo = x;
    if (x < -b_tilde_) {
      frozen = -b_tilde_ - x;
      lo = -b_tilde_;
    }
    std::vector<double> cuts{lo, b_};
    for (double v : values_)
      if (v > lo && v < b_)
        cuts.push_back(v);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double p, double q) {
                             return std::abs(p - q) < 1e-14;
                           }),
               cuts.end());
    boost::math::quadrature::tanh_sinh<double> integrator(12);
    double total = frozen;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double a = cuts[i];
      const double c = cuts[i + 1];
      if (c - a < 1e-15)
        continue;
      total += integrator.integrate(
          [&](double t) { return density(t); }, a, c, 1e-13);
    }
    return total;
  }

private:
  HoppingCoefficients coeffs_;
  std::vector<double> critical_;
  std::vector<double> values_;
  double b_ = 0.0;
  double b_tilde_ = 0.0;
  double scale_ = 1.0;
};

double factorial(unsigned n) {
  double f = 1.0;
  for (unsigned i = 2; i <= n; ++i)
    f *= i;
  return f;
}

} // namespace

HoppingCoefficients::HoppingCoefficients(std::vector<double> gammas,
                                         double theta)
    : gammas_(std::move(gammas)), theta_(theta) {
  while (!gammas_.empty() && gammas_.back() == 0.0)
    gammas_.pop_back();
  if (!(theta_ >= 0.0) || !std::isfinite(theta_))
    throw ConfigError("theta must be a finite nonnegative number");
  for (double g : gammas_)
    if (!std::isfinite(g))
      throw ConfigError("gamma coefficients must be finite");
}

HoppingCoefficients HoppingCoefficients::with_theta(double theta) const {
  return HoppingCoefficients(gammas_, theta);
}

double HoppingCoefficients::miwa_norm() const noexcept {
  double s = 0.0;
  for (std::size_t r = 1; r <= gammas_.size(); ++r)
    s += static_cast<double>(r) * gammas_[r - 1] * gammas_[r - 1];
  return s;
}

double HoppingCoefficients::band_scale() const noexcept {
  double s = 0.0;
  for (std::size_t r = 1; r <= gammas_.size(); ++r)
    s += static_cast<double>(r) * std::abs(gammas_[r - 1]);
  return s;
}

bool Maximizer::at_endpoint() const noexcept {
  return chi_b < 1e-9 || chi_b > kPi - 1e-9;
}

int EdgeProfile::min_order() const { return leading().m; }

const Maximizer &EdgeProfile::leading() const {
  if (maximizers.empty())
    throw DegenerateEdge("edge profile has no maximizer");
  const Maximizer *best = &maximizers.front();
  for (const auto &mx : maximizers) {
    if (mx.m < best->m || (mx.m == best->m && !mx.at_endpoint() &&
                           best->at_endpoint()))
      best = &mx;
  }
  return *best;
}

double EdgeProfile::edge_scale(double theta) const {
  const Maximizer &mx = leading();
  return std::pow(mx.d * theta, 1.0 / (2.0 * mx.m + 1.0));
}

double eval_dispersion(const HoppingCoefficients &coeffs, double phi,
                       unsigned order) {
  // d^p/dphi^p cos(r phi) = r^p cos(r phi + p pi / 2), with the quarter
  // turns applied exactly so odd derivatives vanish at 0 and pi
  double sum = 0.0;
  for (std::size_t r = 1; r <= coeffs.degree(); ++r) {
    const double rr = static_cast<double>(r);
    double w = 2.0 * rr * coeffs.gamma(r);
    for (unsigned p = 0; p < order; ++p)
      w *= rr;
    double c;
    switch (order % 4) {
    case 0: c = std::cos(rr * phi); break;
    case 1: c = -std::sin(rr * phi); break;
    case 2: c = -std::cos(rr * phi); break;
    default: c = std::sin(rr * phi); break;
    }
    sum += w * c;
  }
  return sum;
}

double dispersion_scale(const HoppingCoefficients &coeffs, unsigned order) {
  double s = 0.0;
  for (std::size_t r = 1; r <= coeffs.degree(); ++r)
    s += 2.0 * std::pow(static_cast<double>(r), order + 1.0) *
         std::abs(coeffs.gamma(r));
  return s;
}

std::vector<double> critical_points(const HoppingCoefficients &coeffs) {
  std::vector<double> out{0.0};
  if (coeffs.is_degenerate()) {
    out.push_back(kPi);
    return out;
  }
  const std::size_t n = kGridPerDegree * coeffs.degree();
  const auto dp = [&](double phi) { return eval_dispersion(coeffs, phi, 1); };
  const auto dpp = [&](double phi) { return eval_dispersion(coeffs, phi, 2); };
  const double h = kPi / static_cast<double>(n);
  // D' vanishes at 0 and pi; start the scan one cell in so those are not
  // reported twice.
  double prev_x = h;
  double prev = dp(prev_x);
  for (std::size_t i = 2; i < n; ++i) {
    const double x = h * static_cast<double>(i);
    const double cur = dp(x);
    if (cur == 0.0) {
      out.push_back(x);
    } else if (prev != 0.0 && (prev < 0.0) != (cur < 0.0)) {
      out.push_back(polish_root(dp, dpp, prev_x, x));
    }
    prev = cur;
    prev_x = x;
  }
  out.push_back(kPi);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](double a, double b) { return b - a < 1e-13; }),
            out.end());
  return out;
}

Extrema global_extrema(const HoppingCoefficients &coeffs) {
  if (coeffs.is_degenerate())
    return {};
  SeaSolver solver(coeffs);
  return {solver.b(), solver.b_tilde()};
}

FermiSea fermi_sea(const HoppingCoefficients &coeffs, double x) {
  if (coeffs.is_degenerate()) {
    FermiSea s;
    s.x = x;
    if (x <= 0.0)
      s.boundaries = {0.0, kPi};
    return s;
  }
  return SeaSolver(coeffs).sea(x);
}

EdgeProfile edge_profile(const HoppingCoefficients &coeffs) {
  if (coeffs.is_degenerate())
    throw DegenerateEdge("dispersion is constant (all gamma vanish)");
  SeaSolver solver(coeffs);
  EdgeProfile prof;
  prof.b = solver.b();
  prof.b_tilde = solver.b_tilde();
  const double value_tol = 1e-10 * std::max(1.0, dispersion_scale(coeffs, 0));
  const unsigned max_order = 2 * static_cast<unsigned>(coeffs.degree()) + 2;
  for (std::size_t i = 0; i < solver.critical().size(); ++i) {
    if (solver.critical_values()[i] < prof.b - value_tol)
      continue;
    const double chi = solver.critical()[i];
    Maximizer mx;
    mx.chi_b = chi;
    unsigned p = 1;
    for (; p <= max_order; ++p) {
      const double dv = eval_dispersion(coeffs, chi, p);
      if (std::abs(dv) >= 1e-9 * dispersion_scale(coeffs, p))
        break;
    }
    if (p > max_order || p % 2 == 1) {
      // an odd first nonvanishing derivative cannot occur at a maximum
      throw SolverFailure("could not classify maximizer at chi = " +
                          std::to_string(chi));
    }
    mx.m = static_cast<int>(p / 2);
    mx.d = -eval_dispersion(coeffs, chi, p) / factorial(p);
    if (!(mx.d > 0.0))
      throw SolverFailure("maximizer has nonnegative leading derivative");
    prof.maximizers.push_back(mx);
  }
  const double eps = 1e-6 * std::max(1.0, prof.b);
  prof.n_cuts = solver.sea(prof.b - eps).cuts;
  return prof;
}

double limit_density(const HoppingCoefficients &coeffs, double x) {
  if (coeffs.is_degenerate())
    return x < 0.0 ? 1.0 : 0.0;
  return SeaSolver(coeffs).density(x);
}

double tail_mass(const HoppingCoefficients &coeffs, double x) {
  if (coeffs.is_degenerate())
    return x < 0.0 ? -x : 0.0;
  return SeaSolver(coeffs).tail(x);
}

double limit_shape(const HoppingCoefficients &coeffs, double x) {
  return x + 2.0 * tail_mass(coeffs, x);
}

int count_cuts(const std::vector<double> &boundaries) {
  if (boundaries.empty())
    return 0;
  if (boundaries.size() == 2 && boundaries[0] <= 0.0 && boundaries[1] >= kPi)
    return 0;
  int arcs = 0;
  for (std::size_t i = 0; i + 1 < boundaries.size(); i += 2) {
    arcs += 2;
    if (boundaries[i] <= 0.0)
      --arcs;
    if (boundaries[i + 1] >= kPi)
      --arcs;
  }
  return arcs;
}

FermiSea quadratic_fermi_sea_oracle(double gamma2, double x) {
  FermiSea out;
  out.x = x;
  const double g = gamma2;
  const auto finish = [&](std::vector<double> bounds) {
    out.boundaries = std::move(bounds);
    out.cuts = count_cuts(out.boundaries);
    return out;
  };
  if (g == 0.0) {
    if (x >= 2.0)
      return finish({});
    if (x < -2.0)
      return finish({0.0, kPi});
    return finish({0.0, std::acos(x / 2.0)});
  }
  const double disc = 1.0 + 8.0 * x * g + 32.0 * g * g;
  const double sq = std::sqrt(std::max(0.0, disc));
  const auto root = [&](double sign) {
    return std::acos(std::clamp((-1.0 + sign * sq) / (8.0 * g), -1.0, 1.0));
  };
  const double right = 4.0 * g + 2.0;  // D(0)
  const double left = 4.0 * g - 2.0;   // D(pi)
  const double vertex = -(1.0 + 32.0 * g * g) / (8.0 * g);

  if (g >= -0.125 && g <= 0.125) {
    if (x >= right)
      return finish({});
    if (x < left)
      return finish({0.0, kPi});
    return finish({0.0, root(+1.0)});
  }
  if (g < -0.125) {
    // maximum at the interior vertex; two cuts between D(0) and the vertex
    if (x >= vertex)
      return finish({});
    if (x < left)
      return finish({0.0, kPi});
    if (x <= right)
      return finish({0.0, root(+1.0)});
    return finish({root(-1.0), root(+1.0)});
  }
  // g > 1/8: minimum at the interior vertex; two cuts between it and D(pi)
  if (x >= right)
    return finish({});
  if (x < vertex)
    return finish({0.0, kPi});
  if (x >= left)
    return finish({0.0, root(+1.0)});
  return finish({0.0, root(+1.0), root(-1.0), kPi});
}

} // namespace splitsea
