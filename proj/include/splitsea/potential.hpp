#pragma once

// Dispersion D(phi) = sum_r 2 r gamma_r cos(r phi), Fermi seas, limit density
// and shape, and the data of the right edge of the bulk.

#include <cstddef>
#include <vector>

namespace splitsea {

/// Hopping weights gamma_1..gamma_R and the coupling theta.  Trailing zero
/// weights are trimmed on construction.
class HoppingCoefficients {
public:
  HoppingCoefficients() = default;
  explicit HoppingCoefficients(std::vector<double> gammas, double theta = 1.0);

  const std::vector<double> &gammas() const noexcept { return gammas_; }
  double theta() const noexcept { return theta_; }
  /// gamma_r for r >= 1, zero beyond the support.
  double gamma(std::size_t r) const noexcept {
    return r >= 1 && r <= gammas_.size() ? gammas_[r - 1] : 0.0;
  }
  std::size_t degree() const noexcept { return gammas_.size(); }
  bool is_degenerate() const noexcept { return gammas_.empty(); }

  HoppingCoefficients with_theta(double theta) const;

  /// sum_r r gamma_r^2; theta^2 times this is the log-normalisation.
  double miwa_norm() const noexcept;
  /// sum_r r |gamma_r|, the width scale of the Laurent bands.
  double band_scale() const noexcept;

private:
  std::vector<double> gammas_;
  double theta_ = 1.0;
};

/// I_x restricted to [0, pi] as a sorted list of interval endpoints
/// [chi_1, chi_2], [chi_3, chi_4], ...  Endpoints at 0 or pi are explicit.
struct FermiSea {
  double x = 0.0;
  std::vector<double> boundaries;
  int cuts = 0;

  std::size_t intervals() const noexcept { return boundaries.size() / 2; }
  bool empty() const noexcept { return boundaries.empty(); }
};

struct Maximizer {
  double chi_b = 0.0;
  int m = 1;
  double d = 0.0;

  bool at_endpoint() const noexcept;
};

struct EdgeProfile {
  double b = 0.0;
  double b_tilde = 0.0;
  std::vector<Maximizer> maximizers;
  int n_cuts = 0;

  /// Lowest multicriticality order among the maximizers.
  int min_order() const;
  /// The maximizer that controls the edge scale: lowest m, largest d among
  /// those; interior maximizers are preferred on ties.
  const Maximizer &leading() const;
  /// (d theta)^{1/(2m+1)} for the leading maximizer.
  double edge_scale(double theta) const;
};

struct Extrema {
  double b = 0.0;
  double b_tilde = 0.0;
};

/// p-th derivative of D at phi (order 0 is D itself).
double eval_dispersion(const HoppingCoefficients &coeffs, double phi,
                       unsigned order = 0);

/// Natural scale of the p-th derivative, sum_r |2 r^{p+1} gamma_r|.
double dispersion_scale(const HoppingCoefficients &coeffs, unsigned order);

/// Critical points of D in [0, pi] (roots of D', including 0 and pi).
std::vector<double> critical_points(const HoppingCoefficients &coeffs);

Extrema global_extrema(const HoppingCoefficients &coeffs);

FermiSea fermi_sea(const HoppingCoefficients &coeffs, double x);

EdgeProfile edge_profile(const HoppingCoefficients &coeffs);

double limit_density(const HoppingCoefficients &coeffs, double x);

/// Omega(x) = x + 2 int_x^inf rho.
double limit_shape(const HoppingCoefficients &coeffs, double x);

/// int_x^inf rho(x') dx', the limit of N(x theta)/theta.
double tail_mass(const HoppingCoefficients &coeffs, double x);

/// Closed-form Fermi sea of gamma = (1, gamma2).
FermiSea quadratic_fermi_sea_oracle(double gamma2, double x);

/// Number of arcs of {e^{i phi} : phi in I_x} given the [0, pi] intervals.
int count_cuts(const std::vector<double> &boundaries);

} // namespace splitsea
