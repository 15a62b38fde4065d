#pragma once

// Order-m Airy functions Ai_{2m+1}, their kernels and Fredholm determinants.

#include <vector>

namespace splitsea {

/// Multicriticality order m in 1..4.
class AiryOrder {
public:
  explicit AiryOrder(int m = 1);
  int m() const noexcept { return m_; }
  int degree() const noexcept { return 2 * m_ + 1; }

private:
  int m_;
};

/// Vertical contour sigma + i t, t in [0, t_max], used for one evaluation.
struct AiryContour {
  double sigma = 1.0;
  double t_max = 0.0;
};

/// Contour for Ai_{2m+1}(x); the integrand modulus at t_max is below 1e-18.
/// Throws TruncationFailure if no such t_max is found after two doublings.
AiryContour airy_contour(const AiryOrder &order, double x);

/// Ai_{2m+1}(x) by Gauss-Legendre quadrature along the contour.  |x| <= 40.
double airy_fn(const AiryOrder &order, double x);

/// Piecewise Chebyshev interpolant of airy_fn on [lo, hi]; zero above hi.
class AiryTable {
public:
  AiryTable(const AiryOrder &order, double lo, double hi);
  double operator()(double x) const;
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  /// Smallest tabulated x beyond which |Ai| stays below 1e-17.
  double decay_cutoff() const noexcept { return cutoff_; }

private:
  AiryOrder order_;
  double lo_;
  double hi_;
  double cutoff_;
  std::vector<double> coeffs_; // panel-major Chebyshev coefficients
};

/// Process-wide table on [-20, 40] for the given order, built on first use.
const AiryTable &airy_table(const AiryOrder &order);

/// A_{2m+1}(x, y) = int_0^inf Ai(x + v) Ai(y + v) dv.
double airy_kernel(const AiryOrder &order, double x, double y);

struct FredholmConfig {
  int n_nodes = 64;
  /// Truncation length above s; 0 picks 14 for m = 1 and 10 otherwise.
  double upper_cut = 0.0;
};

struct FredholmValue {
  double value = 0.0;
  /// Same determinant with twice the nodes.
  double doubled = 0.0;
};

/// det(I - A) on L^2(s, inf) by Gauss-Legendre Nystrom discretisation.
/// Throws NodeCountInsufficient if doubling the nodes moves the value by
/// more than 1e-8.
FredholmValue fredholm_detail(const AiryOrder &order, const FredholmConfig &config, double s);
double fredholm_F(const AiryOrder &order, const FredholmConfig &config, double s);
double fredholm_F(const AiryOrder &order, double s);

/// Same determinant on Clenshaw-Curtis nodes, an independent check.
double fredholm_F_clenshaw_curtis(const AiryOrder &order, int n_nodes, double s);

/// int_s^inf A(x, x) dx, the first trace term of -log F.
double airy_kernel_trace(const AiryOrder &order, double s);

/// F_{2m+1}(s)^n_cuts.
double limiting_cdf(const AiryOrder &order, int n_cuts, double s);

} // namespace splitsea
