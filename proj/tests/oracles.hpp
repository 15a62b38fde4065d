#pragma once

// Independent reference values used by the unit tests.

#include <cmath>
#include <numbers>

namespace oracle {

/// Classical Ai and Ai' by their Maclaurin series (fine for |x| <= 5).
inline void airy_series(double x, double &ai, double &aip) {
  const double c1 = 0.355028053887817239260;
  const double c2 = 0.258819403792806798405;
  if (x == 0.0) {
    ai = c1;
    aip = -c2;
    return;
  }
  double f = 1.0, g = x, fp = 0.0, gp = 1.0;
  double tf = 1.0, tg = x;
  for (int k = 1; k < 80; ++k) {
    // f: x^{3k} terms, g: x^{3k+1} terms.
    tf *= x * x * x / ((3.0 * k - 1.0) * (3.0 * k));
    tg *= x * x * x / ((3.0 * k) * (3.0 * k + 1.0));
    f += tf;
    g += tg;
    fp += 3.0 * k * tf / x;
    gp += (3.0 * k + 1.0) * tg / x;
    if (std::abs(tf) + std::abs(tg) < 1e-20 * (std::abs(f) + std::abs(g)))
      break;
  }
  ai = c1 * f - c2 * g;
  aip = c1 * fp - c2 * gp;
}

inline double airy_ai(double x) {
  double ai, aip;
  airy_series(x, ai, aip);
  return ai;
}

/// Bessel J_n(x) and I_n(x) by their power series (n >= 0).
inline double bessel_j(int n, double x) {
  const int an = std::abs(n);
  double term = std::pow(x / 2.0, an) / std::tgamma(an + 1.0);
  double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= -(x * x / 4.0) / (k * (k + an));
    sum += term;
    if (std::abs(term) < 1e-22)
      break;
  }
  return (n < 0 && an % 2 == 1) ? -sum : sum;
}

inline double bessel_i(int n, double x) {
  const int an = std::abs(n);
  double term = std::pow(x / 2.0, an) / std::tgamma(an + 1.0);
  double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= (x * x / 4.0) / (k * (k + an));
    sum += term;
    if (term < 1e-22 * sum)
      break;
  }
  return sum;
}

} // namespace oracle
