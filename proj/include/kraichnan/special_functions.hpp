#pragma once

// Exponential integral E1 (series + continued fraction, ~14 digits) and the
// Gamma-function helpers used by the Riesz kernels. E1 is kept in-module so
// the kernel layer is bit-stable across platforms.

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kraichnan {

// E1(x) = \int_x^infty e^{-t}/t dt, x > 0.
inline double expint_e1(double x) {
  if (x < 0.0) throw std::domain_error("expint_e1: x must be >= 0");
  if (x == 0.0) return std::numeric_limits<double>::infinity();
  if (x <= 1.0) {
    // E1(x) = -gamma - log x + sum_{k>=1} (-1)^{k+1} x^k / (k k!)
    constexpr double euler_gamma = 0.57721566490153286060651209;
    double sum = 0.0, term = 1.0;
    for (int k = 1; k <= 40; ++k) {
      term *= -x / k;
      const double add = -term / k;
      sum += add;
      if (std::abs(add) < 1e-18 * std::abs(sum)) break;
    }
    return -euler_gamma - std::log(x) + sum;
  }
  if (x > 700.0) return 0.0;  // underflows double
  // Lentz continued fraction: E1(x) = e^{-x} / (x + 1/(1 + 1/(x + 2/(1 + ...))))
  const double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 200; ++i) {
    const double a = -static_cast<double>(i) * i;
    b += 2.0;
    d = a * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + a / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x);
}

// gamma_{2 beta} = pi 2^{2 beta} Gamma(beta) / Gamma(1 - beta), 0 < beta < 1,
// the normalization of the Riesz kernel G_beta(x) = gamma_{2 beta}^{-1} |x|^{-2+2 beta}.
inline double riesz_gamma(double beta) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::domain_error("riesz_gamma: beta must be in (0,1)");
  return M_PI * std::pow(2.0, 2.0 * beta) * std::tgamma(beta) /
         std::tgamma(1.0 - beta);
}

// Euler Beta function.
inline double beta_function(double a, double b) {
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

}  // namespace kraichnan
