#pragma once

// Green and Biot-Savart kernels, their delta-regularizations
// G^delta(x) = \int_delta^{1/delta} p_s(x) ds (heat-kernel window) in closed
// form via the exponential integral, and the Riesz-potential pairing that
// represents negative-order homogeneous Sobolev norms as pairwise sums.

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "kraichnan/covariance.hpp"
#include "kraichnan/special_functions.hpp"

namespace kraichnan {

// ---------------------------------------------------------------------------
// Unregularized kernels (pointwise, x != 0)

inline double green_kernel(Vec2 x) {
  const double r = x.norm();
  if (r == 0.0) throw std::domain_error("green_kernel: log singularity at 0");
  return -std::log(r) / (2.0 * M_PI);
}

inline Vec2 biot_savart_kernel(Vec2 x) {
  const double r2 = x.x * x.x + x.y * x.y;
  if (r2 == 0.0) throw std::domain_error("biot_savart_kernel: singular at 0");
  // K = grad^perp G with x^perp = (x2, -x1)
  return {-x.y / (2.0 * M_PI * r2), x.x / (2.0 * M_PI * r2)};
}

// ---------------------------------------------------------------------------
// Regularized Green kernel and derivatives

// G^delta(x) = (1/4pi) [E1(|x|^2 delta / 4) - E1(|x|^2 / (4 delta))];
// at x = 0 the s-integral gives (1/2pi) log(1/delta).
inline double green_regularized(Vec2 x, double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("green_regularized: delta in (0,1)");
  const double r2 = x.x * x.x + x.y * x.y;
  if (r2 == 0.0) return std::log(1.0 / delta) / (2.0 * M_PI);
  return (expint_e1(r2 * delta / 4.0) - expint_e1(r2 / (4.0 * delta))) /
         (4.0 * M_PI);
}

// grad G^delta(x) = -(x / 2 pi |x|^2) (e^{-|x|^2 delta/4} - e^{-|x|^2/(4 delta)});
// the odd-symmetry limit 0 is used at x = 0.
inline Vec2 grad_green_regularized(Vec2 x, double delta) {
  const double r2 = x.x * x.x + x.y * x.y;
  if (r2 == 0.0) return {0.0, 0.0};
  const double w = (std::exp(-r2 * delta / 4.0) - std::exp(-r2 / (4.0 * delta))) /
                   (2.0 * M_PI * r2);
  return {-x.x * w, -x.y * w};
}

// K^delta = grad^perp G^delta
inline Vec2 biot_savart_regularized(Vec2 x, double delta) {
  Vec2 g = grad_green_regularized(x, delta);
  return {g.y, -g.x};
}

// Pointwise Hessian of G^delta; finite everywhere, with the direction-free
// limit -((1/delta - delta)/8pi) I at x = 0. A short series handles the
// cancellation-prone region |x|^2/(4 delta) << 1.
inline CovMatrix2 hess_green_regularized(Vec2 x, double delta) {
  const double r2 = x.x * x.x + x.y * x.y;
  if (r2 / (4.0 * delta) < 1e-3) {
    // D^2 G^delta = (1/4pi) \int e^{-r^2/4s} [-I s^{-2}/2 + xx^T s^{-3}/4] ds
    const double s2 = 1.0 / delta - delta;
    const double s3 = 0.5 * (1.0 / (delta * delta) - delta * delta);
    const double s4 = (1.0 / (delta * delta * delta) - delta * delta * delta) / 3.0;
    const double s5 = 0.25 * (std::pow(delta, -4.0) - std::pow(delta, 4.0));
    const double diag = -0.5 * (s2 - 0.25 * r2 * s3 + r2 * r2 * s4 / 32.0);
    const double quad = 0.25 * (s3 - 0.25 * r2 * s4 + r2 * r2 * s5 / 32.0);
    CovMatrix2 h;
    h.xx = (diag + quad * x.x * x.x) / (4.0 * M_PI);
    h.yy = (diag + quad * x.y * x.y) / (4.0 * M_PI);
    h.xy = quad * x.x * x.y / (4.0 * M_PI);
    return h;
  }
  const double ea = std::exp(-r2 * delta / 4.0);
  const double eb = std::exp(-r2 / (4.0 * delta));
  const double pxx = x.x * x.x / r2, pyy = x.y * x.y / r2, pxy = x.x * x.y / r2;
  CovMatrix2 h;
  const double c = 1.0 / (2.0 * M_PI * r2);
  h.xx = c * ((-1.0 + 2.0 * pxx + delta * x.x * x.x / 2.0) * ea -
              (-1.0 + 2.0 * pxx + x.x * x.x / (2.0 * delta)) * eb);
  h.yy = c * ((-1.0 + 2.0 * pyy + delta * x.y * x.y / 2.0) * ea -
              (-1.0 + 2.0 * pyy + x.y * x.y / (2.0 * delta)) * eb);
  h.xy = c * ((2.0 * pxy + delta * x.x * x.y / 2.0) * ea -
              (2.0 * pxy + x.x * x.y / (2.0 * delta)) * eb);
  return h;
}

// ---------------------------------------------------------------------------
// Fourier multipliers (transform convention fhat(n) = \int f e^{-2 pi i x.n})

// Ghat^delta(n) = (2pi)^{-2} |n|^{-2} (e^{-delta 4 pi^2 |n|^2} - e^{-4 pi^2 |n|^2 / delta})
inline double green_regularized_multiplier(double n_abs, double delta) {
  if (n_abs == 0.0) return 0.0;  // zero-mean convention
  const double k2 = 4.0 * M_PI * M_PI * n_abs * n_abs;
  return (std::exp(-delta * k2) - std::exp(-k2 / delta)) /
         (4.0 * M_PI * M_PI * n_abs * n_abs);
}

// Khat(n) = (2 pi)^{-1} i n^perp / |n|^2, n^perp = (n2, -n1).
inline std::complex<double> biot_savart_multiplier_x(Vec2 n) {
  const double n2 = n.x * n.x + n.y * n.y;
  if (n2 == 0.0) throw std::domain_error("biot_savart_multiplier: n = 0");
  return {0.0, n.y / (2.0 * M_PI * n2)};
}
inline std::complex<double> biot_savart_multiplier_y(Vec2 n) {
  const double n2 = n.x * n.x + n.y * n.y;
  if (n2 == 0.0) throw std::domain_error("biot_savart_multiplier: n = 0");
  return {0.0, -n.x / (2.0 * M_PI * n2)};
}

// ratio Ghat^delta / Ghat, the regularization factor for K^delta in Fourier
inline double green_delta_ratio(double n_abs, double delta) {
  const double k2 = 4.0 * M_PI * M_PI * n_abs * n_abs;
  return std::exp(-delta * k2) - std::exp(-k2 / delta);
}

// ---------------------------------------------------------------------------
// Sobolev-norm weights

enum class NormFlavor { homogeneous, inhomogeneous, tilde_minus4, riesz_pairing };

struct NormSpec {
  double exponent = 0.0;
  NormFlavor flavor = NormFlavor::inhomogeneous;

  static NormSpec homogeneous(double s) { return {s, NormFlavor::homogeneous}; }
  static NormSpec inhomogeneous(double s) { return {s, NormFlavor::inhomogeneous}; }
  static NormSpec tilde_minus4() { return {-4.0, NormFlavor::tilde_minus4}; }

  // Plancherel weight at |n|; the homogeneous weight is undefined at n = 0
  // (callers must exclude the zero mode for s < 0).
  double weight(double n_abs) const {
    switch (flavor) {
      case NormFlavor::homogeneous:
        return std::pow(n_abs * n_abs, exponent);
      case NormFlavor::inhomogeneous:
        return std::pow(1.0 + n_abs * n_abs, exponent);
      case NormFlavor::tilde_minus4:
        return std::pow(1.0 + n_abs * n_abs, -3.0) / (n_abs * n_abs);
      case NormFlavor::riesz_pairing:
        return std::pow(n_abs * n_abs, exponent);
    }
    return 0.0;
  }
};

// ---------------------------------------------------------------------------
// Particle ensembles and Riesz pairing

struct ParticleEnsemble {
  std::vector<Vec2> positions;
  std::vector<double> weights;  // signed vorticity mass

  std::size_t size() const { return positions.size(); }
  double total_variation() const {
    double s = 0.0;
    for (double w : weights) s += std::abs(w);
    return s;
  }
  double total_mass() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }
};

struct RieszPairingResult {
  double value = 0.0;
  long coincident_pairs = 0;  // excluded from the sum
};

// ||f||_{Hdot^{-beta}}^2 as (2 pi)^{2 beta} gamma_{2 beta}^{-1}
// sum_{i != j} w_i w_j |x_i - x_j|^{-2+2 beta}.
inline RieszPairingResult riesz_pairing(const ParticleEnsemble& e, double beta) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::domain_error("riesz_pairing: beta in (0,1)");
  if (e.size() < 2)
    throw std::invalid_argument("riesz_pairing: need at least 2 particles");
  RieszPairingResult out;
  const double expo = -2.0 + 2.0 * beta;
  double s = 0.0;
  const std::size_t n = e.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = e.positions[i].x - e.positions[j].x;
      const double dy = e.positions[i].y - e.positions[j].y;
      const double r2 = dx * dx + dy * dy;
      if (r2 == 0.0) {
        ++out.coincident_pairs;
        continue;
      }
      s += e.weights[i] * e.weights[j] * std::pow(r2, 0.5 * expo);
    }
  out.value = 2.0 * s * std::pow(2.0 * M_PI, 2.0 * beta) / riesz_gamma(beta);
  return out;
}

// log-kernel variant sum_{i != j} w_i w_j log |x_i - x_j|^{-1}, the beta = 1
// endpoint functional of the Lagrangian dissipation bound.
inline RieszPairingResult log_pairing(const ParticleEnsemble& e) {
  if (e.size() < 2)
    throw std::invalid_argument("log_pairing: need at least 2 particles");
  RieszPairingResult out;
  double s = 0.0;
  const std::size_t n = e.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = e.positions[i].x - e.positions[j].x;
      const double dy = e.positions[i].y - e.positions[j].y;
      const double r2 = dx * dx + dy * dy;
      if (r2 == 0.0) {
        ++out.coincident_pairs;
        continue;
      }
      s += -0.5 * e.weights[i] * e.weights[j] * std::log(r2);
    }
  out.value = 2.0 * s;
  return out;
}

}  // namespace kraichnan
