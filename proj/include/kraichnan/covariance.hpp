#pragma once

// The Kraichnan covariance layer: the isotropic spectral density
// Qhat(n) = <n>^{-(2+2a)} (I - n n^T/|n|^2), its longitudinal/transverse
// structure functions B_L, B_N, the small-separation constants
// beta_bar, beta_L, beta_N, the quadratic remainder, and the anomalous
// dissipation multiplier tr[(Q(0)-Q(x)) D^2 G(x)].
//
// All real-space quantities are assembled from 1D quadratures of the radial
// kernel J(a) = \int_0^inf (1+r^2)^{-1-a} r cos(a r) dr via a Gauss-Chebyshev
// rule in the angular variable; the oscillatory rho-tails use half-period
// summation with CVZ acceleration.

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "kraichnan/interp.hpp"
#include "kraichnan/quadrature.hpp"
#include "kraichnan/special_functions.hpp"

namespace kraichnan {

// ---------------------------------------------------------------------------
// Parameters

struct KraichnanParams {
  double alpha = 0.5;    // regularity index, in (0,1)
  double delta = 0.1;    // spectral regularization scale, > 0
  double box_len = 2.0 * M_PI;  // periodic box side L
  int grid_n = 64;       // lattice resolution N (even, >= 8)

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0))
      throw std::invalid_argument("KraichnanParams: alpha must be in (0,1)");
    if (!(delta > 0.0))
      throw std::invalid_argument("KraichnanParams: delta must be > 0");
    if (!(box_len > 0.0))
      throw std::invalid_argument("KraichnanParams: box_len must be > 0");
    if (grid_n < 8 || grid_n % 2 != 0)
      throw std::invalid_argument("KraichnanParams: grid_n must be even and >= 8");
  }

  double nyquist() const { return grid_n / (2.0 * box_len); }
  // The regularized covariance lives on |n| <= 2/delta; below-Nyquist
  // representation requires nyquist() > 2/delta.
  bool resolves_cutoff() const { return nyquist() > 2.0 / delta; }
};

struct CovMatrix2 {
  double xx = 0.0, xy = 0.0, yy = 0.0;
  double trace() const { return xx + yy; }
};

struct Vec2 {
  double x = 0.0, y = 0.0;
  double norm() const { return std::hypot(x, y); }
};

// ---------------------------------------------------------------------------
// Spectral cutoff profile chi_delta = (rho_delta hat)^2 applied to Qhat.

enum class CutoffKind { none, sharp, smooth };

struct Cutoff {
  CutoffKind kind = CutoffKind::none;
  double delta = 0.0;

  static Cutoff off() { return {CutoffKind::none, 0.0}; }
  static Cutoff sharp(double d) { return {CutoffKind::sharp, d}; }
  static Cutoff smooth(double d) { return {CutoffKind::smooth, d}; }

  // squared profile chi(|n|); sharp: 1_{|n|<=1/delta}; smooth: cosine taper
  // of rho_hat on [1/delta, 2/delta], squared.
  double chi(double rho) const {
    switch (kind) {
      case CutoffKind::none:
        return 1.0;
      case CutoffKind::sharp:
        return rho <= 1.0 / delta ? 1.0 : 0.0;
      case CutoffKind::smooth: {
        // raised-cosine taper rho_hat = cos^2((pi/2)(|n|delta - 1)); chi = rho_hat^2
        const double rd = rho * delta;
        if (rd <= 1.0) return 1.0;
        if (rd >= 2.0) return 0.0;
        const double c = std::cos(0.5 * M_PI * (rd - 1.0));
        return c * c * c * c;
      }
    }
    return 1.0;
  }

  // upper end of the support of chi (inf if no cutoff)
  double support() const {
    switch (kind) {
      case CutoffKind::none:
        return std::numeric_limits<double>::infinity();
      case CutoffKind::sharp:
        return 1.0 / delta;
      case CutoffKind::smooth:
        return 2.0 / delta;
    }
    return std::numeric_limits<double>::infinity();
  }
};

// ---------------------------------------------------------------------------
// spectral_density: Qhat(n), exact formula.

inline CovMatrix2 spectral_density(Vec2 n, double alpha) {
  const double n2 = n.x * n.x + n.y * n.y;
  if (n2 == 0.0)
    throw std::domain_error("spectral_density: n = 0 rejected (projector undefined)");
  const double scale = std::pow(1.0 + n2, -(1.0 + alpha));
  return {scale * (1.0 - n.x * n.x / n2), scale * (-n.x * n.y / n2),
          scale * (1.0 - n.y * n.y / n2)};
}

// ---------------------------------------------------------------------------
// Radial kernels.
//
//   J(a)   = \int_0^sup (1+r^2)^{-1-alpha} r cos(a r) chi(r) dr
//   D(a)   = J(0) - J(a)  (computed directly, no cancellation)
//
// B_f(R)  = 4 \int_0^1 J(2 pi R u) f(u) (1-u^2)^{-1/2} du,
// with f = 1-u^2 (longitudinal) and f = u^2 (transverse).

namespace cov_detail {

inline std::vector<double> osc_breakpoints(double lo, double hi, double a) {
  std::vector<double> pts{lo};
  if (a > 0.0) {
    const double h = M_PI / a;
    if (h < hi - lo) {
      for (double p = lo + h; p < hi; p += h) {
        pts.push_back(p);
        if (pts.size() > 40000) break;
      }
    }
  }
  pts.push_back(hi);
  return pts;
}

// D(a) for the uncut kernel, a > 0.
inline QuadResult incr_kernel_free(double a, double alpha, double tol) {
  auto g = [alpha](double r) { return std::pow(1.0 + r * r, -1.0 - alpha) * r; };
  const double X = 4.0;
  auto body = [&](double r) {
    const double s = std::sin(0.5 * a * r);
    return g(r) * 2.0 * s * s;
  };
  QuadResult res = integrate_panels(body, osc_breakpoints(0.0, X, a), 0.25 * tol);
  // \int_X^inf g dr exactly
  res.value += std::pow(1.0 + X * X, -alpha) / (2.0 * alpha);
  // minus the oscillatory tail of g cos(a r)
  QuadResult tail = osc_cos_tail(g, X, a, 0.25 * tol);
  res.value -= tail.value;
  res.err += tail.err;
  res.evals += tail.evals;
  res.converged = res.converged && tail.converged;
  return res;
}

// D(a) under a finite-support cutoff, a >= 0.
inline QuadResult incr_kernel_cut(double a, double alpha, const Cutoff& cut,
                                  double tol) {
  const double sup = cut.support();
  auto body = [&](double r) {
    const double s = std::sin(0.5 * a * r);
    return std::pow(1.0 + r * r, -1.0 - alpha) * r * cut.chi(r) * 2.0 * s * s;
  };
  return integrate_panels(body, osc_breakpoints(0.0, sup, a), tol);
}

inline QuadResult incr_kernel(double a, double alpha, const Cutoff& cut,
                              double tol) {
  if (a == 0.0) return {};
  if (cut.kind == CutoffKind::none) return incr_kernel_free(a, alpha, tol);
  return incr_kernel_cut(a, alpha, cut, tol);
}

// J(0) = \int_0^sup (1+r^2)^{-1-alpha} r chi(r) dr.
inline QuadResult kernel_at_zero(double alpha, const Cutoff& cut, double tol) {
  QuadResult r;
  switch (cut.kind) {
    case CutoffKind::none:
      r.value = 1.0 / (2.0 * alpha);
      return r;
    case CutoffKind::sharp: {
      const double c = 1.0 / cut.delta;
      r.value = (1.0 - std::pow(1.0 + c * c, -alpha)) / (2.0 * alpha);
      return r;
    }
    case CutoffKind::smooth: {
      auto g = [&](double rho) {
        return std::pow(1.0 + rho * rho, -1.0 - alpha) * rho * cut.chi(rho);
      };
      return integrate(g, 0.0, cut.support(), tol);
    }
  }
  return r;
}

// angular weights: \int_0^1 f(u)(1-u^2)^{-1/2} du = pi/4 for both selectors
inline constexpr double kAngularMass = M_PI / 4.0;

}  // namespace cov_detail

// ---------------------------------------------------------------------------
// structure functions and increments

struct StructurePair {
  double b_l = 0.0, b_n = 0.0;
  double err = 0.0;
};

namespace cov_detail {

// 4 \int_0^inf r^{-1-2 alpha} (1-cos(2 pi r)) dr, the beta_bar integral.
inline QuadResult beta_bar_quad(double alpha, double tol) {
  auto pw = [alpha](double r) { return std::pow(r, -1.0 - 2.0 * alpha); };
  auto head = [&](double r) {
    const double s = std::sin(M_PI * r);
    return pw(r) * 2.0 * s * s;
  };
  QuadResult h = integrate(head, 0.0, 1.0, tol / 8.0);
  QuadResult t = osc_cos_tail(pw, 1.0, 2.0 * M_PI, tol / 8.0);
  QuadResult out;
  out.value = 4.0 * (h.value + 1.0 / (2.0 * alpha) - t.value);
  out.err = 4.0 * (h.err + t.err);
  out.evals = h.evals + t.evals;
  out.converged = h.converged && t.converged;
  return out;
}

}  // namespace cov_detail

// B_L(0)-B_L(R) and B_N(0)-B_N(R); free of the B(0) cancellation.
//
// In the uncut case D(a) carries an a^{2 alpha} cusp at a = 0 whose angular
// integral is a Beta-function mass; it is split off exactly so the
// Gauss-Chebyshev rule only sees the smooth part.
inline StructurePair structure_function_increments(double R, double alpha,
                                                   double tol = 1e-10,
                                                   const Cutoff& cut = Cutoff::off()) {
  if (R < 0.0) throw std::domain_error("structure_function_increments: R >= 0");
  StructurePair out;
  if (R == 0.0) return out;
  const bool split_cusp = (cut.kind == CutoffKind::none);
  double bbar = 0.0, bbar_err = 0.0;
  if (split_cusp) {
    QuadResult bb = cov_detail::beta_bar_quad(alpha, tol / 16.0);
    bbar = bb.value;
    bbar_err = bb.err;
  }
  double inner_err = 0.0;
  bool ok = true;
  auto smooth_part = [&](double u) {
    QuadResult q = cov_detail::incr_kernel(2.0 * M_PI * R * u, alpha, cut, tol / 16.0);
    inner_err = std::max(inner_err, q.err);
    ok = ok && q.converged;
    double v = q.value;
    if (split_cusp) v -= 0.25 * bbar * std::pow(R * u, 2.0 * alpha);
    return v;
  };
  QuadResult ql = gauss_chebyshev_01(
      [&](double u) { return smooth_part(u) * (1.0 - u * u); }, tol);
  QuadResult qn = gauss_chebyshev_01(
      [&](double u) { return smooth_part(u) * u * u; }, tol);
  out.b_l = 4.0 * ql.value;
  out.b_n = 4.0 * qn.value;
  if (split_cusp) {
    const double il = 0.5 * beta_function(alpha + 0.5, 1.5);
    const double in = 0.5 * beta_function(alpha + 1.5, 0.5);
    const double r2a = std::pow(R, 2.0 * alpha);
    out.b_l += bbar * il * r2a;
    out.b_n += bbar * in * r2a;
    out.err += bbar_err * std::max(il, in) * r2a;
  }
  out.err += 4.0 * (ql.err + qn.err) + 4.0 * M_PI * inner_err;
  if (!ok || !ql.converged || !qn.converged)
    throw QuadratureError("structure_function_increments: quadrature did not converge",
                          out.b_l, out.err);
  return out;
}

// (B_L(R), B_N(R)) with reported absolute error.
inline StructurePair structure_functions(double R, double alpha,
                                         double tol = 1e-10,
                                         const Cutoff& cut = Cutoff::off()) {
  QuadResult j0 = cov_detail::kernel_at_zero(alpha, cut, tol / 16.0);
  const double b0 = 4.0 * j0.value * cov_detail::kAngularMass;
  StructurePair inc = structure_function_increments(R, alpha, tol, cut);
  StructurePair out;
  out.b_l = b0 - inc.b_l;
  out.b_n = b0 - inc.b_n;
  out.err = inc.err + 4.0 * M_PI * j0.err;
  return out;
}

// ---------------------------------------------------------------------------
// beta constants

struct BetaConstants {
  double beta_bar = 0.0;
  double beta_l = 0.0;
  double beta_n = 0.0;
  double err = 0.0;
};

// beta_bar = 4 \int_0^inf r^{-1-2 alpha} (1 - cos(2 pi r)) dr by split
// quadrature; beta_L, beta_N via the Beta function, so beta_N/beta_L = 1+2a
// holds exactly along that route.
inline BetaConstants beta_constants(double alpha, double tol = 1e-10) {
  if (!(tol > 0.0)) throw std::invalid_argument("beta_constants: tol > 0");
  QuadResult bb = cov_detail::beta_bar_quad(alpha, tol);
  BetaConstants out;
  out.beta_bar = bb.value;
  out.err = bb.err;
  if (!bb.converged)
    throw QuadratureError("beta_constants: tail truncation error exceeds tol",
                          out.beta_bar, out.err);
  // \int_0^1 u^{2a}(1-u^2)^{1/2} du = B(a+1/2, 3/2)/2,
  // \int_0^1 u^{2a+2}(1-u^2)^{-1/2} du = B(a+3/2, 1/2)/2
  const double il = 0.5 * beta_function(alpha + 0.5, 1.5);
  const double in = 0.5 * beta_function(alpha + 1.5, 0.5);
  out.beta_l = out.beta_bar * il;
  out.beta_n = out.beta_bar * in;
  return out;
}

// ---------------------------------------------------------------------------
// Appendix-style remainder Rem_f(R) = (B_f(0)-B_f(R)) - beta_f R^{2 alpha},
// evaluated by direct quadrature of its own double integral.

enum class FSelector { longitudinal, transverse };

struct RemainderResult {
  double value = 0.0;
  double err = 0.0;
};

namespace cov_detail {

// K(s) = \int_0^inf [ (s^2+r^2)^{-1-a} - r^{-2-2a} ] r (1-cos(2 pi r)) dr
inline QuadResult remainder_radial(double s, double alpha, double tol) {
  QuadResult out;
  if (s == 0.0) return out;
  const double eps = 0.1, X = 4.0;
  auto one_minus_cos = [](double r) {
    const double t = std::sin(M_PI * r);
    return 2.0 * t * t;
  };
  // regular part on [0, eps]
  auto reg = [&](double r) {
    return std::pow(s * s + r * r, -1.0 - alpha) * r * one_minus_cos(r);
  };
  out += integrate(reg, 0.0, eps, tol / 8.0);
  // power-law part on [0, eps] by the cosine series:
  // \int_0^eps r^{-1-2a}(1-cos 2 pi r) dr = sum_k (-1)^{k+1} (2 pi)^{2k} eps^{2k-2a} / ((2k)! (2k-2a))
  {
    double sum = 0.0, pw = 1.0;
    for (int k = 1; k <= 40; ++k) {
      pw *= -(2.0 * M_PI * eps) * (2.0 * M_PI * eps) / ((2.0 * k - 1) * (2.0 * k));
      const double term = -pw * std::pow(eps, -2.0 * alpha) / (2.0 * k - 2.0 * alpha);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    out.value -= sum;
  }
  // difference on [eps, X]
  auto diff = [&](double r) {
    return (std::pow(s * s + r * r, -1.0 - alpha) - std::pow(r, -2.0 - 2.0 * alpha)) * r;
  };
  auto mid = [&](double r) { return diff(r) * one_minus_cos(r); };
  out += integrate_panels(mid, osc_breakpoints(eps, X, 2.0 * M_PI), tol / 8.0);
  // exact non-oscillatory tail of diff * r
  out.value += (std::pow(s * s + X * X, -alpha) - std::pow(X, -2.0 * alpha)) / (2.0 * alpha);
  // oscillatory tail: -\int_X^inf diff(r) cos(2 pi r) dr, diff < 0
  auto mag = [&](double r) { return -diff(r); };
  QuadResult t = osc_cos_tail(mag, X, 2.0 * M_PI, tol / 8.0);
  out.value += t.value;
  out.err += t.err;
  out.evals += t.evals;
  out.converged = out.converged && t.converged;
  return out;
}

}  // namespace cov_detail

inline RemainderResult remainder_eval(double R, FSelector f, double alpha,
                                      double tol = 1e-10) {
  if (R < 0.0) throw std::domain_error("remainder_eval: R >= 0");
  RemainderResult out;
  if (R == 0.0) return out;  // integrand vanishes identically
  // tabulate K(s) on s in [0, R]
  const int nk = 512;
  std::vector<double> sx(nk), sy(nk);
  double kerr = 0.0;
  bool ok = true;
  for (int i = 0; i < nk; ++i) {
    const double s = R * i / (nk - 1.0);
    QuadResult q = cov_detail::remainder_radial(s, alpha, tol / 16.0);
    sx[i] = s;
    sy[i] = q.value;
    kerr = std::max(kerr, q.err);
    ok = ok && q.converged;
  }
  PchipInterpolant kint(sx, sy);
  const double fsel = (f == FSelector::longitudinal) ? 1.0 : 0.0;
  auto g = [&](double u) {
    const double fu = fsel * (1.0 - u * u) + (1.0 - fsel) * u * u;
    return kint(R * u) * fu * std::pow(u, 2.0 * alpha);
  };
  QuadResult q = gauss_chebyshev_01(g, tol);
  out.value = 4.0 * std::pow(R, 2.0 * alpha) * q.value;
  out.err = 4.0 * std::pow(R, 2.0 * alpha) * (q.err + M_PI * kerr);
  if (!ok || !q.converged)
    throw QuadratureError("remainder_eval: quadrature did not converge",
                          out.value, out.err);
  return out;
}

// ---------------------------------------------------------------------------
// covariance_eval and the dissipation multiplier

// Q(x) = B_L(|x|) xx^T/|x|^2 + B_N(|x|) (I - xx^T/|x|^2); Q(0) = (pi/2a) I
// in the uncut case (and J(0)-scaled analogue under a cutoff).
inline CovMatrix2 covariance_eval(Vec2 x, double alpha, double tol = 1e-10,
                                  const Cutoff& cut = Cutoff::off()) {
  const double R = x.norm();
  if (R == 0.0) {
    const double q0 = 4.0 * cov_detail::kernel_at_zero(alpha, cut, tol).value *
                      cov_detail::kAngularMass;
    return {q0, 0.0, q0};
  }
  StructurePair sf = structure_functions(R, alpha, tol, cut);
  const double ex = x.x / R, ey = x.y / R;
  CovMatrix2 q;
  q.xx = sf.b_l * ex * ex + sf.b_n * ey * ey;
  q.yy = sf.b_l * ey * ey + sf.b_n * ex * ex;
  q.xy = (sf.b_l - sf.b_n) * ex * ey;
  return q;
}

// tr[(Q(0)-Q(x)) D^2 G(x)] = -(1/2pi) (B_L(|x|)-B_N(|x|)) / |x|^2, x != 0.
inline double dissipation_multiplier(Vec2 x, double alpha, double tol = 1e-10) {
  const double R = x.norm();
  if (R == 0.0)
    throw std::domain_error("dissipation_multiplier: x = 0 is singular");
  StructurePair inc = structure_function_increments(R, alpha, tol);
  // B_L - B_N = incN - incL
  return -(inc.b_n - inc.b_l) / (2.0 * M_PI * R * R);
}

// ---------------------------------------------------------------------------
// Tabulated radial covariance for hot paths (two-point sampling, SDE
// coefficients). Increment tables are pchip fits of log D against log a.

struct StructureFunctionTable {
  std::vector<double> radii;
  std::vector<double> b_longitudinal;
  std::vector<double> b_transverse;
  double beta_l = 0.0, beta_n = 0.0, beta_bar = 0.0;
  std::vector<double> quad_err;
};

class BTable {
 public:
  BTable(double alpha, double r_max, const Cutoff& cut = Cutoff::off(),
         double tol = 1e-10, int n_nodes = 1200)
      : alpha_(alpha), cut_(cut), split_cusp_(cut.kind == CutoffKind::none) {
    b0_ = 4.0 * cov_detail::kernel_at_zero(alpha, cut, tol).value *
          cov_detail::kAngularMass;
    if (split_cusp_) beta_bar_ = cov_detail::beta_bar_quad(alpha, tol).value;
    mass_l_ = 0.5 * beta_function(alpha + 0.5, 1.5);
    mass_n_ = 0.5 * beta_function(alpha + 1.5, 0.5);
    const double a_lo = 1e-6, a_hi = 2.0 * M_PI * r_max * 1.05;
    std::vector<double> la(n_nodes), ll(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
      la[i] = std::log(a_lo) + (std::log(a_hi) - std::log(a_lo)) * i / (n_nodes - 1.0);
      QuadResult q = cov_detail::incr_kernel(std::exp(la[i]), alpha, cut, tol);
      ll[i] = std::log(std::max(q.value, 1e-300));
      max_err_ = std::max(max_err_, q.err);
    }
    logd_ = PchipInterpolant(la, ll);
    a_lo_ = a_lo;
    // fixed Chebyshev nodes for the angular integral of the smooth part
    const int m = 320;
    nodes_.resize(m);
    const double h = (M_PI / 2.0) / m;
    for (int k = 0; k < m; ++k) nodes_[k] = std::cos((k + 0.5) * h);
    wgt_ = h;
  }

  double alpha() const { return alpha_; }
  double b0() const { return b0_; }
  double table_err() const { return max_err_; }

  // B_f(0) - B_f(R)
  double delta_l(double R) const { return angular(R, true); }
  double delta_n(double R) const { return angular(R, false); }
  double bl(double R) const { return b0_ - delta_l(R); }
  double bn(double R) const { return b0_ - delta_n(R); }

 private:
  double dkernel(double a) const {
    if (a <= 0.0) return 0.0;
    if (a < a_lo_)  // power-law extrapolation D ~ a^{2 alpha}
      return std::exp(logd_(std::log(a_lo_))) *
             std::pow(a / a_lo_, 2.0 * alpha_);
    return std::exp(logd_(std::log(a)));
  }

  double angular(double R, bool longitudinal) const {
    if (R <= 0.0) return 0.0;
    const double r2a = std::pow(R, 2.0 * alpha_);
    double s = 0.0;
    for (double u : nodes_) {
      const double f = longitudinal ? (1.0 - u * u) : (u * u);
      double v = dkernel(2.0 * M_PI * R * u);
      if (split_cusp_)
        v -= 0.25 * beta_bar_ * r2a * std::pow(u, 2.0 * alpha_);
      s += v * f;
    }
    double out = 4.0 * s * wgt_;
    if (split_cusp_)
      out += beta_bar_ * (longitudinal ? mass_l_ : mass_n_) * r2a;
    return out;
  }

  double alpha_;
  Cutoff cut_;
  bool split_cusp_;
  double b0_ = 0.0;
  double beta_bar_ = 0.0;
  double mass_l_ = 0.0, mass_n_ = 0.0;
  double a_lo_ = 1e-6;
  double max_err_ = 0.0;
  PchipInterpolant logd_;
  std::vector<double> nodes_;
  double wgt_ = 0.0;
};

// Tabulation of (R, B_L, B_N, err) rows plus the beta constants.
inline StructureFunctionTable tabulate_structure_functions(
    const std::vector<double>& radii, double alpha, double tol = 1e-9,
    const Cutoff& cut = Cutoff::off()) {
  StructureFunctionTable t;
  t.radii = radii;
  BetaConstants bc = beta_constants(alpha, tol);
  t.beta_bar = bc.beta_bar;
  t.beta_l = bc.beta_l;
  t.beta_n = bc.beta_n;
  for (double r : radii) {
    StructurePair sf = structure_functions(r, alpha, tol, cut);
    t.b_longitudinal.push_back(sf.b_l);
    t.b_transverse.push_back(sf.b_n);
    t.quad_err.push_back(sf.err);
  }
  return t;
}

}  // namespace kraichnan
