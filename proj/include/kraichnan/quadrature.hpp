#pragma once

// Adaptive Gauss-Kronrod quadrature plus the oscillatory-integral helpers
// (half-period panel summation with series acceleration) used throughout the
// covariance layer. Everything here is deterministic and thread-safe.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kraichnan {

struct QuadResult {
  double value = 0.0;
  double err = 0.0;  // absolute error estimate
  long evals = 0;
  bool converged = true;

  QuadResult& operator+=(const QuadResult& o) {
    value += o.value;
    err += o.err;
    evals += o.evals;
    converged = converged && o.converged;
    return *this;
  }
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double best, double err)
      : std::runtime_error(what + " (best estimate " + std::to_string(best) +
                           ", achieved error " + std::to_string(err) + ")"),
        best_value(best),
        err_estimate(err) {}
  double best_value;
  double err_estimate;
};

namespace detail {

// 15-point Kronrod nodes/weights on [-1,1] with the embedded 7-point Gauss rule.
inline constexpr double kKronrodNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double kGaussWeights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

template <class F>
inline QuadResult gk15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fc = f(c);
  double resk = kKronrodWeights[7] * fc;
  double resg = kGaussWeights[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double x = h * kKronrodNodes[j];
    const double f1 = f(c - x), f2 = f(c + x);
    resk += kKronrodWeights[j] * (f1 + f2);
    if (j % 2 == 1) resg += kGaussWeights[j / 2] * (f1 + f2);
  }
  QuadResult r;
  r.value = resk * h;
  const double diff = std::abs(resk - resg) * std::abs(h);
  // standard QUADPACK-style sharpening of the 15-vs-7 discrepancy
  r.err = diff;
  if (diff > 0.0) r.err = diff * std::min(1.0, std::pow(200.0 * diff / (std::abs(r.value) + 1e-300), 1.5)) + 1e-300;
  r.err = std::max(r.err, std::abs(r.value) * 1e-15);
  r.evals = 15;
  return r;
}

struct Panel {
  double a, b, value, err;
  bool operator<(const Panel& o) const { return err < o.err; }
};

}  // namespace detail

// Globally adaptive integration over the union of seed panels: the panel
// with the largest error estimate is bisected until the summed error meets
// tol or the panel budget runs out (QUADPACK-style).
template <class F>
inline QuadResult integrate_seeded(const F& f, const std::vector<double>& pts,
                                   double tol = 1e-10, int max_panels = 4000) {
  QuadResult out;
  if (pts.size() < 2) return out;
  std::vector<detail::Panel> heap;
  heap.reserve(64);
  double total_v = 0.0, total_e = 0.0;
  auto push = [&](double a, double b) {
    QuadResult r = detail::gk15(f, a, b);
    out.evals += r.evals;
    heap.push_back({a, b, r.value, r.err});
    std::push_heap(heap.begin(), heap.end());
    total_v += r.value;
    total_e += r.err;
  };
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    if (pts[i + 1] > pts[i]) push(pts[i], pts[i + 1]);
  while (total_e > tol && static_cast<int>(heap.size()) < max_panels) {
    std::pop_heap(heap.begin(), heap.end());
    detail::Panel w = heap.back();
    heap.pop_back();
    total_v -= w.value;
    total_e -= w.err;
    const double m = 0.5 * (w.a + w.b);
    if (m <= w.a || m >= w.b) {  // interval at machine resolution
      total_v += w.value;
      total_e += w.err;
      heap.push_back(w);
      std::push_heap(heap.begin(), heap.end());
      break;
    }
    push(w.a, m);
    push(m, w.b);
  }
  // compensated sum of panel contributions, smallest errors last
  std::sort(heap.begin(), heap.end(),
            [](const detail::Panel& x, const detail::Panel& y) { return x.err > y.err; });
  double v = 0.0, e = 0.0;
  for (auto it = heap.rbegin(); it != heap.rend(); ++it) {
    v += it->value;
    e += it->err;
  }
  out.value = v;
  out.err = e;
  out.converged = (e <= tol);
  return out;
}

// Adaptive integration of f over the finite interval [a,b].
template <class F>
inline QuadResult integrate(const F& f, double a, double b, double tol = 1e-10,
                            int max_panels = 4000) {
  return integrate_seeded(f, std::vector<double>{a, b}, tol, max_panels);
}

// Integration with interior breakpoints (panel boundaries included verbatim).
template <class F>
inline QuadResult integrate_panels(const F& f, const std::vector<double>& pts,
                                   double tol = 1e-10, int max_panels = 0) {
  const int budget = max_panels > 0
                         ? max_panels
                         : std::max<std::size_t>(4000, 4 * pts.size());
  return integrate_seeded(f, pts, tol, budget);
}

// \int_0^1 g(u) (1-u^2)^{-1/2} du for g even in u, by the midpoint rule in
// theta = arccos(u). Spectrally accurate for smooth g; m is doubled until the
// result is stable to tol.
template <class F>
inline QuadResult gauss_chebyshev_01(const F& g, double tol = 1e-12,
                                     int m0 = 32, int m_max = 8192) {
  auto rule = [&](int m) {
    double s = 0.0;
    const double h = (M_PI / 2.0) / m;
    for (int k = 0; k < m; ++k) s += g(std::cos((k + 0.5) * h));
    return s * h;
  };
  QuadResult r;
  double prev = rule(m0);
  r.evals = m0;
  for (int m = 2 * m0; m <= m_max; m *= 2) {
    const double cur = rule(m);
    r.evals += m;
    r.err = std::abs(cur - prev);
    prev = cur;
    if (r.err <= tol * std::max(1.0, std::abs(cur))) {
      r.value = cur;
      return r;
    }
  }
  r.value = prev;
  r.converged = false;
  return r;
}

// Cohen-Rodriguez Villegas-Zagier acceleration of an alternating series
// sum_k (-1)^k a_k, a_k >= 0. Input: the magnitudes a_k.
inline double cvz_alternating(const std::vector<double>& a) {
  const int n = static_cast<int>(a.size());
  if (n == 0) return 0.0;
  double d = std::pow(3.0 + std::sqrt(8.0), n);
  d = (d + 1.0 / d) / 2.0;
  double b = -1.0, c = -d, s = 0.0;
  for (int k = 0; k < n; ++k) {
    c = b - c;
    s += c * a[k];
    b = (k + n) * (k - n) * b / ((k + 0.5) * (k + 1.0));
  }
  return s / d;
}

// \int_X^infty g(rho) cos(a rho) d rho for g >= 0, eventually monotone
// decreasing to zero, a > 0. Half-period panels aligned with the zeros of
// cos(a rho); the alternating panel sums are accelerated with CVZ.
template <class F>
inline QuadResult osc_cos_tail(const F& g, double X, double a,
                               double tol = 1e-12, int max_panels = 48) {
  if (a <= 0.0) throw std::invalid_argument("osc_cos_tail: need a > 0");
  auto fc = [&](double r) { return g(r) * std::cos(a * r); };
  // first zero of cos(a r) at or after X
  const double j0 = std::ceil((a * X - M_PI / 2.0) / M_PI);
  const double z0 = (M_PI / 2.0 + j0 * M_PI) / a;
  QuadResult acc;
  // head [X, z0]; if the half-period is very wide, log-split so GK resolves
  // the decaying integrand
  auto wide_int = [&](double lo, double hi, double t) {
    if (hi <= lo) return QuadResult{};
    std::vector<double> pts{lo};
    double p = lo;
    while (p * 4.0 < hi && pts.size() < 40) {
      p = std::max(p * 4.0, lo + 1e-3 * (hi - lo));
      if (p < hi) pts.push_back(p);
    }
    pts.push_back(hi);
    return integrate_panels(fc, pts, t);
  };
  acc += wide_int(X, z0, 0.25 * tol);
  const double h = M_PI / a;
  std::vector<double> mags;
  mags.reserve(max_panels);
  double sign0 = 0.0;
  QuadResult panel_err_acc;
  for (int k = 0; k < max_panels; ++k) {
    const double lo = z0 + k * h, hi = z0 + (k + 1) * h;
    QuadResult p = wide_int(lo, hi, 0.1 * tol / max_panels);
    panel_err_acc.err += p.err;
    panel_err_acc.evals += p.evals;
    if (k == 0) sign0 = (p.value >= 0.0) ? 1.0 : -1.0;
    mags.push_back(std::abs(p.value));
    if (k >= 6 && mags[k] <= 1e-3 * tol) break;  // decayed dead
  }
  double accel = cvz_alternating(mags);
  std::vector<double> mags1(mags.begin(), mags.end() - 1);
  const double accel_prev = cvz_alternating(mags1);
  acc.value += sign0 * accel;
  acc.err += std::abs(accel - accel_prev) + panel_err_acc.err;
  acc.evals += panel_err_acc.evals;
  if (std::abs(accel - accel_prev) > tol) acc.converged = false;
  return acc;
}

}  // namespace kraichnan
