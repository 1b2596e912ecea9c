#pragma once

// Bounded-Lipschitz W1 between signed particle ensembles:
//   W1(mu, nu) = sup { |mu(phi) - nu(phi)| : ||phi||_inf + Lip(phi) <= 1 }.
//
// The sliced estimator projects both ensembles on random directions and
// solves the 1D dual exactly for each direction: for a fixed split
// Lip <= k, ||phi||_inf <= 1-k the problem is a chain LP, solved by dynamic
// programming over concave piecewise-linear value functions; the value is
// concave in k, so the split is optimized by ternary search. The result is
// a lower bound on the 2D distance (exact for collinear supports).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "kraichnan/kernels.hpp"
#include "kraichnan/rng.hpp"

namespace kraichnan {

namespace w1_detail {

// Concave piecewise-linear function on [xs.front(), xs.back()] with
// non-increasing slopes; value anchored at the left endpoint.
struct ConcavePwl {
  std::vector<double> xs;      // m+1 boundaries
  std::vector<double> slopes;  // m slopes, non-increasing
  double v_lo = 0.0;

  static ConcavePwl linear(double lo, double hi, double c) {
    ConcavePwl f;
    f.xs = {lo, hi};
    f.slopes = {c};
    f.v_lo = c * lo;
    return f;
  }

  double value_at(double x) const {
    double v = v_lo;
    for (std::size_t i = 0; i < slopes.size(); ++i) {
      const double seg_end = std::min(x, xs[i + 1]);
      if (seg_end > xs[i]) v += slopes[i] * (seg_end - xs[i]);
      if (xs[i + 1] >= x) break;
    }
    return v;
  }

  double max_value() const {
    double v = v_lo, best = v_lo;
    for (std::size_t i = 0; i < slopes.size(); ++i) {
      v += slopes[i] * (xs[i + 1] - xs[i]);
      best = std::max(best, v);
    }
    return best;
  }

  void add_linear(double c) {
    v_lo += c * xs.front();
    for (double& s : slopes) s += c;
  }

  // sup-convolution with the indicator of [-h, h]: left branch moves left,
  // right branch moves right, a flat top of width 2h appears at the argmax
  void widen(double h) {
    if (h <= 0.0) return;
    // locate argmax: last boundary with positive slope before it
    std::size_t cut = 0;
    while (cut < slopes.size() && slopes[cut] > 0.0) ++cut;
    // boundary index `cut` is the argmax position
    std::vector<double> nx, ns;
    nx.reserve(xs.size() + 2);
    ns.reserve(slopes.size() + 1);
    for (std::size_t i = 0; i <= cut; ++i) nx.push_back(xs[i] - h);
    for (std::size_t i = 0; i < cut; ++i) ns.push_back(slopes[i]);
    nx.push_back(xs[cut] + h);
    ns.push_back(0.0);
    for (std::size_t i = cut; i < slopes.size(); ++i) {
      nx.push_back(xs[i + 1] + h);
      ns.push_back(slopes[i]);
    }
    xs = std::move(nx);
    slopes = std::move(ns);
    // left shift preserves the anchored value
  }

  // restrict to [lo, hi] (assumed to intersect the domain)
  void clamp(double lo, double hi) {
    const double vlo_new = value_at(std::max(lo, xs.front()));
    std::vector<double> nx{std::max(lo, xs.front())};
    std::vector<double> ns;
    for (std::size_t i = 0; i < slopes.size(); ++i) {
      const double a = std::max(xs[i], nx.front());
      const double b = std::min(xs[i + 1], hi);
      if (b > a) {
        ns.push_back(slopes[i]);
        nx.push_back(b);
      }
    }
    // widen always grows the domain beyond [lo, hi], so the restriction is
    // proper; keep a degenerate flat stub if roundoff ever collapses it
    if (ns.empty()) {
      ns = {0.0};
      nx.push_back(nx.front());
    }
    xs = std::move(nx);
    slopes = std::move(ns);
    v_lo = vlo_new;
  }
};

struct Projected {
  std::vector<double> x;  // sorted positions
  std::vector<double> c;  // signed weights (mu - nu)
};

inline Projected project(const ParticleEnsemble& a, const ParticleEnsemble& b,
                         Vec2 dir) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(a.size() + b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    pts.push_back({dir.x * a.positions[i].x + dir.y * a.positions[i].y,
                   a.weights[i]});
  for (std::size_t i = 0; i < b.size(); ++i)
    pts.push_back({dir.x * b.positions[i].x + dir.y * b.positions[i].y,
                   -b.weights[i]});
  std::sort(pts.begin(), pts.end());
  Projected out;
  for (const auto& [x, w] : pts) {
    if (!out.x.empty() && x == out.x.back()) {
      out.c.back() += w;
    } else {
      out.x.push_back(x);
      out.c.push_back(w);
    }
  }
  return out;
}

// exact chain LP: max sum c_i phi_i s.t. |phi_i| <= bnd,
// |phi_{i+1} - phi_i| <= k (x_{i+1} - x_i)
inline double chain_lp(const Projected& p, double k, double bnd) {
  if (p.x.empty()) return 0.0;
  if (bnd <= 0.0) return 0.0;
  ConcavePwl v = ConcavePwl::linear(-bnd, bnd, p.c[0]);
  for (std::size_t i = 1; i < p.x.size(); ++i) {
    v.widen(k * (p.x[i] - p.x[i - 1]));
    v.clamp(-bnd, bnd);
    v.add_linear(p.c[i]);
  }
  return v.max_value();
}

// max over the split k + b = 1 (concave in k)
inline double bl_dual_1d(const Projected& p) {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 100; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (chain_lp(p, m1, 1.0 - m1) < chain_lp(p, m2, 1.0 - m2))
      lo = m1;
    else
      hi = m2;
  }
  const double k = 0.5 * (lo + hi);
  return chain_lp(p, k, 1.0 - k);
}

}  // namespace w1_detail

struct W1Result {
  double value = 0.0;
  int directions = 0;
};

// Sliced bounded-Lipschitz W1 estimate (lower bound; exact for collinear
// supports when the axis is among the directions). Requires equal total
// signed mass. Directions are deterministic given `seed`; the first two are
// the coordinate axes.
inline W1Result w1_distance(const ParticleEnsemble& a, const ParticleEnsemble& b,
                            int directions, std::uint64_t seed = 2024) {
  if (a.size() == 0 || b.size() == 0)
    throw std::invalid_argument("w1_distance: empty ensemble");
  if (directions < 1) throw std::invalid_argument("w1_distance: directions >= 1");
  const double mass_gap = std::abs(a.total_mass() - b.total_mass());
  const double scale = std::max(1.0, a.total_variation() + b.total_variation());
  if (mass_gap > 1e-9 * scale)
    throw std::invalid_argument(
        "w1_distance: ensembles must carry equal total signed mass");
  W1Result out;
  out.directions = directions;
  RngStream stream(seed, 0, 0);
  for (int d = 0; d < directions; ++d) {
    Vec2 dir;
    if (d == 0) {
      dir = {1.0, 0.0};
    } else if (d == 1) {
      dir = {0.0, 1.0};
    } else {
      const double th = 2.0 * M_PI * stream.uniform(d);
      dir = {std::cos(th), std::sin(th)};
    }
    w1_detail::Projected p = w1_detail::project(a, b, dir);
    out.value = std::max(out.value, w1_detail::bl_dual_1d(p));
  }
  return out;
}

}  // namespace kraichnan
