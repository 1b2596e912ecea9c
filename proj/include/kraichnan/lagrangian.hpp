#pragma once

// Lagrangian machinery: two-point motion under the Kraichnan field, the
// reduced 1D distance diffusion with its Bessel-dimension estimate, the
// pairwise log/Riesz energies, and the flow-pushforward Picard iteration
// whose fixed point solves the regularized equation for a given noise path.

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "kraichnan/covariance.hpp"
#include "kraichnan/kernels.hpp"
#include "kraichnan/noise.hpp"
#include "kraichnan/rng.hpp"

namespace kraichnan {

// ---------------------------------------------------------------------------
// Two-point step with the exact 4x4 joint covariance
//
//   dt * [[Q(0), Q(x-y)], [Q(x-y), Q(0)]]
//
// factorized in the (r_par, r_perp) frame: the symmetric/antisymmetric
// combinations decouple with variances q0 +- B_L and q0 +- B_N.

struct TwoPointStepResult {
  Vec2 x, y;
};

inline TwoPointStepResult two_point_step_cholesky(Vec2 x, Vec2 y, double dt,
                                                  const BTable& cov,
                                                  const RngStream& stream,
                                                  std::uint64_t draw_base) {
  const double q0 = cov.b0();
  const double rx = x.x - y.x, ry = x.y - y.y;
  const double r = std::hypot(rx, ry);
  double ex = 1.0, ey = 0.0;
  double bl = q0, bn = q0;  // coincident points: full correlation
  if (r > 0.0) {
    ex = rx / r;
    ey = ry / r;
    bl = cov.bl(r);
    bn = cov.bn(r);
  }
  // eigenvalues of the 2x2 pair blocks; clip tiny negative roundoff
  auto clip = [q0](double v) {
    if (v < 0.0) {
      if (v < -1e-12 * q0)
        throw std::runtime_error("two_point_step: covariance not PSD");
      return 0.0;
    }
    return v;
  };
  const double sp_l = std::sqrt(clip(q0 + bl) * dt / 2.0);
  const double sm_l = std::sqrt(clip(q0 - bl) * dt / 2.0);
  const double sp_n = std::sqrt(clip(q0 + bn) * dt / 2.0);
  const double sm_n = std::sqrt(clip(q0 - bn) * dt / 2.0);
  double g0, g1, g2, g3;
  stream.normal_pair(draw_base, g0, g1);
  stream.normal_pair(draw_base + 1, g2, g3);
  // longitudinal (along e) and transverse components of the two increments
  const double dxl = sp_l * g0 + sm_l * g1;
  const double dyl = sp_l * g0 - sm_l * g1;
  const double dxn = sp_n * g2 + sm_n * g3;
  const double dyn = sp_n * g2 - sm_n * g3;
  TwoPointStepResult out;
  out.x = {x.x + dxl * ex - dxn * ey, x.y + dxl * ey + dxn * ex};
  out.y = {y.x + dyl * ex - dyn * ey, y.y + dyl * ey + dyn * ex};
  return out;
}

// Lattice-field route: both particles advect under one field realization.
inline TwoPointStepResult two_point_step_lattice(Vec2 x, Vec2 y,
                                                 const KraichnanNoise& noise,
                                                 const NoiseIncrement& inc) {
  auto v = noise.evaluate_at_points(inc, {x, y});
  return {{x.x + v[0].x, x.y + v[0].y}, {y.x + v[1].x, y.y + v[1].y}};
}

// ---------------------------------------------------------------------------
// Reduced distance SDE  dR = b(R) dt + sigma(R) d beta, reflected at 0, with
//   sigma^2(R) = 2 (B_L(0) - B_L(R)),  b(R) = (B_N(0) - B_N(R)) / R.
//
// In idealized mode the coefficients are the pure small-R powers
// sigma^2 = 2 beta_L R^{2 alpha}, b = beta_N R^{2 alpha - 1}; then
// Y = R^{2(1-alpha)} is a squared Bessel process of dimension 2/(1-alpha)
// and constant diffusion scale, and the Euler-Maruyama step is taken in Y
// where the drift is constant (the R-form drift is singular at 0 for
// alpha < 1/2, which the exact same-law Y-step sidesteps).

enum class DistanceMode { exact, idealized };

struct DistanceSde {
  double alpha;
  double beta_l, beta_n;
  const BTable* table = nullptr;  // required for exact mode

  double sigma2(double r) const {
    if (r <= 0.0) return 0.0;
    return 2.0 * (table ? table->delta_l(r) : beta_l * std::pow(r, 2.0 * alpha));
  }
  double drift(double r) const {
    if (r <= 0.0) return 0.0;
    return (table ? table->delta_n(r) : beta_n * std::pow(r, 2.0 * alpha)) / r;
  }
};

inline double distance_sde_step(double r, double dt, const DistanceSde& sde,
                                DistanceMode mode, const RngStream& stream,
                                std::uint64_t draw) {
  if (r < 0.0) throw std::domain_error("distance_sde_step: r >= 0");
  const double z = stream.normal(draw);
  if (mode == DistanceMode::idealized) {
    const double a = sde.alpha;
    const double d_eff = 2.0 / (1.0 - a);
    const double sz2 = 2.0 * (1.0 - a) * (1.0 - a) * sde.beta_l;
    double ycur = std::pow(r, 2.0 * (1.0 - a));
    ycur = std::abs(ycur + d_eff * sz2 * dt +
                    2.0 * std::sqrt(sz2 * std::max(ycur, 0.0) * dt) * z);
    return std::pow(ycur, 0.5 / (1.0 - a));
  }
  const double b = sde.drift(r);
  const double s = std::sqrt(sde.sigma2(r));
  return std::abs(r + b * dt + s * std::sqrt(dt) * z);
}

// ---------------------------------------------------------------------------
// Bessel dimension estimate from the linear growth of E[Z_t^2], Z = R^{1-a}:
// E[Z_t^2] = Z_0^2 + d_eff sigma_Z^2 t with sigma_Z^2 = 2 (1-a)^2 beta_L.

struct BesselEstimate {
  double d_eff = 0.0;
  double std_err = 0.0;
  double survival_fraction = 0.0;  // paths with R > 0 at the end
};

inline BesselEstimate bessel_dimension_estimate(
    double alpha, double beta_l, double beta_n, double r0, double t_end,
    double dt, int n_paths, std::uint64_t seed) {
  if (n_paths < 1000)
    throw std::invalid_argument("bessel_dimension_estimate: need >= 1000 paths");
  DistanceSde sde{alpha, beta_l, beta_n, nullptr};
  const long steps = std::lround(t_end / dt);
  const int n_check = 8;
  const long stride = std::max(1L, steps / n_check);
  std::vector<double> t_pts;
  std::vector<double> mean_z2, var_z2;
  std::vector<std::vector<double>> z2_samples;
  std::vector<double> r(n_paths, r0);
  long survived = 0;
  for (long s = 0; s < steps; ++s) {
    for (int p = 0; p < n_paths; ++p) {
      RngStream stream(seed, p, 0);
      r[p] = distance_sde_step(r[p], dt, sde, DistanceMode::idealized, stream,
                               static_cast<std::uint64_t>(s));
    }
    if ((s + 1) % stride == 0 || s + 1 == steps) {
      double m = 0.0, m2 = 0.0;
      for (int p = 0; p < n_paths; ++p) {
        const double z2 = std::pow(r[p], 2.0 * (1.0 - alpha));
        m += z2;
        m2 += z2 * z2;
      }
      m /= n_paths;
      m2 = m2 / n_paths - m * m;
      t_pts.push_back((s + 1) * dt);
      mean_z2.push_back(m);
      var_z2.push_back(m2);
    }
  }
  for (int p = 0; p < n_paths; ++p)
    if (r[p] > 0.0) ++survived;
  // weighted least squares through (0, Z0^2): slope of E[Z^2] against t
  const double z02 = std::pow(r0, 2.0 * (1.0 - alpha));
  double stt = 0.0, sty = 0.0, svar = 0.0;
  for (std::size_t i = 0; i < t_pts.size(); ++i) {
    stt += t_pts[i] * t_pts[i];
    sty += t_pts[i] * (mean_z2[i] - z02);
    svar += t_pts[i] * t_pts[i] * var_z2[i] / n_paths;
  }
  const double slope = sty / stt;
  const double slope_se = std::sqrt(svar) / stt;
  const double sz2 = 2.0 * (1.0 - alpha) * (1.0 - alpha) * beta_l;
  BesselEstimate out;
  out.d_eff = slope / sz2;
  out.std_err = slope_se / sz2;
  out.survival_fraction = static_cast<double>(survived) / n_paths;
  return out;
}

// ---------------------------------------------------------------------------
// Pairwise Lagrangian energies

struct LagrangianEnergy {
  double log_energy = 0.0;
  double riesz_energy = 0.0;
  long coincident_pairs = 0;
};

inline LagrangianEnergy lagrangian_energy(const ParticleEnsemble& e,
                                          double alpha) {
  if (e.size() < 2)
    throw std::invalid_argument("lagrangian_energy: need >= 2 particles");
  LagrangianEnergy out;
  const double expo = -2.0 + 2.0 * alpha;
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
      const double ww = e.weights[i] * e.weights[j];
      out.log_energy += -ww * std::log(r2);  // 2 * log(1/r)
      out.riesz_energy += 2.0 * ww * std::pow(r2, 0.5 * expo);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Flow pushforward: every particle integrated by Euler-Maruyama under the
// SAME field realization (spatially correlated increments) plus a frozen
// drift field; weights ride along unchanged (measure-preserving flow).

using DriftField = std::function<Vec2(Vec2)>;

inline ParticleEnsemble flow_pushforward(
    const DriftField& drift, const ParticleEnsemble& start,
    const KraichnanNoise& noise, std::uint64_t seed, std::uint64_t realization,
    double t_end, double dt,
    const std::function<void(double, const ParticleEnsemble&)>& on_checkpoint = {},
    long checkpoint_stride = 0) {
  ParticleEnsemble cur = start;
  const long steps = std::lround(t_end / dt);
  const double guard = 5.0 * noise.params().box_len;  // box of side 10 L
  for (long s = 0; s < steps; ++s) {
    NoiseIncrement inc =
        noise.sample(seed, realization, static_cast<std::uint64_t>(s), dt);
    std::vector<Vec2> v = noise.evaluate_at_points(inc, cur.positions);
    for (std::size_t p = 0; p < cur.size(); ++p) {
      Vec2 b = drift ? drift(cur.positions[p]) : Vec2{0.0, 0.0};
      cur.positions[p].x += b.x * dt + v[p].x;
      cur.positions[p].y += b.y * dt + v[p].y;
      if (std::abs(cur.positions[p].x) > guard ||
          std::abs(cur.positions[p].y) > guard)
        throw std::runtime_error(
            "flow_pushforward: particle left the guard box (moment blowup)");
    }
    if (on_checkpoint && checkpoint_stride > 0 &&
        ((s + 1) % checkpoint_stride == 0 || s + 1 == steps))
      on_checkpoint((s + 1) * dt, cur);
  }
  return cur;
}

// drift K^delta * mu by direct kernel summation over the particles
inline DriftField biot_savart_drift(const ParticleEnsemble& mu, double delta) {
  ParticleEnsemble snapshot = mu;
  return [snapshot, delta](Vec2 x) {
    Vec2 acc{0.0, 0.0};
    for (std::size_t i = 0; i < snapshot.size(); ++i) {
      const Vec2 d{x.x - snapshot.positions[i].x, x.y - snapshot.positions[i].y};
      Vec2 k = biot_savart_regularized(d, delta);
      acc.x += snapshot.weights[i] * k.x;
      acc.y += snapshot.weights[i] * k.y;
    }
    return acc;
  };
}

}  // namespace kraichnan
