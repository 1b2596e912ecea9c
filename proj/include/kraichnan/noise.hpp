#pragma once

// White-in-time, divergence-free Kraichnan velocity increments on the
// periodic lattice: independent complex Gaussians on Hermitian mode pairs,
// amplitude sqrt(dt L^2 <n>^{-(2+2a)} chi_delta(n)) along the unit vector
// orthogonal to n, plus the lattice-exact Ito correction constant.

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "kraichnan/covariance.hpp"
#include "kraichnan/rng.hpp"

namespace kraichnan {

struct NoiseIncrement {
  int n = 0;
  double box_len = 0.0;
  double dt = 0.0;
  std::uint64_t seed = 0, realization = 0, step = 0;
  // full-lattice spectral components (FFT layout), Hermitian by construction
  std::vector<std::complex<double>> vx, vy;
};

struct ItoCorrection {
  double c_delta_lattice = 0.0;
};

// Lattice sum c = (1/2L^2) sum_{0<|n|, chi>0} <n>^{-(2+2a)} chi(n), optionally
// capped to the modes representable on an N-point grid (what the sampler
// actually injects). Half the per-point variance of the sampled field.
inline ItoCorrection ito_correction(const KraichnanParams& p,
                                    const Cutoff& cut, int grid_cap = 0) {
  p.validate();
  const double L = p.box_len;
  const double sup = cut.support();
  int kmax = static_cast<int>(std::floor(sup * L));
  if (grid_cap > 0) kmax = std::min(kmax, grid_cap / 2 - 1);
  if (kmax < 1)
    throw std::invalid_argument("ito_correction: no active modes below cutoff");
  double s = 0.0;
  for (int k1 = -kmax; k1 <= kmax; ++k1)
    for (int k2 = -kmax; k2 <= kmax; ++k2) {
      if (k1 == 0 && k2 == 0) continue;
      const double n2 = (static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2) / (L * L);
      const double chi = cut.chi(std::sqrt(n2));
      if (chi == 0.0) continue;
      s += std::pow(1.0 + n2, -(1.0 + p.alpha)) * chi;
    }
  return {s / (2.0 * L * L)};
}

// Sampler for a fixed (params, cutoff) configuration. Mode draws are ordered
// lexicographically over the half-space representatives, so a given
// (seed, realization, step) produces bit-identical increments on any thread.
class KraichnanNoise {
 public:
  // mode_cap_k > 0 restricts modes to |k_i| <= mode_cap_k (the solver passes
  // its dealias band N/3 so that transport products stay alias-free)
  KraichnanNoise(const KraichnanParams& p, const Cutoff& cut, int mode_cap_k = 0)
      : params_(p), cutoff_(cut) {
    p.validate();
    const double L = p.box_len;
    const int half = p.grid_n / 2;
    int kmax = std::min(static_cast<int>(std::floor(cut.support() * L)), half - 1);
    if (mode_cap_k > 0) kmax = std::min(kmax, mode_cap_k);
    for (int k1 = 0; k1 <= kmax; ++k1)
      for (int k2 = (k1 == 0 ? 1 : -kmax); k2 <= kmax; ++k2) {
        const double n2 = (static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2) / (L * L);
        const double na = std::sqrt(n2);
        const double chi = cut.chi(na);
        if (chi == 0.0) continue;
        Mode m;
        m.k1 = k1;
        m.k2 = k2;
        m.amp = std::sqrt(L * L * std::pow(1.0 + n2, -(1.0 + p.alpha)) * chi);
        // unit vector orthogonal to n = (k1, k2)/L
        m.ex = -k2 / (L * na);
        m.ey = k1 / (L * na);
        modes_.push_back(m);
      }
    if (modes_.empty())
      throw std::invalid_argument("KraichnanNoise: no representable modes below cutoff");
  }

  const KraichnanParams& params() const { return params_; }
  std::size_t mode_count() const { return modes_.size(); }

  NoiseIncrement sample(std::uint64_t seed, std::uint64_t realization,
                        std::uint64_t step, double dt) const {
    if (!(dt > 0.0)) throw std::invalid_argument("sample: dt > 0");
    const int N = params_.grid_n;
    NoiseIncrement inc;
    inc.n = N;
    inc.box_len = params_.box_len;
    inc.dt = dt;
    inc.seed = seed;
    inc.realization = realization;
    inc.step = step;
    inc.vx.assign(static_cast<std::size_t>(N) * N, {0.0, 0.0});
    inc.vy.assign(static_cast<std::size_t>(N) * N, {0.0, 0.0});
    RngStream stream(seed, realization, step);
    const double sdt = std::sqrt(dt);
    for (std::size_t m = 0; m < modes_.size(); ++m) {
      const Mode& md = modes_[m];
      double z0, z1;
      stream.normal_pair(m, z0, z1);
      const std::complex<double> xi(z0 * M_SQRT1_2, z1 * M_SQRT1_2);
      const std::complex<double> a = sdt * md.amp * xi;
      const std::size_t idx = at(N, md.k1, md.k2);
      const std::size_t idx_c = at(N, -md.k1, -md.k2);
      inc.vx[idx] = a * md.ex;
      inc.vy[idx] = a * md.ey;
      inc.vx[idx_c] = std::conj(inc.vx[idx]);
      inc.vy[idx_c] = std::conj(inc.vy[idx]);
    }
    return inc;
  }

  // V(x) = L^{-2} sum_n vhat(n) e^{2 pi i n.x}, by direct mode summation
  // (exact, no grid interpolation); the result is real by construction.
  std::vector<Vec2> evaluate_at_points(const NoiseIncrement& inc,
                                       const std::vector<Vec2>& points) const {
    const int N = inc.n;
    const double L = inc.box_len;
    std::vector<Vec2> out(points.size());
    for (std::size_t q = 0; q < points.size(); ++q) {
      double sx = 0.0, sy = 0.0;
      for (const Mode& md : modes_) {
        const std::size_t idx = at(N, md.k1, md.k2);
        const double phase =
            2.0 * M_PI * (md.k1 * points[q].x + md.k2 * points[q].y) / L;
        const std::complex<double> e(std::cos(phase), std::sin(phase));
        sx += 2.0 * (inc.vx[idx] * e).real();
        sy += 2.0 * (inc.vy[idx] * e).real();
      }
      out[q] = {sx / (L * L), sy / (L * L)};
    }
    return out;
  }

  // max_n |n . vhat(n)|; zero by construction
  static double divergence_defect(const NoiseIncrement& inc) {
    const int N = inc.n;
    double worst = 0.0;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        const int k1 = i < N / 2 ? i : i - N;
        const int k2 = j < N / 2 ? j : j - N;
        const std::size_t idx = static_cast<std::size_t>(i) * N + j;
        const double nx = k1 / inc.box_len, ny = k2 / inc.box_len;
        worst = std::max(worst, std::abs(nx * inc.vx[idx] + ny * inc.vy[idx]));
      }
    return worst;
  }

  struct Mode {
    int k1, k2;
    double amp, ex, ey;
  };
  const std::vector<Mode>& modes() const { return modes_; }

 private:
  static std::size_t at(int N, int k1, int k2) {
    const int i = (k1 % N + N) % N;
    const int j = (k2 % N + N) % N;
    return static_cast<std::size_t>(i) * N + j;
  }

  KraichnanParams params_;
  Cutoff cutoff_;
  std::vector<Mode> modes_;
};

}  // namespace kraichnan
