#pragma once

// Initial vorticity construction: curl-of-bump, random band, and a mollified
// opposite-signed vortex patch pair. All constructions have exactly zero
// spatial mean, are band-limited to the dealiased band, and report their
// norms and the quadratic moment about the box center.

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "kraichnan/grid.hpp"
#include "kraichnan/rng.hpp"

namespace kraichnan {

enum class InitialKind { curl_of_bump, random_band, vortex_patch_mollified };

struct InitialDataSpec {
  InitialKind kind = InitialKind::curl_of_bump;
  double amplitude = 1.0;
  // curl_of_bump: Gaussian stream-function width
  double bump_width = 1.0;
  // random_band: |n| in [band_lo, band_hi], per-mode unit Gaussians
  double band_lo = 0.05;
  double band_hi = 0.5;
  std::uint64_t seed = 1;
  // vortex_patch_mollified: patch radius and mollification width; the two
  // patches sit at center +- (offset, 0)
  double patch_radius = 1.0;
  double patch_mollify = 0.25;
  double patch_offset = 2.0;
};

struct InitialDataReport {
  double l1 = 0.0, l2 = 0.0, linf = 0.0;
  double hm1 = 0.0;        // homogeneous H^{-1} norm
  double moment2 = 0.0;    // \int |x - x_c|^2 |omega| dx
  double mean_abs = 0.0;   // |mean| before the zero-mode pin (diagnostic)
};

inline SpectralField make_initial_vorticity(const InitialDataSpec& spec,
                                            const Grid& grid,
                                            InitialDataReport* report = nullptr) {
  const int N = grid.n();
  const double L = grid.box_len();
  const double cx = L / 2.0, cy = L / 2.0;
  SpectralField omega(N, L);

  auto min_image = [L](double v) {
    while (v > L / 2) v -= L;
    while (v < -L / 2) v += L;
    return v;
  };

  switch (spec.kind) {
    case InitialKind::curl_of_bump: {
      // omega = Laplacian of a Gaussian stream function (curl of grad-perp)
      std::vector<double> psi(grid.size());
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
          const double dx = min_image(grid.x_of(i) - cx);
          const double dy = min_image(grid.x_of(j) - cy);
          psi[grid.at(i, j)] = spec.amplitude *
              std::exp(-(dx * dx + dy * dy) / (2.0 * spec.bump_width * spec.bump_width));
        }
      auto ph = grid.forward(psi);
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
          omega(i, j) = -4.0 * M_PI * M_PI * grid.mode_abs2(i, j) * ph[grid.at(i, j)];
      break;
    }
    case InitialKind::random_band: {
      RngStream stream(spec.seed, 0, 0);
      std::uint64_t c = 0;
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
          const int k1 = grid.k_of(i), k2 = grid.k_of(j);
          const bool half = (k1 > 0) || (k1 == 0 && k2 > 0);
          if (!half) continue;
          const double na = std::sqrt(grid.mode_abs2(i, j));
          const std::uint64_t draw = c++;
          if (na < spec.band_lo || na > spec.band_hi) continue;
          double z0, z1;
          stream.normal_pair(draw, z0, z1);
          const std::complex<double> v =
              spec.amplitude * L * std::complex<double>(z0, z1) * M_SQRT1_2;
          omega(i, j) = v;
          omega((N - i) % N, (N - j) % N) = std::conj(v);
        }
      break;
    }
    case InitialKind::vortex_patch_mollified: {
      std::vector<double> w(grid.size());
      auto patch = [&](double dx, double dy) {
        const double r = std::hypot(dx, dy);
        return 0.5 * (1.0 - std::erf((r - spec.patch_radius) /
                                     (M_SQRT2 * spec.patch_mollify)));
      };
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
          const double px = grid.x_of(i), py = grid.x_of(j);
          w[grid.at(i, j)] = spec.amplitude *
              (patch(min_image(px - (cx - spec.patch_offset)), min_image(py - cy)) -
               patch(min_image(px - (cx + spec.patch_offset)), min_image(py - cy)));
        }
      omega.coeffs = grid.forward(w);
      break;
    }
  }

  if (report) report->mean_abs = std::abs(omega.coeffs[0]) / (L * L);
  omega.enforce_zero_mean();
  // band-limit to the dealiased band
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      if (!grid.in_dealias_band(i, j)) omega(i, j) = {0.0, 0.0};

  if (report) {
    auto w = grid.backward(omega.coeffs);
    const double cell = grid.dx() * grid.dx();
    double l1 = 0.0, l2 = 0.0, linf = 0.0, m2 = 0.0;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        const double v = w[grid.at(i, j)];
        const double dx = min_image(grid.x_of(i) - cx);
        const double dy = min_image(grid.x_of(j) - cy);
        l1 += std::abs(v) * cell;
        l2 += v * v * cell;
        linf = std::max(linf, std::abs(v));
        m2 += (dx * dx + dy * dy) * std::abs(v) * cell;
      }
    report->l1 = l1;
    report->l2 = std::sqrt(l2);
    report->linf = linf;
    report->moment2 = m2;
    Grid g2(N, L);
    report->hm1 = sobolev_norm(omega, g2, NormSpec::homogeneous(-1.0));
  }
  return omega;
}

}  // namespace kraichnan
