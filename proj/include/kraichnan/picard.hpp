#pragma once

// Fixed-point iteration for the regularized equation in particle form:
// mu^{(m+1)} = Phi^{mu^(m)}_# omega_0, with drift K^delta * mu^(m) by direct
// kernel summation and the SAME noise realization across iterations (the
// fixed point is per noise path). Reports sup-over-time W1 gaps between
// consecutive iterates.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "kraichnan/lagrangian.hpp"
#include "kraichnan/wasserstein.hpp"

namespace kraichnan {

struct PicardIterate {
  ParticleEnsemble ensemble;  // state at time T
  double w1_gap = 0.0;        // sup over checkpoints of W1 vs previous iterate
  double total_variation = 0.0;
};

struct PicardOptions {
  int checkpoints = 5;     // time points where trajectories are compared
  int w1_directions = 24;
  std::uint64_t w1_seed = 2024;
};

// Trajectory of an iterate: ensembles at the checkpoint times.
using PicardTrajectory = std::vector<ParticleEnsemble>;

inline std::vector<PicardIterate> picard_iterate(
    const ParticleEnsemble& omega0, int iterations, double t_end, double dt,
    const KraichnanNoise& noise, std::uint64_t seed,
    const PicardOptions& opt = {}) {
  if (iterations < 2)
    throw std::invalid_argument("picard_iterate: iterations >= 2");
  const long steps = std::lround(t_end / dt);
  const double delta = noise.params().delta;
  const double guard = 5.0 * noise.params().box_len;

  // full per-step position history of the previous iterate, so the drift at
  // step s is K^delta * mu^{(m)}_s; iterate 0 is the drift-free pushforward
  // of omega_0 under the same noise path
  const std::vector<double>& w = omega0.weights;
  std::vector<std::vector<Vec2>> prev_hist;
  prev_hist.reserve(steps + 1);
  {
    ParticleEnsemble state = omega0;
    prev_hist.push_back(state.positions);
    for (long s = 0; s < steps; ++s) {
      NoiseIncrement inc = noise.sample(seed, 0, static_cast<std::uint64_t>(s), dt);
      std::vector<Vec2> v = noise.evaluate_at_points(inc, state.positions);
      for (std::size_t p = 0; p < state.size(); ++p) {
        state.positions[p].x += v[p].x;
        state.positions[p].y += v[p].y;
        if (std::abs(state.positions[p].x) > guard ||
            std::abs(state.positions[p].y) > guard)
          throw std::runtime_error("picard_iterate: particle left the guard box");
      }
      prev_hist.push_back(state.positions);
    }
  }

  // checkpoint indices for the W1 gap (include the endpoint)
  std::vector<long> cps;
  const long stride = std::max(1L, steps / opt.checkpoints);
  for (long s = stride; s < steps; s += stride) cps.push_back(s);
  cps.push_back(steps);

  std::vector<PicardIterate> out;
  for (int m = 0; m < iterations; ++m) {
    std::vector<std::vector<Vec2>> hist;
    hist.reserve(steps + 1);
    ParticleEnsemble state = omega0;
    hist.push_back(state.positions);
    for (long s = 0; s < steps; ++s) {
      const std::vector<Vec2>& mu = prev_hist[s];
      NoiseIncrement inc = noise.sample(seed, 0, static_cast<std::uint64_t>(s), dt);
      std::vector<Vec2> v = noise.evaluate_at_points(inc, state.positions);
      for (std::size_t p = 0; p < state.size(); ++p) {
        Vec2 b{0.0, 0.0};
        for (std::size_t q = 0; q < mu.size(); ++q) {
          const Vec2 d{state.positions[p].x - mu[q].x,
                       state.positions[p].y - mu[q].y};
          Vec2 k = biot_savart_regularized(d, delta);
          b.x += w[q] * k.x;
          b.y += w[q] * k.y;
        }
        state.positions[p].x += b.x * dt + v[p].x;
        state.positions[p].y += b.y * dt + v[p].y;
        if (std::abs(state.positions[p].x) > guard ||
            std::abs(state.positions[p].y) > guard)
          throw std::runtime_error("picard_iterate: particle left the guard box");
      }
      hist.push_back(state.positions);
    }
    PicardIterate it;
    it.ensemble = state;
    it.total_variation = state.total_variation();
    double gap = 0.0;
    for (long c : cps) {
      ParticleEnsemble a, b;
      a.positions = hist[c];
      a.weights = w;
      b.positions = prev_hist[c];
      b.weights = w;
      gap = std::max(gap,
                     w1_distance(a, b, opt.w1_directions, opt.w1_seed).value);
    }
    it.w1_gap = gap;
    out.push_back(std::move(it));
    prev_hist = std::move(hist);
  }
  return out;
}

}  // namespace kraichnan
