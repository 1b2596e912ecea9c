#pragma once

// Counter-based deterministic random numbers. Every draw is a pure function
// of (seed, realization, step, counter), so results are bit-identical
// regardless of thread count or evaluation order.

#include <cmath>
#include <cstdint>

namespace kraichnan {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(a) ^ (b + 0x9e3779b97f4a7c15ULL));
}

}  // namespace detail

// A named stream: one per (seed, realization, step). Mode/path draws are
// addressed by counter, ordered by the caller (lexicographic over modes).
struct RngStream {
  std::uint64_t key;

  RngStream(std::uint64_t seed, std::uint64_t realization, std::uint64_t step)
      : key(detail::mix(detail::mix(seed, realization), step)) {}

  std::uint64_t bits(std::uint64_t counter) const {
    return detail::mix(key, counter);
  }

  // uniform in (0, 1)
  double uniform(std::uint64_t counter) const {
    return (bits(counter) >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }

  // standard normal pair by Box-Muller; draw index c yields the pair (2c, 2c+1)
  void normal_pair(std::uint64_t c, double& z0, double& z1) const {
    const double u1 = uniform(2 * c);
    const double u2 = uniform(2 * c + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    z0 = r * std::cos(2.0 * M_PI * u2);
    z1 = r * std::sin(2.0 * M_PI * u2);
  }

  double normal(std::uint64_t c) const {
    double z0, z1;
    normal_pair(c, z0, z1);
    return z0;
  }
};

}  // namespace kraichnan
