#pragma once

// Periodic N x N lattice of side L with FFTW-backed transforms.
//
// Conventions (kept coefficient-exact with the continuum transform):
//   fhat(n) = (L/N)^2 sum_x f(x) e^{-2 pi i x.n},  n = k/L, k in [-N/2, N/2)^2
//   f(x)    = L^{-2}  sum_n fhat(n) e^{+2 pi i n.x}
//   ||f||_{L^2}^2 = L^{-2} sum_n |fhat(n)|^2

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "kraichnan/kernels.hpp"

namespace kraichnan {

namespace detail {
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

class Grid {
 public:
  Grid(int n, double box_len) : n_(n), box_len_(box_len) {
    if (n < 8 || n % 2 != 0)
      throw std::invalid_argument("Grid: n must be even and >= 8");
    if (!(box_len > 0.0)) throw std::invalid_argument("Grid: box_len > 0");
    buf_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * size()));
    if (!buf_) throw std::bad_alloc();
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fwd_ = fftw_plan_dft_2d(n_, n_, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_2d(n_, n_, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  Grid(const Grid& o) : Grid(o.n_, o.box_len_) {}
  Grid& operator=(const Grid&) = delete;
  ~Grid() {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
  }

  int n() const { return n_; }
  double box_len() const { return box_len_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }
  double dx() const { return box_len_ / n_; }
  double nyquist() const { return n_ / (2.0 * box_len_); }

  // signed integer mode of FFT index, k in [-N/2, N/2)
  int k_of(int idx) const { return idx < n_ / 2 ? idx : idx - n_; }
  // physical wavenumber component
  double mode(int idx) const { return k_of(idx) / box_len_; }
  double mode_abs2(int i, int j) const {
    const double nx = mode(i), ny = mode(j);
    return nx * nx + ny * ny;
  }
  std::size_t at(int i, int j) const {
    return static_cast<std::size_t>(i) * n_ + j;
  }
  // grid point coordinates in [0, L)
  double x_of(int i) const { return i * dx(); }

  // spectral coefficients from real samples
  std::vector<std::complex<double>> forward(const std::vector<double>& f) const {
    if (f.size() != size()) throw std::invalid_argument("Grid::forward: size");
    for (std::size_t i = 0; i < size(); ++i) {
      buf_[i][0] = f[i];
      buf_[i][1] = 0.0;
    }
    fftw_execute(fwd_);
    const double scale = dx() * dx();
    std::vector<std::complex<double>> out(size());
    for (std::size_t i = 0; i < size(); ++i)
      out[i] = {buf_[i][0] * scale, buf_[i][1] * scale};
    return out;
  }

  // real samples from spectral coefficients (imaginary part discarded)
  std::vector<double> backward(const std::vector<std::complex<double>>& fh) const {
    if (fh.size() != size()) throw std::invalid_argument("Grid::backward: size");
    for (std::size_t i = 0; i < size(); ++i) {
      buf_[i][0] = fh[i].real();
      buf_[i][1] = fh[i].imag();
    }
    fftw_execute(bwd_);
    const double scale = 1.0 / (box_len_ * box_len_);
    std::vector<double> out(size());
    for (std::size_t i = 0; i < size(); ++i) out[i] = buf_[i][0] * scale;
    return out;
  }

  // 2/3-rule dealiasing mask: keep |k_i| <= N/3
  bool in_dealias_band(int i, int j) const {
    return std::abs(k_of(i)) <= n_ / 3 && std::abs(k_of(j)) <= n_ / 3;
  }

 private:
  int n_;
  double box_len_;
  fftw_complex* buf_;
  fftw_plan fwd_, bwd_;
};

// Fourier-side scalar field on the lattice. Vorticity carrier: Hermitian
// (real samples), zero mode pinned to 0, dealiased band after products.
struct SpectralField {
  int n = 0;
  double box_len = 0.0;
  std::vector<std::complex<double>> coeffs;

  SpectralField() = default;
  SpectralField(int n_, double box_len_)
      : n(n_), box_len(box_len_),
        coeffs(static_cast<std::size_t>(n_) * n_, {0.0, 0.0}) {}

  std::size_t at(int i, int j) const {
    return static_cast<std::size_t>(i) * n + j;
  }
  std::complex<double>& operator()(int i, int j) { return coeffs[at(i, j)]; }
  const std::complex<double>& operator()(int i, int j) const {
    return coeffs[at(i, j)];
  }

  // max_n |fhat(-n) - conj(fhat(n))|, a reality diagnostic
  double hermitian_defect() const {
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const int i2 = (n - i) % n, j2 = (n - j) % n;
        worst = std::max(worst,
                         std::abs(coeffs[at(i2, j2)] - std::conj(coeffs[at(i, j)])));
      }
    return worst;
  }

  void enforce_zero_mean() { coeffs[0] = {0.0, 0.0}; }
};

// Discrete Plancherel Sobolev norm. Homogeneous flavors with s <= -1 require
// a zero-mean field; the zero mode is excluded for all homogeneous flavors.
inline double sobolev_norm(const SpectralField& f, const Grid& g,
                           const NormSpec& spec) {
  if (f.n != g.n()) throw std::invalid_argument("sobolev_norm: grid mismatch");
  const bool homogeneous = (spec.flavor != NormFlavor::inhomogeneous);
  if (homogeneous && spec.exponent <= -1.0) {
    const double scale = std::sqrt(std::norm(f.coeffs[0]));
    double linf = 0.0;
    for (const auto& c : f.coeffs) linf = std::max(linf, std::abs(c));
    if (scale > 1e-10 * std::max(1.0, linf))
      throw std::invalid_argument(
          "sobolev_norm: homogeneous negative norm requires a zero-mean field");
  }
  double acc = 0.0;
  for (int i = 0; i < f.n; ++i)
    for (int j = 0; j < f.n; ++j) {
      if (i == 0 && j == 0) {
        if (homogeneous) continue;
        acc += std::norm(f.coeffs[0]);  // <0> = 1
        continue;
      }
      const double na = std::sqrt(g.mode_abs2(i, j));
      acc += spec.weight(na) * std::norm(f(i, j));
    }
  return std::sqrt(acc) / g.box_len();
}

}  // namespace kraichnan
