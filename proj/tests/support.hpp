// Shared helpers for the test binaries: random fields and a brute-force DFT.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>

#include "frsm/spectral.hpp"
#include "frsm/state.hpp"

namespace frsm::test {

inline RealGrid<double> random_values(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  RealGrid<double> v(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) v(i, j) = g(rng);
  return v;
}

inline Field random_field(const GridD& grid, std::mt19937_64& rng) {
  return Field::from_physical(grid, random_values(grid.n(), rng));
}

inline VecField random_vec(const GridD& grid, std::mt19937_64& rng) {
  return VecField(random_field(grid, rng), random_field(grid, rng));
}

/// Random field with support in |k| <= kmax.
inline Field random_band(const GridD& grid, std::mt19937_64& rng, double kmax, bool zero_mean = false) {
  return truncate(random_field(grid, rng), kmax, zero_mean);
}

inline State random_state(const GridD& grid, std::mt19937_64& rng, double kmax) {
  State s = zero_state(grid);
  s.u = leray_project(grad_perp(random_band(grid, rng, kmax, true)));
  s.omega = random_band(grid, rng, kmax);
  s.M = VecField(random_band(grid, rng, kmax), random_band(grid, rng, kmax));
  return s;
}

/// Field built from physical-space samples of f(x1, x2).
inline Field sample(const GridD& grid, const std::function<double(double, double)>& f) {
  const int n = grid.n();
  RealGrid<double> v(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) v(i, j) = f(i * grid.spacing(), j * grid.spacing());
  return Field::from_physical(grid, v);
}

inline double max_abs_diff(const RealGrid<double>& a, const RealGrid<double>& b) {
  return (a - b).abs().maxCoeff();
}

inline double rel_diff(const RealGrid<double>& a, const RealGrid<double>& b) {
  const double scale = std::max(a.abs().maxCoeff(), b.abs().maxCoeff());
  return scale > 0.0 ? max_abs_diff(a, b) / scale : 0.0;
}

/// Direct double-sum DFT: applies the multiplier mult(m1, m2) to physical
/// samples and returns physical samples, without any FFT.
/// Modes run over m in [-N/2, N/2).
using Multiplier = std::function<std::complex<double>(int, int)>;

inline RealGrid<double> dft_apply(const RealGrid<double>& f, double length, const Multiplier& mult) {
  const int n = static_cast<int>(f.rows());
  const double dk = 2.0 * std::numbers::pi / length;
  const double dx = length / n;
  using C = std::complex<double>;
  RealGrid<double> out = RealGrid<double>::Zero(n, n);
  for (int m1 = -n / 2; m1 < n / 2; ++m1) {
    for (int m2 = -n / 2; m2 < n / 2; ++m2) {
      C c = 0.0;
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) c += f(i, j) * std::polar(1.0, -dk * dx * (m1 * i + m2 * j));
      c *= mult(m1, m2) / double(n * n);
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) out(i, j) += (c * std::polar(1.0, dk * dx * (m1 * i + m2 * j))).real();
    }
  }
  return out;
}

}  // namespace frsm::test
