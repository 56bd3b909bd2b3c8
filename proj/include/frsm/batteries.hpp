// Sampled functional inequalities: empirical constants on random band-limited fields.
#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "frsm/spectral.hpp"

namespace frsm {

/// Worker count from FRSM_THREADS (unset or 0: hardware concurrency).
unsigned worker_count();

/// Evaluates fn(i) for i in [0, count) on worker_count() threads.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

/// Independent generator for sample `index` of the stream `seed`.
std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index);

/// Real field with Gaussian coefficients of variance |k|^-2 slope on 0 < |k| <= kmax,
/// scaled to L2 norm `amplitude`. The mean is drawn too unless zero_mean.
Field random_band_limited(const GridD& grid, std::mt19937_64& rng, double kmax, double slope, double amplitude,
                          bool zero_mean);

struct BatteryEntry {
  std::string name;
  double max_half = 0.0;  // max ratio over the first half of the samples
  double max_full = 0.0;  // max ratio over all samples
  double mean_full = 0.0;
  bool finite = true;

  double drift() const { return max_half > 0.0 ? (max_full - max_half) / max_half : 0.0; }
  bool stable(double tolerance) const { return finite && drift() <= tolerance; }
};

struct BatteryReport {
  std::size_t samples = 0;  // per half
  double tolerance = 0.2;
  std::vector<BatteryEntry> entries;
  std::vector<std::string> notes;

  bool passed() const;
  const BatteryEntry* find(const std::string& name) const;
  std::string to_string() const;
};

/// Interpolation, L4 chain, Sobolev product rule, algebra rule and Lorentz
/// bound ratios. Draws 2 * samples fields; the first `samples` form the half set.
BatteryReport inequality_battery(const GridD& grid, std::size_t samples, std::uint64_t seed,
                                 double tolerance = 0.2);

/// Needed constant C_k of the order-k transport and bilinear Leibniz bounds
/// (epsilon = 1), i.e. LHS divided by the structural right-hand side.
BatteryReport leibniz_battery(const GridD& grid, int k, std::size_t samples, std::uint64_t seed,
                              double tolerance = 0.2);

/// Closed form of |v|_inf / (|L^1/2 v|^1/2 |L^3/2 v|^1/2) for v = cos(k x1).
double interpolation_single_mode(double length, int mode);

}  // namespace frsm
