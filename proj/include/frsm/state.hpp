// Physical constants, solution state, external field and initial data.
#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "frsm/spectral.hpp"

namespace frsm {

/// The ten constants of the planar ferrofluid system. lambda_p is carried for
/// completeness: its term lambda' grad div Omega vanishes for Omega = (0, 0, omega).
struct Params {
  double rho0 = 1.0;
  double eta = 1.0;
  double zeta = 1.0;
  double mu0 = 1.0;
  double kappa = 1.0;
  double eta_p = 1.0;
  double lambda_p = 1.0;
  double sigma = 1.0;
  double tau = 1.0;
  double chi0 = 1.0;

  /// Storage order used by snapshots and reports.
  static constexpr std::array<std::string_view, 10> names = {
      "rho0", "eta", "zeta", "mu0", "kappa", "eta_p", "lambda_p", "sigma", "tau", "chi0"};

  std::array<double, 10> to_array() const;
  static Params from_array(const std::array<double, 10>& a);
  double& at(std::string_view name);

  /// Dissipation rate of the L2 energy law.
  double c_tilde() const;
  /// Dissipation rate of the Lambda^{1/2} energy law.
  double c_half() const;

  friend bool operator==(const Params&, const Params&) = default;
};

struct State {
  VecField u;
  Field omega;
  VecField M;
  double t = 0.0;

  const GridD& grid() const { return omega.grid(); }
};

State zero_state(const GridD& grid);

/// Resample every unknown onto another grid (spectral restriction / padding).
State resample(const State& s, const GridD& target);

/// Truncate every unknown to |k| <= kmax.
State truncate(const State& s, double kmax);

enum class TemporalLaw { constant, cosine, ramp };

/// A single Fourier mode of the external field: contributes
/// Re(amplitude * exp(i k.x)) * g(t) with k = (2 pi / L) (m1, m2).
///   constant: g = 1
///   cosine:   g = cos(rate * t)
///   ramp:     g = 1 - exp(-rate * t)
struct ForcingMode {
  int m1 = 0;
  int m2 = 0;
  std::complex<double> amplitude{1.0, 0.0};
  TemporalLaw law = TemporalLaw::constant;
  double rate = 0.0;
};

double temporal_value(const ForcingMode& m, double t);
double temporal_rate(const ForcingMode& m, double t);

/// External magnetic field F(x, t): a finite zero-mean Fourier series.
class Forcing {
 public:
  Forcing() = default;
  explicit Forcing(std::vector<ForcingMode> modes);

  void add(const ForcingMode& mode);
  bool empty() const { return modes_.empty(); }
  const std::vector<ForcingMode>& modes() const { return modes_; }

  Field evaluate(const GridD& grid, double t) const;
  Field evaluate_dt(const GridD& grid, double t) const;

 private:
  Field assemble(const GridD& grid, double t, bool derivative) const;
  std::vector<ForcingMode> modes_;
};

struct ExternalPotential {
  VecField g_f;     // Delta^-1 grad F
  VecField dt_g_f;  // its time derivative
};

/// G_F = Delta^-1 grad (J F) and d/dt G_F. With kmax = inf no truncation is applied.
ExternalPotential make_gf(const Forcing& forcing, const GridD& grid, double t,
                          double kmax = std::numeric_limits<double>::infinity());

enum class IcKind { zero, taylor_green, random, file };

IcKind parse_ic_kind(std::string_view s);
std::string_view to_string(IcKind k);

struct IcSpec {
  IcKind kind = IcKind::taylor_green;
  std::uint64_t seed = 0;
  double kmax = 4.0;
  double amplitude = 1.0;
  /// e-folding length of the exp(-|k|/decay) envelope of random data; 0 keeps a flat spectrum.
  double decay = 0.0;
  std::string path;
};

/// Divergence-free, real, band-limited initial state.
///   taylor_green: u = (sin x1 cos x2, -cos x1 sin x2), omega = 0, M = (sin x2, 0)
///   random: u = grad_perp psi, omega and M Gaussian, each rescaled to RMS `amplitude`
///   file: snapshot at `path` (grid must match)
State initial_conditions(const IcSpec& spec, const GridD& grid);

struct Violation {
  std::string name;
  double magnitude = 0.0;
  double relative = 0.0;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  const Violation* find(std::string_view name) const;
  std::string to_string() const;
};

struct ValidationTolerances {
  double divergence = 1e-10;
  double hermitian = 1e-12;
};

ValidationReport validate(const State& state, const ValidationTolerances& tol = {});
ValidationReport validate(const Params& params);

}  // namespace frsm
