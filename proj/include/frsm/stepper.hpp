// Integrating-factor Heun time stepping, run loop and convergence studies.
#pragma once

#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "frsm/diagnostics.hpp"
#include "frsm/physics.hpp"
#include "frsm/state.hpp"

namespace frsm {

struct StepperConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  double cfl = 0.4;
  bool adapt = false;
  /// Galerkin truncation radius; 0 selects the 2/3 cutoff of the grid.
  double kmax = 0.0;
};

double resolved_kmax(const StepperConfig& cfg, const GridD& grid);

struct RunConfig {
  int n = 64;
  double length = 2.0 * std::numbers::pi;
  Params params;
  IcSpec ic;
  Forcing forcing;
  StepperConfig stepper;
  int output_every = 1;
  std::string output_dir;

  GridD grid() const { return GridD(n, length); }
};

/// Raised when a step produces NaN/Inf or the adaptive step underflows.
class StepFailure : public std::runtime_error {
 public:
  StepFailure(const std::string& what, State last_good, std::int64_t step)
      : std::runtime_error(what), last_good_(std::move(last_good)), step_(step) {}
  const State& last_good() const { return last_good_; }
  std::int64_t step() const { return step_; }

 private:
  State last_good_;
  std::int64_t step_;
};

/// Largest rate among the explicit terms: max(|u|_inf / dx, |omega|_inf, 2 zeta / (rho0 kappa), 1 / tau).
double stiffness(const State& state, const Params& params);

/// Exact per-mode solution operator exp(L dt) of the diagonal linear part.
class LinearPropagator {
 public:
  LinearPropagator(const GridD& grid, const Params& params, double dt);

  State apply(const State& s) const;
  double dt() const { return dt_; }

 private:
  double dt_;
  RealGrid<double> eu_, ew_, emp_, emq_;
};

/// One step U(t) -> U(t + dt):
///   N0 = N(U_n, t_n),  U* = E(U_n + dt N0),  N1 = N(U*, t_n + dt),
///   U_{n+1} = E(U_n + dt/2 N0) + dt/2 N1,
/// with E = exp(L dt) and N the explicit tendency.
State step(const State& state, const Forcing& forcing, const Params& params, const LinearPropagator& prop,
           double kmax);
State step(const State& state, const Forcing& forcing, const Params& params, double dt, double kmax);

struct RunHooks {
  /// Called after every accepted step (and once for the initial state with step 0).
  std::function<void(const State&, std::int64_t)> on_step;
  /// Called for every audited state.
  std::function<void(const State&, const LedgerRow&)> on_output;
  bool audit = true;
};

struct RunResult {
  State final_state;
  std::vector<LedgerRow> ledger;
  std::int64_t steps = 0;
  double last_dt = 0.0;
};

/// Initial state of a run: the configured initial data truncated to kmax.
State initial_state(const RunConfig& cfg);

RunResult run(const RunConfig& cfg, const RunHooks& hooks = {});
RunResult run(const RunConfig& cfg, const State& initial, const RunHooks& hooks = {});

/// L2, inhomogeneous H^1/2 and H^1 distances between two states (after
/// resampling onto the finer grid).
struct StateDistance {
  double l2 = 0.0;
  double h_half = 0.0;
  double h1 = 0.0;
};

StateDistance distance(const State& a, const State& b);

struct LadderEntry {
  double cutoff = 0.0;
  int grid_n = 0;
  StateDistance gap;        // |U_n(T) - U_2n(T)|
  double sup_half_energy = 0.0;  // sup_t F(t)
};

struct LadderReport {
  std::vector<LadderEntry> entries;
  bool strictly_decreasing() const;  // in the H^1/2 gap
  double sup_variation() const;      // (max - min) / max of sup_t F
};

/// Runs the same data at each cutoff n and at 2n; each run uses the smallest
/// power-of-two grid whose 2/3 cutoff covers it.
LadderReport galerkin_ladder(const RunConfig& cfg, const std::vector<double>& cutoffs);

struct TwinReport {
  std::vector<double> times;
  std::vector<double> delta_l2;
  std::vector<double> delta_half;
  double ratio_l2 = 0.0;    // delta(T) / delta(0)
  double ratio_half = 0.0;
};

/// Two trajectories whose velocities differ by a divergence-free perturbation of L2 size `size`.
TwinReport twin_run(const RunConfig& cfg, double size);

struct ConvergenceReport {
  double dt = 0.0;
  double error_coarse = 0.0;  // |U_dt - U_dt/2|
  double error_fine = 0.0;    // |U_dt/2 - U_dt/4|
  double ratio = 0.0;
  double order = 0.0;
};

/// Richardson self-convergence with fixed steps dt, dt/2, dt/4.
ConvergenceReport self_convergence(const RunConfig& cfg);

}  // namespace frsm
