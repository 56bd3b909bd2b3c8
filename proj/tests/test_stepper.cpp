#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "frsm/stepper.hpp"
#include "support.hpp"

using namespace frsm;
using namespace frsm::test;

namespace {

RunConfig small_config() {
  RunConfig cfg;
  cfg.n = 16;
  cfg.stepper.dt = 1e-2;
  cfg.stepper.t_end = 0.1;
  return cfg;
}

bool same_coeffs(const State& a, const State& b) {
  return (a.u[0].coeffs() == b.u[0].coeffs()).all() && (a.u[1].coeffs() == b.u[1].coeffs()).all() &&
         (a.omega.coeffs() == b.omega.coeffs()).all() && (a.M[0].coeffs() == b.M[0].coeffs()).all() &&
         (a.M[1].coeffs() == b.M[1].coeffs()).all();
}

}  // namespace

TEST_CASE("zero state is a fixed point") {
  const GridD grid(16);
  const State z = zero_state(grid);
  for (double dt : {1e-3, 0.1, 1.0}) {
    const State s = step(z, Forcing{}, Params{}, dt, grid.dealias_cutoff());
    CHECK(norm(s.u) == 0.0);
    CHECK(norm(s.omega) == 0.0);
    CHECK(norm(s.M) == 0.0);
  }
}

TEST_CASE("static magnetization modes decay at the exact per-mode rate") {
  // u = omega = 0 stay zero: a gradient M has a gradient Lorentz force and
  // M x H = 0; a solenoidal M has H = 0.
  const GridD grid(16);
  Params p;
  p.sigma = 0.3;
  p.tau = 0.5;
  p.chi0 = 2.0;
  const double dt = 0.01;
  const int steps = 50;

  State q = zero_state(grid);
  q.M[0] = sample(grid, [](double x, double) { return std::cos(2.0 * x); });
  State s = q;
  for (int n = 0; n < steps; ++n) s = step(s, Forcing{}, p, dt, grid.dealias_cutoff());
  const double rate_q = p.sigma * 4.0 + (1.0 + p.chi0) / p.tau;
  CHECK(rel_diff(s.M[0].to_physical(), (std::exp(-rate_q * dt * steps) * q.M[0]).to_physical()) < 1e-12);
  CHECK(norm(s.u) < 1e-14);

  State sol = zero_state(grid);
  sol.M[0] = sample(grid, [](double, double y) { return std::sin(3.0 * y); });
  s = sol;
  for (int n = 0; n < steps; ++n) s = step(s, Forcing{}, p, dt, grid.dealias_cutoff());
  const double rate_p = p.sigma * 9.0 + 1.0 / p.tau;
  CHECK(rel_diff(s.M[0].to_physical(), (std::exp(-rate_p * dt * steps) * sol.M[0]).to_physical()) < 1e-12);
}

TEST_CASE("run with t_end = 0 returns the initial state") {
  RunConfig cfg = small_config();
  cfg.stepper.t_end = 0.0;
  const State init = initial_state(cfg);
  const RunResult r = run(cfg);
  CHECK(r.steps == 0);
  CHECK(same_coeffs(r.final_state, init));
  CHECK(r.ledger.size() == 1);
}

TEST_CASE("runs are deterministic") {
  RunConfig cfg = small_config();
  cfg.ic.kind = IcKind::random;
  cfg.ic.seed = 5;
  cfg.forcing.add({1, 1, {0.2, 0.1}, TemporalLaw::cosine, 1.0});
  const RunResult a = run(cfg), b = run(cfg);
  REQUIRE(a.ledger.size() == b.ledger.size());
  std::ostringstream sa, sb;
  write_ledger_csv(sa, a.ledger);
  write_ledger_csv(sb, b.ledger);
  CHECK(sa.str() == sb.str());
  CHECK(same_coeffs(a.final_state, b.final_state));
}

TEST_CASE("unforced default run loses energy") {
  RunConfig cfg = small_config();
  cfg.stepper.t_end = 1.0;
  cfg.output_every = 10;
  const RunResult r = run(cfg);
  CHECK(r.ledger.back().t == doctest::Approx(1.0));
  CHECK(r.ledger.back().energy < r.ledger.front().energy);
}

TEST_CASE("divergence-free and real over 1000 steps") {
  RunConfig cfg;
  cfg.n = 16;
  cfg.ic.kind = IcKind::random;
  cfg.ic.seed = 11;
  cfg.stepper.dt = 1e-3;
  cfg.stepper.t_end = 1.0;
  cfg.forcing.add({2, 1, {0.3, 0.0}, TemporalLaw::constant, 0.0});
  RunHooks hooks;
  hooks.audit = false;
  const RunResult r = run(cfg, hooks);
  CHECK(r.steps == 1000);
  const State& s = r.final_state;
  CHECK(norm(q_project(s.u)) <= 1e-12 * norm(s.u));
  for (const Field* f : {&s.u[0], &s.u[1], &s.omega, &s.M[0], &s.M[1]}) CHECK(hermitian_residual(*f) < 1e-13);
}

TEST_CASE("stiffness covers advection, rotation, coupling and relaxation") {
  const GridD grid(16);
  Params p;
  p.zeta = 3.0;
  p.rho0 = 2.0;
  p.kappa = 0.5;
  p.tau = 0.25;
  State s = zero_state(grid);
  CHECK(stiffness(s, p) == doctest::Approx(6.0));  // 2 zeta / (rho0 kappa)
  p.zeta = 0.1;
  CHECK(stiffness(s, p) == doctest::Approx(4.0));  // 1 / tau
  s = initial_conditions(IcSpec{}, grid);
  CHECK(stiffness(s, p) == doctest::Approx(std::max(4.0, sup_norm(s.u) / grid.spacing())));
}

TEST_CASE("adaptive stepping shrinks dt and lands on t_end") {
  RunConfig cfg = small_config();
  cfg.stepper.adapt = true;
  cfg.stepper.dt = 1.0;
  cfg.stepper.t_end = 0.3;
  cfg.params.tau = 0.1;  // stiffness 10, cfl 0.4 -> dt 0.04
  const RunResult r = run(cfg);
  CHECK(r.final_state.t == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(r.steps == 8);
  CHECK(r.last_dt <= 0.04 + 1e-15);
}

TEST_CASE("a non-finite state raises a step failure carrying the last good state") {
  RunConfig cfg = small_config();
  State bad = initial_state(cfg);
  bad.omega(1, 1) = std::numeric_limits<double>::infinity();
  RunHooks hooks;
  hooks.audit = false;
  try {
    (void)run(cfg, bad, hooks);
    FAIL("expected StepFailure");
  } catch (const StepFailure& e) {
    CHECK(e.step() == 1);
    CHECK(e.last_good().t == 0.0);
  }
}

TEST_CASE("twin run with zero perturbation has zero separation") {
  RunConfig cfg = small_config();
  const TwinReport r = twin_run(cfg, 0.0);
  for (double d : r.delta_l2) CHECK(d == 0.0);
  CHECK(r.ratio_l2 == 0.0);
}

TEST_CASE("twin separations grow by comparable factors in both norms") {
  RunConfig cfg = small_config();
  cfg.stepper.t_end = 0.5;
  const TwinReport r = twin_run(cfg, 1e-8);
  CHECK(std::isfinite(r.ratio_l2));
  CHECK(r.ratio_half / r.ratio_l2 < 10.0);
  CHECK(r.ratio_l2 / r.ratio_half < 10.0);
}

TEST_CASE("Galerkin ladder needs a grid that resolves every cutoff") {
  RunConfig cfg = small_config();
  CHECK_THROWS_WITH_AS(galerkin_ladder(cfg, {4.0, 8.0}), doctest::Contains("insufficient grid resolution"),
                       std::invalid_argument);
}

TEST_CASE("Galerkin ladder with data resolved at the smallest cutoff") {
  RunConfig cfg;
  cfg.n = 32;
  cfg.stepper.dt = 1e-2;
  cfg.stepper.t_end = 0.2;
  // Taylor-Green data lives at |k| <= sqrt 2, but the products spread it.
  const LadderReport r = galerkin_ladder(cfg, {2.0, 4.0});
  REQUIRE(r.entries.size() == 2);
  CHECK(r.entries[1].gap.h_half < r.entries[0].gap.h_half);
  CHECK(r.sup_variation() < 0.05);
}
