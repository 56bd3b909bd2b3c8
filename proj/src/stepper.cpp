#include "frsm/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

namespace frsm {

namespace {

constexpr double kTimeSlack = 1e-12;

State axpy(const State& s, double a, const ExplicitTendency& n) {
  return State{s.u + a * n.du, s.omega + a * n.domega, s.M + a * n.dM, s.t};
}

bool finite(const State& s) {
  return s.u[0].coeffs().allFinite() && s.u[1].coeffs().allFinite() && s.omega.coeffs().allFinite() &&
         s.M[0].coeffs().allFinite() && s.M[1].coeffs().allFinite();
}

void scale_modes(Field& f, const RealGrid<double>& factor) {
  f.coeffs() *= factor.cast<std::complex<double>>();
}

int fixed_step_count(double t_end, double dt) {
  return std::max(1, static_cast<int>(std::ceil(t_end / dt - 1e-9)));
}

}  // namespace

double resolved_kmax(const StepperConfig& cfg, const GridD& grid) {
  return cfg.kmax > 0.0 ? cfg.kmax : grid.dealias_cutoff();
}

double stiffness(const State& s, const Params& p) {
  return std::max({sup_norm(s.u) / s.grid().spacing(), sup_norm(s.omega), 2.0 * p.zeta / (p.rho0 * p.kappa),
                   1.0 / p.tau});
}

LinearPropagator::LinearPropagator(const GridD& grid, const Params& p, double dt) : dt_(dt) {
  const RealGrid<double>& ksq = grid.ksq();
  eu_ = (-(p.eta + p.zeta) / p.rho0 * dt * ksq).exp();
  ew_ = (-p.eta_p / (p.rho0 * p.kappa) * dt * ksq).exp();
  emp_ = ((-p.sigma * ksq - 1.0 / p.tau) * dt).exp();
  emq_ = ((-p.sigma * ksq - (1.0 + p.chi0) / p.tau) * dt).exp();
}

State LinearPropagator::apply(const State& s) const {
  State out = s;
  scale_modes(out.u[0], eu_);
  scale_modes(out.u[1], eu_);
  scale_modes(out.omega, ew_);
  const VecField q = q_project(s.M);
  const RealGrid<double> jump = emq_ - emp_;
  for (int c = 0; c < 2; ++c) {
    Field qc = q[c];
    scale_modes(out.M[c], emp_);
    scale_modes(qc, jump);
    out.M[c] += qc;
  }
  return out;
}

State step(const State& s, const Forcing& forcing, const Params& p, const LinearPropagator& prop, double kmax) {
  const double dt = prop.dt();
  const GridD& grid = s.grid();
  try {
    const ExplicitTendency n0 = explicit_tendency(s, make_gf(forcing, grid, s.t, kmax), p, kmax,
                                                  LinearSplit::diffusion_and_relaxation);
    State predictor = prop.apply(axpy(s, dt, n0));
    predictor.t = s.t + dt;
    const ExplicitTendency n1 = explicit_tendency(predictor, make_gf(forcing, grid, s.t + dt, kmax), p, kmax,
                                                  LinearSplit::diffusion_and_relaxation);
    State out = axpy(prop.apply(axpy(s, 0.5 * dt, n0)), 0.5 * dt, n1);
    out.t = s.t + dt;
    if (!finite(out)) throw NonFiniteError("non-finite state after step");
    return out;
  } catch (const NonFiniteError& e) {
    throw StepFailure(std::string(e.what()) + " at t = " + std::to_string(s.t) + ", dt = " + std::to_string(dt),
                      s, 0);
  }
}

State step(const State& s, const Forcing& forcing, const Params& p, double dt, double kmax) {
  return step(s, forcing, p, LinearPropagator(s.grid(), p, dt), kmax);
}

State initial_state(const RunConfig& cfg) {
  const GridD grid = cfg.grid();
  return truncate(initial_conditions(cfg.ic, grid), resolved_kmax(cfg.stepper, grid));
}

RunResult run(const RunConfig& cfg, const RunHooks& hooks) { return run(cfg, initial_state(cfg), hooks); }

RunResult run(const RunConfig& cfg, const State& initial, const RunHooks& hooks) {
  const StepperConfig& sc = cfg.stepper;
  if (!(sc.dt > 0.0)) throw std::invalid_argument("stepper.dt must be positive");
  if (!(sc.t_end >= 0.0)) throw std::invalid_argument("stepper.t_end must be non-negative");
  if (!(sc.cfl > 0.0)) throw std::invalid_argument("stepper.cfl must be positive");
  const GridD& grid = initial.grid();
  const double kmax = resolved_kmax(sc, grid);
  const int every = std::max(1, cfg.output_every);

  RunResult result{initial, {}, 0, 0.0};
  std::optional<Auditor> auditor;
  if (hooks.audit) auditor.emplace(cfg.params, cfg.forcing, kmax);

  auto emit = [&](const State& s, std::int64_t n, bool output) {
    if (hooks.on_step) hooks.on_step(s, n);
    if (output && auditor) {
      const LedgerRow row = auditor->audit(s, n);
      if (hooks.on_output) hooks.on_output(s, row);
    }
  };

  State s = initial;
  const double t0 = s.t;
  emit(s, 0, true);
  if (sc.t_end <= 0.0) {
    result.final_state = s;
    if (auditor) result.ledger = auditor->rows();
    return result;
  }

  auto advance = [&](const LinearPropagator& prop, std::int64_t n) {
    try {
      return step(s, cfg.forcing, cfg.params, prop, kmax);
    } catch (const StepFailure& f) {
      throw StepFailure(std::string(f.what()) + " (step " + std::to_string(n) + ")", s, n);
    }
  };

  if (!sc.adapt) {
    const int steps = fixed_step_count(sc.t_end, sc.dt);
    const double h = sc.t_end / steps;
    const LinearPropagator prop(grid, cfg.params, h);
    for (int n = 1; n <= steps; ++n) {
      s = advance(prop, n);
      s.t = t0 + n * h;
      emit(s, n, n % every == 0 || n == steps);
    }
    result.steps = steps;
    result.last_dt = h;
  } else {
    const double t_end = t0 + sc.t_end;
    double h = sc.dt;
    std::optional<LinearPropagator> prop;
    std::int64_t n = 0;
    while (s.t < t_end - kTimeSlack * std::max(1.0, t_end)) {
      const double limit = sc.cfl / stiffness(s, cfg.params);
      if (limit < h) h = limit;
      if (h < kTimeSlack * std::max(1.0, sc.t_end)) {
        throw StepFailure("time step underflow (dt = " + std::to_string(h) + ")", s, n);
      }
      const double remaining = t_end - s.t;
      const bool last = remaining <= h * (1.0 + 1e-9);
      const double hn = last ? remaining : h;
      if (!prop || prop->dt() != hn) prop.emplace(grid, cfg.params, hn);
      ++n;
      s = advance(*prop, n);
      if (last) s.t = t_end;
      emit(s, n, n % every == 0 || last);
      result.last_dt = hn;
    }
    result.steps = n;
  }
  result.final_state = s;
  if (auditor) result.ledger = auditor->rows();
  return result;
}

// ---------------------------------------------------------------------------

StateDistance distance(const State& a, const State& b) {
  const GridD& target = a.grid().n() >= b.grid().n() ? a.grid() : b.grid();
  const State x = resample(a, target);
  const State y = resample(b, target);
  const VecField du = x.u - y.u;
  const Field dw = x.omega - y.omega;
  const VecField dm = x.M - y.M;
  auto h = [&](double s) {
    const double nu = sobolev_norm(du, s, false);
    const double nw = sobolev_norm(dw, s, false);
    const double nm = sobolev_norm(dm, s, false);
    return std::sqrt(nu * nu + nw * nw + nm * nm);
  };
  return {h(0.0), h(0.5), h(1.0)};
}

bool LadderReport::strictly_decreasing() const {
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (!(entries[i].gap.h_half < entries[i - 1].gap.h_half)) return false;
  }
  return !entries.empty();
}

double LadderReport::sup_variation() const {
  if (entries.empty()) return 0.0;
  double lo = entries.front().sup_half_energy, hi = lo;
  for (const auto& e : entries) {
    lo = std::min(lo, e.sup_half_energy);
    hi = std::max(hi, e.sup_half_energy);
  }
  return hi > 0.0 ? (hi - lo) / hi : 0.0;
}

namespace {

int grid_for_cutoff(double cutoff, double length) {
  int n = 8;
  while (GridD(n, length).dealias_cutoff() < cutoff * (1.0 - 1e-12)) n *= 2;
  return n;
}

double half_energy(const State& s, const Params& p) {
  return p.rho0 * norm_sq(lambda_s(s.u, 0.5)) + p.rho0 * p.kappa * norm_sq(lambda_s(s.omega, 0.5)) +
         norm_sq(lambda_s(s.M, 0.5));
}

}  // namespace

LadderReport galerkin_ladder(const RunConfig& cfg, const std::vector<double>& cutoffs) {
  if (cutoffs.empty()) throw std::invalid_argument("cutoff list is empty");
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    if (!(cutoffs[i] > 0.0)) throw std::invalid_argument("cutoffs must be positive");
    if (i > 0 && !(cutoffs[i] > cutoffs[i - 1])) throw std::invalid_argument("cutoffs must be increasing");
  }
  std::vector<double> levels = cutoffs;
  for (double c : cutoffs) levels.push_back(2.0 * c);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  const GridD base = cfg.grid();
  for (double c : levels) {
    const int n = grid_for_cutoff(c, cfg.length);
    if (n > cfg.n) {
      throw std::invalid_argument("insufficient grid resolution: cutoff " + std::to_string(c) + " needs N = " +
                                  std::to_string(n) + ", grid has N = " + std::to_string(cfg.n));
    }
  }
  const State full = initial_conditions(cfg.ic, base);

  struct Level {
    State final_state;
    double sup_half;
  };
  std::map<double, Level> runs;
  for (double c : levels) {
    RunConfig rc = cfg;
    rc.n = grid_for_cutoff(c, cfg.length);
    rc.stepper.kmax = c;
    rc.stepper.adapt = false;
    const State init = truncate(resample(full, rc.grid()), c);
    double sup = 0.0;
    RunHooks hooks;
    hooks.audit = false;
    hooks.on_step = [&](const State& s, std::int64_t) { sup = std::max(sup, half_energy(s, cfg.params)); };
    RunResult r = run(rc, init, hooks);
    runs.emplace(c, Level{std::move(r.final_state), sup});
  }

  LadderReport report;
  for (double c : cutoffs) {
    const Level& lo = runs.at(c);
    const Level& hi = runs.at(2.0 * c);
    report.entries.push_back({c, lo.final_state.grid().n(), distance(lo.final_state, hi.final_state), lo.sup_half});
  }
  return report;
}

// ---------------------------------------------------------------------------

TwinReport twin_run(const RunConfig& cfg, double size) {
  if (!(size >= 0.0)) throw std::invalid_argument("perturbation size must be non-negative");
  const GridD grid = cfg.grid();
  const double kmax = resolved_kmax(cfg.stepper, grid);
  State a = initial_state(cfg);
  State b = a;
  if (size > 0.0) {
    IcSpec ps = cfg.ic;
    ps.kind = IcKind::random;
    ps.seed = cfg.ic.seed ^ 0x9e3779b97f4a7c15ULL;
    ps.kmax = std::min(4.0 * grid.dk(), kmax);
    ps.decay = 0.0;
    VecField du = leray_project(initial_conditions(ps, grid).u);
    du *= size / norm(du);
    b.u += du;
  }

  TwinReport rep;
  auto record = [&]() {
    const VecField du = a.u - b.u;
    const Field dw = a.omega - b.omega;
    const VecField dm = a.M - b.M;
    rep.times.push_back(a.t);
    rep.delta_l2.push_back(std::sqrt(norm_sq(du) + norm_sq(dw) + norm_sq(dm)));
    rep.delta_half.push_back(
        std::sqrt(norm_sq(lambda_s(du, 0.5)) + norm_sq(lambda_s(dw, 0.5)) + norm_sq(lambda_s(dm, 0.5))));
  };
  record();

  const StepperConfig& sc = cfg.stepper;
  const int every = std::max(1, cfg.output_every);
  if (sc.t_end > 0.0) {
    const double t0 = a.t;
    const double t_end = t0 + sc.t_end;
    double h = sc.adapt ? sc.dt : sc.t_end / fixed_step_count(sc.t_end, sc.dt);
    std::optional<LinearPropagator> prop;
    std::int64_t n = 0;
    while (a.t < t_end - kTimeSlack * std::max(1.0, t_end)) {
      if (sc.adapt) {
        h = std::min(h, sc.cfl / std::max(stiffness(a, cfg.params), stiffness(b, cfg.params)));
        if (h < kTimeSlack * std::max(1.0, sc.t_end)) throw StepFailure("time step underflow", a, n);
      }
      const double remaining = t_end - a.t;
      const bool last = remaining <= h * (1.0 + 1e-9);
      const double hn = last ? remaining : h;
      if (!prop || prop->dt() != hn) prop.emplace(grid, cfg.params, hn);
      ++n;
      a = step(a, cfg.forcing, cfg.params, *prop, kmax);
      b = step(b, cfg.forcing, cfg.params, *prop, kmax);
      if (last) a.t = b.t = t_end;
      if (n % every == 0 || last) record();
    }
  }
  const double d0 = rep.delta_l2.front();
  const double h0 = rep.delta_half.front();
  rep.ratio_l2 = d0 > 0.0 ? rep.delta_l2.back() / d0 : 0.0;
  rep.ratio_half = h0 > 0.0 ? rep.delta_half.back() / h0 : 0.0;
  return rep;
}

ConvergenceReport self_convergence(const RunConfig& cfg) {
  RunHooks hooks;
  hooks.audit = false;
  const State init = initial_state(cfg);
  State finals[3] = {init, init, init};
  for (int i = 0; i < 3; ++i) {
    RunConfig rc = cfg;
    rc.stepper.adapt = false;
    rc.stepper.dt = cfg.stepper.dt / static_cast<double>(1 << i);
    finals[i] = run(rc, init, hooks).final_state;
  }
  ConvergenceReport r;
  r.dt = cfg.stepper.dt;
  r.error_coarse = distance(finals[0], finals[1]).l2;
  r.error_fine = distance(finals[1], finals[2]).l2;
  r.ratio = r.error_fine > 0.0 ? r.error_coarse / r.error_fine : 0.0;
  r.order = r.ratio > 0.0 ? std::log2(r.ratio) : 0.0;
  return r;
}

}  // namespace frsm
