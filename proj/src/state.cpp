#include "frsm/state.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "frsm/snapshot.hpp"

namespace frsm {

std::array<double, 10> Params::to_array() const {
  return {rho0, eta, zeta, mu0, kappa, eta_p, lambda_p, sigma, tau, chi0};
}

Params Params::from_array(const std::array<double, 10>& a) {
  return Params{a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7], a[8], a[9]};
}

double& Params::at(std::string_view name) {
  double* slots[] = {&rho0, &eta, &zeta, &mu0, &kappa, &eta_p, &lambda_p, &sigma, &tau, &chi0};
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return *slots[i];
  }
  throw std::invalid_argument("unknown parameter '" + std::string(name) + "'");
}

double Params::c_tilde() const {
  return std::min({eta, eta_p, sigma, mu0 * sigma / 2.0,
                   (mu0 / 2.0 + chi0 * (mu0 + 0.5)) / tau, 1.0 / tau});
}

double Params::c_half() const {
  return std::min({(eta + zeta) / 2.0, eta_p / 2.0, 4.0 * zeta, sigma / 2.0, 1.0 / tau,
                   chi0 / (2.0 * tau)});
}

State zero_state(const GridD& grid) { return State{VecField(grid), Field(grid), VecField(grid), 0.0}; }

State resample(const State& s, const GridD& target) {
  return State{resample(s.u, target), resample(s.omega, target), resample(s.M, target), s.t};
}

State truncate(const State& s, double kmax) {
  return State{truncate(s.u, kmax), truncate(s.omega, kmax), truncate(s.M, kmax), s.t};
}

// ---------------------------------------------------------------------------
// Forcing

double temporal_value(const ForcingMode& m, double t) {
  switch (m.law) {
    case TemporalLaw::constant:
      return 1.0;
    case TemporalLaw::cosine:
      return std::cos(m.rate * t);
    case TemporalLaw::ramp:
      return 1.0 - std::exp(-m.rate * t);
  }
  return 0.0;
}

double temporal_rate(const ForcingMode& m, double t) {
  switch (m.law) {
    case TemporalLaw::constant:
      return 0.0;
    case TemporalLaw::cosine:
      return -m.rate * std::sin(m.rate * t);
    case TemporalLaw::ramp:
      return m.rate * std::exp(-m.rate * t);
  }
  return 0.0;
}

Forcing::Forcing(std::vector<ForcingMode> modes) {
  for (const auto& m : modes) add(m);
}

void Forcing::add(const ForcingMode& mode) {
  if (mode.m1 == 0 && mode.m2 == 0) {
    throw std::invalid_argument("forcing mode k = 0 is not allowed: F must have zero average");
  }
  if (mode.law == TemporalLaw::ramp && !(mode.rate > 0.0)) {
    throw std::invalid_argument("ramp forcing needs a positive rate");
  }
  modes_.push_back(mode);
}

Field Forcing::assemble(const GridD& grid, double t, bool derivative) const {
  Field f(grid);
  const int half = grid.n() / 2;
  for (const auto& m : modes_) {
    if (std::abs(m.m1) >= half || std::abs(m.m2) >= half) {
      throw std::invalid_argument("forcing mode (" + std::to_string(m.m1) + ", " +
                                  std::to_string(m.m2) + ") is not resolved on an N = " +
                                  std::to_string(grid.n()) + " grid");
    }
    const double g = derivative ? temporal_rate(m, t) : temporal_value(m, t);
    const std::complex<double> a = 0.5 * g * m.amplitude;
    f(grid.index(m.m1), grid.index(m.m2)) += a;
    f(grid.index(-m.m1), grid.index(-m.m2)) += std::conj(a);
  }
  return f;
}

Field Forcing::evaluate(const GridD& grid, double t) const { return assemble(grid, t, false); }

Field Forcing::evaluate_dt(const GridD& grid, double t) const { return assemble(grid, t, true); }

namespace {

VecField potential_gradient(const Field& f) {
  // Delta^-1 grad f, mean dropped.
  return gradient(inverse_laplacian(f));
}

}  // namespace

ExternalPotential make_gf(const Forcing& forcing, const GridD& grid, double t, double kmax) {
  if (forcing.empty()) return {VecField(grid), VecField(grid)};
  Field f = forcing.evaluate(grid, t);
  Field df = forcing.evaluate_dt(grid, t);
  if (std::isfinite(kmax)) {
    f = truncate(f, kmax);
    df = truncate(df, kmax);
  }
  return {potential_gradient(f), potential_gradient(df)};
}

// ---------------------------------------------------------------------------
// Initial conditions

IcKind parse_ic_kind(std::string_view s) {
  if (s == "zero") return IcKind::zero;
  if (s == "taylor-green") return IcKind::taylor_green;
  if (s == "random") return IcKind::random;
  if (s == "file") return IcKind::file;
  throw std::invalid_argument("unknown initial condition kind '" + std::string(s) + "'");
}

std::string_view to_string(IcKind k) {
  switch (k) {
    case IcKind::zero:
      return "zero";
    case IcKind::taylor_green:
      return "taylor-green";
    case IcKind::random:
      return "random";
    case IcKind::file:
      return "file";
  }
  return "?";
}

namespace {

Field random_scalar(const GridD& grid, std::mt19937_64& rng, const IcSpec& spec) {
  std::normal_distribution<double> normal(0.0, 1.0);
  RealGrid<double> noise(grid.n(), grid.n());
  for (Eigen::Index j = 0; j < noise.cols(); ++j) {
    for (Eigen::Index i = 0; i < noise.rows(); ++i) noise(i, j) = normal(rng);
  }
  Field f = truncate(Field::from_physical(grid, noise), spec.kmax, true);
  if (spec.decay > 0.0) {
    f.coeffs() *= (-grid.kabs() / spec.decay).exp().cast<std::complex<double>>();
  }
  return f;
}

double rms(double norm_value, const GridD& grid) { return norm_value / grid.length(); }

template <typename F>
F rescale(F f, double amplitude, const GridD& grid) {
  const double r = rms(norm(f), grid);
  if (r > 0.0) f *= amplitude / r;
  return f;
}

}  // namespace

State initial_conditions(const IcSpec& spec, const GridD& grid) {
  switch (spec.kind) {
    case IcKind::zero:
      return zero_state(grid);
    case IcKind::taylor_green: {
      const double k = grid.dk();
      const double h = grid.spacing();
      RealGrid<double> u1(grid.n(), grid.n()), u2(grid.n(), grid.n()), m1(grid.n(), grid.n());
      for (int j = 0; j < grid.n(); ++j) {
        for (int i = 0; i < grid.n(); ++i) {
          const double x1 = k * i * h;
          const double x2 = k * j * h;
          u1(i, j) = std::sin(x1) * std::cos(x2);
          u2(i, j) = -std::cos(x1) * std::sin(x2);
          m1(i, j) = std::sin(x2);
        }
      }
      State s = zero_state(grid);
      s.u = VecField(Field::from_physical(grid, u1), Field::from_physical(grid, u2));
      s.M[0] = Field::from_physical(grid, m1);
      return s;
    }
    case IcKind::random: {
      if (!(spec.kmax > 0.0) || spec.kmax > grid.dealias_cutoff()) {
        throw std::invalid_argument("ic.kmax must lie in (0, " + std::to_string(grid.dealias_cutoff()) +
                                    "] on this grid");
      }
      std::mt19937_64 rng(spec.seed);
      State s = zero_state(grid);
      const Field psi = random_scalar(grid, rng, spec);
      s.u = rescale(leray_project(grad_perp(psi)), spec.amplitude, grid);
      s.omega = rescale(random_scalar(grid, rng, spec), spec.amplitude, grid);
      VecField m(random_scalar(grid, rng, spec), random_scalar(grid, rng, spec));
      s.M = rescale(std::move(m), spec.amplitude, grid);
      return s;
    }
    case IcKind::file: {
      const Snapshot snap = load_snapshot(spec.path);
      if (!(snap.grid() == grid)) {
        throw std::invalid_argument("snapshot " + spec.path + " has N = " + std::to_string(snap.n) +
                                    ", expected N = " + std::to_string(grid.n()));
      }
      State s = snap.to_state();
      s.t = 0.0;
      return s;
    }
  }
  throw std::invalid_argument("bad initial condition kind");
}

// ---------------------------------------------------------------------------
// Validation

const Violation* ValidationReport::find(std::string_view name) const {
  for (const auto& v : violations) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& v : violations) {
    os << v.name << ": " << v.magnitude << " (relative " << v.relative << ")\n";
  }
  return os.str();
}

namespace {

bool finite(const Field& f) { return f.coeffs().allFinite(); }

double max_abs(const Field& f) { return f.coeffs().abs().maxCoeff(); }

void check_hermitian(const Field& f, const char* name, double tol, ValidationReport& report) {
  const double r = hermitian_residual(f);
  const double scale = max_abs(f);
  const double rel = scale > 0.0 ? r / scale : r;
  if (rel > tol) report.violations.push_back({std::string("hermitian-") + name, r, rel});
}

}  // namespace

ValidationReport validate(const State& state, const ValidationTolerances& tol) {
  ValidationReport report;
  const std::pair<const Field*, const char*> fields[] = {
      {&state.u[0], "u1"}, {&state.u[1], "u2"}, {&state.omega, "omega"}, {&state.M[0], "M1"}, {&state.M[1], "M2"}};
  for (const auto& [f, name] : fields) {
    if (!finite(*f)) {
      report.violations.push_back({std::string("nonfinite-") + name, std::numeric_limits<double>::infinity(),
                                   std::numeric_limits<double>::infinity()});
      return report;
    }
  }
  const double q = norm(q_project(state.u));
  const double un = norm(state.u);
  const double rel = un > 0.0 ? q / un : q;
  if (rel > tol.divergence) report.violations.push_back({"div-residual", q, rel});
  for (const auto& [f, name] : fields) check_hermitian(*f, name, tol.hermitian, report);
  return report;
}

ValidationReport validate(const Params& params) {
  ValidationReport report;
  const auto values = params.to_array();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      report.violations.push_back({"nonpositive-" + std::string(Params::names[i]), values[i], values[i]});
    }
  }
  return report;
}

}  // namespace frsm
