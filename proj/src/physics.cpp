#include "frsm/physics.hpp"

#include <cmath>
#include <tuple>

namespace frsm {

namespace {

using Phys = RealGrid<double>;

void require_finite(const Phys& a, const char* what) {
  if (!a.allFinite()) throw NonFiniteError(std::string("non-finite value in ") + what);
}

void check_cutoff(const GridD& grid, double kmax) {
  if (!(kmax > 0.0) || kmax > grid.dealias_cutoff() * (1.0 + 1e-12)) {
    throw std::invalid_argument("truncation radius " + std::to_string(kmax) + " exceeds the 2/3 cutoff " +
                                std::to_string(grid.dealias_cutoff()));
  }
}

struct PhysicalGradient {
  // d[i][j] = d_i a_j
  Phys d[2][2];
};

PhysicalGradient physical_gradient(const VecField& a) {
  PhysicalGradient g;
  for (int j = 0; j < 2; ++j) {
    std::tie(g.d[0][j], g.d[1][j]) = to_physical_pair(partial(a[j], 0), partial(a[j], 1));
  }
  return g;
}

double relative(double residual, double scale) { return scale > 0.0 ? residual / scale : residual; }

double gradient_norm(const VecField& v) {
  return std::sqrt(norm_sq(gradient(v[0])) + norm_sq(gradient(v[1])));
}

}  // namespace

VecField solve_magnetostatics(const VecField& M, const VecField& g_f) {
  M[0].check(g_f[0]);
  return g_f - q_project(M);
}

MagnetostaticResidual magnetostatic_residual(const VecField& H, const VecField& M, const Field& F) {
  MagnetostaticResidual r;
  const Field div_m = divergence(M);
  r.divergence = relative(norm(divergence(H) + div_m - F), norm(div_m) + norm(F));
  r.curl = relative(norm(curl_2d(H)), gradient_norm(H));
  return r;
}

Field transport(const VecField& u, const Field& a, double kmax) {
  u[0].check(a);
  const auto [u1, u2] = to_physical_pair(u[0], u[1]);
  const auto [a1, a2] = to_physical_pair(partial(a, 0), partial(a, 1));
  const Phys adv = u1 * a1 + u2 * a2;
  require_finite(adv, "transport");
  return truncate(Field::from_physical(a.grid(), adv), kmax);
}

VecField transport(const VecField& u, const VecField& a, double kmax) {
  return {transport(u, a[0], kmax), transport(u, a[1], kmax)};
}

VecField lorentz_force(const VecField& M, const VecField& H, double mu0, double kmax) {
  M[0].check(H[0]);
  const auto [m1, m2] = to_physical_pair(M[0], M[1]);
  const PhysicalGradient dh = physical_gradient(H);
  VecField out(M.grid());
  for (int j = 0; j < 2; ++j) {
    const Phys f = mu0 * (m1 * dh.d[0][j] + m2 * dh.d[1][j]);
    require_finite(f, "Lorentz force");
    out[j] = truncate(Field::from_physical(M.grid(), f), kmax);
  }
  return out;
}

ExplicitTendency explicit_tendency(const State& s, const ExternalPotential& gf, const Params& p, double kmax,
                                   LinearSplit split) {
  const GridD& grid = s.grid();
  check_cutoff(grid, kmax);
  const VecField H = solve_magnetostatics(s.M, gf.g_f);

  const auto [u1, u2] = to_physical_pair(s.u[0], s.u[1]);
  const auto [m1, m2] = to_physical_pair(s.M[0], s.M[1]);
  const auto [h1, h2] = to_physical_pair(H[0], H[1]);
  const auto [dw1, dw2] = to_physical_pair(partial(s.omega, 0), partial(s.omega, 1));
  const Phys w = s.omega.to_physical();
  const PhysicalGradient du = physical_gradient(s.u);
  const PhysicalGradient dm = physical_gradient(s.M);
  const PhysicalGradient dh = physical_gradient(H);

  const double lorentz = p.mu0 / p.rho0;
  const double torque = p.mu0 / (p.rho0 * p.kappa);

  Phys nl_u[2], nl_m[2];
  for (int j = 0; j < 2; ++j) {
    nl_u[j] = -(u1 * du.d[0][j] + u2 * du.d[1][j]) + lorentz * (m1 * dh.d[0][j] + m2 * dh.d[1][j]);
    nl_m[j] = -(u1 * dm.d[0][j] + u2 * dm.d[1][j]);
  }
  // (-M2, M1) omega
  nl_m[0] -= m2 * w;
  nl_m[1] += m1 * w;
  const Phys nl_w = -(u1 * dw1 + u2 * dw2) + torque * (m1 * h2 - m2 * h1);

  require_finite(nl_u[0], "momentum products");
  require_finite(nl_u[1], "momentum products");
  require_finite(nl_w, "angular momentum products");
  require_finite(nl_m[0], "magnetization products");
  require_finite(nl_m[1], "magnetization products");

  auto cut = [&](const Phys& a) { return truncate(Field::from_physical(grid, a), kmax); };
  auto cut_pair = [&](const Phys& a, const Phys& b) {
    auto [x, y] = from_physical_pair(grid, a, b);
    return VecField(truncate(x, kmax), truncate(y, kmax));
  };

  ExplicitTendency t{VecField(grid), Field(grid), VecField(grid)};
  const double spin_u = 2.0 * p.zeta / p.rho0;
  const double spin_w = 2.0 * p.zeta / (p.rho0 * p.kappa);
  // (d2 omega, -d1 omega)
  const VecField rot_omega(partial(s.omega, 1), -partial(s.omega, 0));
  t.du = leray_project(cut_pair(nl_u[0], nl_u[1]) + spin_u * rot_omega);
  t.domega = cut(nl_w) + spin_w * (curl_2d(s.u) - 2.0 * s.omega);
  t.dM = cut_pair(nl_m[0], nl_m[1]);
  if (split == LinearSplit::diffusion) {
    t.dM -= (1.0 / p.tau) * (s.M - p.chi0 * H);
  } else {
    t.dM += (p.chi0 / p.tau) * gf.g_f;
  }
  return t;
}

Tendency rhs(const State& s, const Forcing& forcing, const Params& p, double kmax, LinearSplit split) {
  const ExternalPotential gf = make_gf(forcing, s.grid(), s.t, kmax);
  ExplicitTendency e = explicit_tendency(s, gf, p, kmax, split);
  VecField dm_lin = p.sigma * laplacian(s.M);
  if (split == LinearSplit::diffusion_and_relaxation) {
    dm_lin -= (1.0 / p.tau) * (s.M + p.chi0 * q_project(s.M));
  }
  return Tendency{((p.eta + p.zeta) / p.rho0) * laplacian(s.u),
                  std::move(e.du),
                  (p.eta_p / (p.rho0 * p.kappa)) * laplacian(s.omega),
                  std::move(e.domega),
                  std::move(dm_lin),
                  std::move(e.dM)};
}

namespace {

// -rho0 J(u . grad u) + mu0 J(M . grad H)
VecField momentum_flux(const State& s, const Forcing& forcing, const Params& p, double kmax) {
  const ExternalPotential gf = make_gf(forcing, s.grid(), s.t, kmax);
  const VecField H = solve_magnetostatics(s.M, gf.g_f);
  return lorentz_force(s.M, H, p.mu0, kmax) - p.rho0 * transport(s.u, s.u, kmax);
}

}  // namespace

Field recover_pressure(const State& s, const Forcing& forcing, const Params& p, double kmax) {
  return inverse_laplacian(divergence(momentum_flux(s, forcing, p, kmax)));
}

VecField unprojected_momentum_tendency(const State& s, const Forcing& forcing, const Params& p, double kmax) {
  const VecField rot_omega(partial(s.omega, 1), -partial(s.omega, 0));
  return (1.0 / p.rho0) * momentum_flux(s, forcing, p, kmax) + (2.0 * p.zeta / p.rho0) * rot_omega;
}

}  // namespace frsm
