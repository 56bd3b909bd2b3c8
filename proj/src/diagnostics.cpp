#include "frsm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>

#include "frsm/physics.hpp"

namespace frsm {

namespace {

double ratio(double value, double scale) {
  const double a = std::abs(value);
  if (scale > 0.0) return a / scale;
  return a == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

double half_norm_sq(const Field& f) { return norm_sq(lambda_s(f, 0.5)); }
double half_norm_sq(const VecField& v) { return norm_sq(lambda_s(v, 0.5)); }

double inhomogeneous_sq(const Field& f, double s) {
  const double n = sobolev_norm(f, s, false);
  return n * n;
}

double inhomogeneous_sq(const VecField& v, double s) {
  return inhomogeneous_sq(v[0], s) + inhomogeneous_sq(v[1], s);
}

double gradient_inhomogeneous_sq(const Field& f, double s) { return inhomogeneous_sq(gradient(f), s); }

double gradient_inhomogeneous_sq(const VecField& v, double s) {
  return gradient_inhomogeneous_sq(v[0], s) + gradient_inhomogeneous_sq(v[1], s);
}

}  // namespace

double gradient_norm_sq(const Field& f) { return norm_sq(gradient(f)); }

double gradient_norm_sq(const VecField& v) { return gradient_norm_sq(v[0]) + gradient_norm_sq(v[1]); }

double IdentityResiduals::max_cancellation() const {
  return std::max({transport_u, transport_omega, transport_M, rotation_M, lorentz, cross});
}

IdentityResiduals identity_residuals(const State& s, const VecField& g_f, const Params& p, double kmax) {
  IdentityResiduals r;
  const VecField H = solve_magnetostatics(s.M, g_f);
  const double u_inf = sup_norm(s.u);
  const double w_inf = sup_norm(s.omega);
  const double m_inf = sup_norm(s.M);
  const double nu = norm(s.u), nw = norm(s.omega), nm = norm(s.M), nh = norm(H), ng = norm(g_f);
  const double du = std::sqrt(gradient_norm_sq(s.u));
  const double dw = std::sqrt(gradient_norm_sq(s.omega));
  const double dm = std::sqrt(gradient_norm_sq(s.M));
  const double dh = std::sqrt(gradient_norm_sq(H));

  const VecField u_grad_m = transport(s.u, s.M, kmax);
  r.transport_u = ratio(inner(transport(s.u, s.u, kmax), s.u), u_inf * du * nu);
  r.transport_omega = ratio(inner(transport(s.u, s.omega, kmax), s.omega), u_inf * dw * nw);
  r.transport_M = ratio(inner(u_grad_m, s.M), u_inf * dm * nm);

  const Field w = s.omega;
  const VecField rot = truncate(VecField(-product(s.M[1], w), product(s.M[0], w)), kmax);
  r.rotation_M = ratio(inner(rot, s.M), w_inf * nm * nm);

  const VecField m_grad_h = lorentz_force(s.M, H, 1.0, kmax);
  r.lorentz = ratio(inner(m_grad_h, s.u) + inner(u_grad_m, H), m_inf * dh * nu + u_inf * dm * nh);

  const Field mxh = truncate(cross_2d(s.M, H), kmax);
  r.cross = ratio(inner(mxh, s.omega) - inner(rot, H), 2.0 * w_inf * nm * nh);

  r.ps_mh = ratio(-inner(s.M, H) - norm_sq(H) + inner(g_f, H), nm * nh + nh * nh + ng * nh);

  const VecField hh = lambda_s(H, 0.5);
  const VecField hm = lambda_s(s.M, 0.5);
  const VecField hq = lambda_s(q_project(s.M), 0.5);
  const VecField hg = lambda_s(g_f, 0.5);
  const double nhm = norm(hm);
  r.half_pairing = ratio(inner(hh, hm) + norm_sq(hq) - inner(hg, hm),
                         norm(hh) * nhm + norm_sq(hq) + norm(hg) * nhm);

  r.zeta_positivity = p.zeta * du * du + 4.0 * p.zeta * nw * nw - 2.0 * p.zeta * inner(curl_2d(s.u), s.omega);
  return r;
}

double lorentz_bound_ratio(const VecField& u, const VecField& M, const VecField& g_f, double kmax) {
  const VecField H = solve_magnetostatics(M, g_f);
  const VecField f = lorentz_force(M, H, 1.0, kmax);
  const double lhs = std::abs(inner(lambda_s(f, 0.5), lambda_s(u, 0.5)));
  const double rhs = std::sqrt(gradient_norm_sq(u)) * norm(lambda_s(M, 0.5)) *
                     (std::sqrt(gradient_norm_sq(lambda_s(M, 0.5))) + std::sqrt(gradient_norm_sq(lambda_s(g_f, 0.5))));
  return ratio(lhs, rhs);
}

// ---------------------------------------------------------------------------

Auditor::Auditor(Params params, Forcing forcing, double kmax, AuditTolerances tol)
    : params_(params), forcing_(std::move(forcing)), kmax_(kmax), tol_(tol) {}

LedgerRow Auditor::audit(const State& s, std::int64_t step) {
  const Params& p = params_;
  const GridD& grid = s.grid();
  const Field f = forcing_.empty() ? Field(grid) : truncate(forcing_.evaluate(grid, s.t), kmax_);
  const ExternalPotential gf = make_gf(forcing_, grid, s.t, kmax_);
  const VecField H = solve_magnetostatics(s.M, gf.g_f);

  LedgerRow row;
  row.step = step;
  row.t = s.t;
  row.energy = p.rho0 * norm_sq(s.u) + p.mu0 * norm_sq(H) + p.rho0 * p.kappa * norm_sq(s.omega) + norm_sq(s.M);
  row.dissipation = gradient_norm_sq(s.u) + gradient_norm_sq(s.omega) + gradient_norm_sq(s.M) +
                    norm_sq(divergence(s.M)) + norm_sq(H) + norm_sq(s.M);
  row.forcing_sq = norm_sq(f);
  row.gf_sq = norm_sq(gf.g_f);
  row.dt_gf_sq = norm_sq(gf.dt_g_f);
  row.f_tau = row.gf_sq / p.tau + row.forcing_sq;

  row.half_energy = p.rho0 * half_norm_sq(s.u) + p.rho0 * p.kappa * half_norm_sq(s.omega) + half_norm_sq(s.M);
  row.half_dissipation = gradient_norm_sq(lambda_s(s.u, 0.5)) + gradient_norm_sq(lambda_s(s.omega, 0.5)) +
                         half_norm_sq(s.omega) + gradient_norm_sq(lambda_s(s.M, 0.5)) + half_norm_sq(s.M) +
                         half_norm_sq(q_project(s.M));
  row.phi_tau = gradient_norm_sq(lambda_s(gf.g_f, 0.5)) + half_norm_sq(gf.g_f) / p.tau +
                std::sqrt(gradient_norm_sq(s.omega) * gradient_norm_sq(s.u));

  for (int k = 0; k <= 2; ++k) {
    const double s_k = k;
    row.sobolev_f[k] = std::sqrt(inhomogeneous_sq(s.u, s_k) + inhomogeneous_sq(s.omega, s_k) +
                                 inhomogeneous_sq(s.M, s_k) + inhomogeneous_sq(H, s_k));
    row.sobolev_g[k] = std::sqrt(gradient_inhomogeneous_sq(s.u, s_k) + gradient_inhomogeneous_sq(s.omega, s_k) +
                                 gradient_inhomogeneous_sq(s.M, s_k) + gradient_inhomogeneous_sq(H, s_k));
  }

  if (!rows_.empty()) {
    const LedgerRow& prev = rows_.back();
    const double h = s.t - prev.t;
    row.int_dissipation = prev.int_dissipation + 0.5 * h * (prev.dissipation + row.dissipation);
    row.int_half_dissipation = prev.int_half_dissipation + 0.5 * h * (prev.half_dissipation + row.half_dissipation);
    int_forcing_sq_ += 0.5 * h * (prev.forcing_sq + row.forcing_sq);
    int_gf_sq_ += 0.5 * h * (prev.gf_sq + row.gf_sq);
    int_dt_gf_sq_ += 0.5 * h * (prev.dt_gf_sq + row.dt_gf_sq);
  }
  const double e0 = rows_.empty() ? row.energy : rows_.front().energy;
  row.certificate = 0.5 * row.energy + p.c_tilde() * row.int_dissipation;
  row.psi = 0.5 * e0 + std::sqrt(int_forcing_sq_) + std::sqrt(int_gf_sq_) + std::sqrt(int_dt_gf_sq_);

  row.residuals = identity_residuals(s, gf.g_f, p, kmax_);
  const MagnetostaticResidual mr = magnetostatic_residual(H, s.M, f);
  row.magnetostatic_div = mr.divergence;
  row.magnetostatic_curl = mr.curl;

  const IdentityResiduals& r = row.residuals;
  if (std::max({r.max_cancellation(), r.ps_mh, r.half_pairing}) > tol_.identity) row.flags |= kFlagIdentity;
  if (std::max(mr.divergence, mr.curl) > tol_.magnetostatic) row.flags |= kFlagMagnetostatic;
  if (r.zeta_positivity < -tol_.zeta) row.flags |= kFlagZetaPositivity;
  if (forcing_.empty()) {
    if (!rows_.empty() && row.energy > rows_.back().energy * (1.0 + tol_.energy_step)) {
      row.flags |= kFlagEnergyIncrease;
    }
    if (row.certificate > 0.5 * e0 * (1.0 + tol_.certificate)) row.flags |= kFlagCertificate;
  }
  const double finite_check = row.energy + row.dissipation + row.half_energy + row.half_dissipation +
                              row.sobolev_f[2] + row.sobolev_g[2] + r.max_cancellation() + r.ps_mh +
                              r.half_pairing + r.zeta_positivity;
  if (!std::isfinite(finite_check)) row.flags |= kFlagNonFinite;

  rows_.push_back(row);
  return row;
}

LedgerRow audit_step(const State& state, const Forcing& forcing, const Params& params, double kmax,
                     const AuditTolerances& tol) {
  Auditor a(params, forcing, kmax, tol);
  return a.audit(state);
}

// ---------------------------------------------------------------------------

std::string ledger_csv_header() {
  return "step,t,E,E_d,int_E_d,certificate,F_sq,G_F_sq,dt_G_F_sq,f_tau,Psi,"
         "F_half,F_d,int_F_d,Phi_tau,F0,F1,F2,G0,G1,G2,"
         "res_transport_u,res_transport_omega,res_transport_M,res_rotation_M,res_lorentz,res_cross,"
         "res_psMH,res_half_pairing,zeta_positivity,res_magnetostatic_div,res_magnetostatic_curl,flags";
}

void write_ledger_row(std::ostream& os, const LedgerRow& r) {
  const auto old_flags = os.flags();
  const auto old_precision = os.precision();
  os << std::setprecision(17);
  os << r.step << ',' << r.t << ',' << r.energy << ',' << r.dissipation << ',' << r.int_dissipation << ','
     << r.certificate << ',' << r.forcing_sq << ',' << r.gf_sq << ',' << r.dt_gf_sq << ',' << r.f_tau << ','
     << r.psi << ',' << r.half_energy << ',' << r.half_dissipation << ',' << r.int_half_dissipation << ','
     << r.phi_tau;
  for (double v : r.sobolev_f) os << ',' << v;
  for (double v : r.sobolev_g) os << ',' << v;
  const IdentityResiduals& x = r.residuals;
  os << ',' << x.transport_u << ',' << x.transport_omega << ',' << x.transport_M << ',' << x.rotation_M << ','
     << x.lorentz << ',' << x.cross << ',' << x.ps_mh << ',' << x.half_pairing << ',' << x.zeta_positivity << ','
     << r.magnetostatic_div << ',' << r.magnetostatic_curl << ',' << r.flags << '\n';
  os.flags(old_flags);
  os.precision(old_precision);
}

void write_ledger_csv(std::ostream& os, const std::vector<LedgerRow>& rows) {
  os << ledger_csv_header() << '\n';
  for (const auto& r : rows) write_ledger_row(os, r);
}

}  // namespace frsm
