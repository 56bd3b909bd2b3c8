// Energy functionals, identity audits and the per-step ledger.
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "frsm/spectral.hpp"
#include "frsm/state.hpp"

namespace frsm {

/// Homogeneous ||Lambda^s f|| (mean excluded for s != 0) or inhomogeneous
/// (sum_k (1 + |k|)^{2s} |f_k|^2)^{1/2}, both as integrals over the box.
template <typename Scalar>
Scalar sobolev_norm(const SpectralField<Scalar>& f, Scalar s, bool homogeneous) {
  const auto& kabs = f.grid().kabs();
  const auto a2 = f.coeffs().abs2();
  Scalar sum(0);
  if (homogeneous) {
    if (s == Scalar(0)) return norm(f);
    for (Eigen::Index j = 0; j < a2.cols(); ++j) {
      for (Eigen::Index i = 0; i < a2.rows(); ++i) {
        if (kabs(i, j) > Scalar(0)) sum += std::pow(kabs(i, j), Scalar(2) * s) * a2(i, j);
      }
    }
  } else {
    sum = ((Scalar(1) + kabs).pow(Scalar(2) * s) * a2).sum();
  }
  return std::sqrt(f.grid().area() * sum);
}

template <typename Scalar>
Scalar sobolev_norm(const VectorField<Scalar>& v, Scalar s, bool homogeneous) {
  return std::hypot(sobolev_norm(v[0], s, homogeneous), sobolev_norm(v[1], s, homogeneous));
}

/// ||grad v||^2 = sum_ij ||d_i v_j||^2.
double gradient_norm_sq(const Field& f);
double gradient_norm_sq(const VecField& v);

/// Relative residuals of the exact cancellations of the L2 energy law.
/// Each is |identity| divided by the Hoelder bound of its terms.
struct IdentityResiduals {
  double transport_u = 0.0;      // <u.grad u, u>
  double transport_omega = 0.0;  // <u.grad omega, omega>
  double transport_M = 0.0;      // <u.grad M, M>
  double rotation_M = 0.0;       // <(-M2, M1) omega, M>
  double lorentz = 0.0;          // <M.grad H, u> + <u.grad M, H>
  double cross = 0.0;            // <M x H, omega> - <(-M2, M1) omega, H>
  double ps_mh = 0.0;            // -<M, H> - ||H||^2 + <G_F, H>
  double half_pairing = 0.0;     // <L^1/2 H, L^1/2 M> + ||L^1/2 QM||^2 - <L^1/2 G_F, L^1/2 M>
  double zeta_positivity = 0.0;  // zeta ||grad u||^2 + 4 zeta ||omega||^2 - 2 zeta <curl u, omega> (absolute)

  double max_cancellation() const;
};

IdentityResiduals identity_residuals(const State& s, const VecField& g_f, const Params& p, double kmax);

/// |<L^1/2 (M.grad H), L^1/2 u>| / (||grad u|| ||L^1/2 M|| (||grad L^1/2 M|| + ||grad L^1/2 G_F||)).
double lorentz_bound_ratio(const VecField& u, const VecField& M, const VecField& g_f, double kmax);

enum LedgerFlag : std::uint32_t {
  kFlagIdentity = 1u << 0,
  kFlagMagnetostatic = 1u << 1,
  kFlagZetaPositivity = 1u << 2,
  kFlagEnergyIncrease = 1u << 3,
  kFlagCertificate = 1u << 4,
  kFlagNonFinite = 1u << 5,
};

struct AuditTolerances {
  double identity = 1e-10;
  double magnetostatic = 1e-10;
  double zeta = 1e-12;
  double energy_step = 1e-8;
  double certificate = 1e-6;
};

/// One audit sample. Constants C left unspecified by the estimates are set to 1.
struct LedgerRow {
  std::int64_t step = 0;
  double t = 0.0;
  double energy = 0.0;          // E = rho0|u|^2 + mu0|H|^2 + rho0 kappa|omega|^2 + |M|^2
  double dissipation = 0.0;     // E_d
  double int_dissipation = 0.0; // trapezoid integral of E_d
  double certificate = 0.0;     // E/2 + c_tilde * int E_d
  double forcing_sq = 0.0;      // |F|^2
  double gf_sq = 0.0;           // |G_F|^2
  double dt_gf_sq = 0.0;        // |dt G_F|^2
  double f_tau = 0.0;           // |G_F|^2 / tau + |F|^2
  double psi = 0.0;             // E(0)/2 + |F|_{L2L2} + |G_F|_{L2L2} + |dt G_F|_{L2L2}
  double half_energy = 0.0;     // Lambda^1/2 functional F
  double half_dissipation = 0.0;// F_d
  double int_half_dissipation = 0.0;
  double phi_tau = 0.0;
  double sobolev_f[3] = {0.0, 0.0, 0.0};  // |U|_{H^k}, k = 0, 1, 2
  double sobolev_g[3] = {0.0, 0.0, 0.0};  // |grad U|_{H^k}
  IdentityResiduals residuals;
  double magnetostatic_div = 0.0;
  double magnetostatic_curl = 0.0;
  std::uint32_t flags = 0;
};

/// Evaluates every functional on a state and keeps the running time integrals.
class Auditor {
 public:
  Auditor(Params params, Forcing forcing, double kmax, AuditTolerances tol = {});

  LedgerRow audit(const State& state, std::int64_t step = 0);
  const std::vector<LedgerRow>& rows() const { return rows_; }
  const AuditTolerances& tolerances() const { return tol_; }

 private:
  Params params_;
  Forcing forcing_;
  double kmax_;
  AuditTolerances tol_;
  std::vector<LedgerRow> rows_;
  double int_forcing_sq_ = 0.0;
  double int_gf_sq_ = 0.0;
  double int_dt_gf_sq_ = 0.0;
};

/// Single-state audit (no history): integrals are zero.
LedgerRow audit_step(const State& state, const Forcing& forcing, const Params& params, double kmax,
                     const AuditTolerances& tol = {});

/// CSV ledger, fixed column order per format version.
std::string ledger_csv_header();
void write_ledger_row(std::ostream& os, const LedgerRow& row);
void write_ledger_csv(std::ostream& os, const std::vector<LedgerRow>& rows);

}  // namespace frsm
