// Magnetostatic solve and right-hand side of the Galerkin-truncated planar
// ferrofluid system. All products are formed on the grid and then cut at
// `kmax`; with kmax no larger than the 2/3 cutoff the truncated products are
// alias-free, so the discrete system is exactly the Galerkin ODE.
#pragma once

#include <stdexcept>
#include <string>

#include "frsm/spectral.hpp"
#include "frsm/state.hpp"

namespace frsm {

class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// H = -Q M + G_F, the solution of div(H + M) = F, curl H = 0.
VecField solve_magnetostatics(const VecField& M, const VecField& g_f);

struct MagnetostaticResidual {
  double divergence = 0.0;  // ||div(H + M) - F|| / (||div M|| + ||F||)
  double curl = 0.0;        // ||curl H|| / ||grad H||
};

MagnetostaticResidual magnetostatic_residual(const VecField& H, const VecField& M, const Field& F);

/// J(u . grad a).
Field transport(const VecField& u, const Field& a, double kmax);
VecField transport(const VecField& u, const VecField& a, double kmax);

/// mu0 J(M . grad H), (M . grad H)_j = sum_i M_i d_i H_j. Not Leray-projected.
VecField lorentz_force(const VecField& M, const VecField& H, double mu0, double kmax);

/// Which linear terms are kept out of the explicit part.
///   diffusion: only the Laplacians.
///   diffusion_and_relaxation: M additionally carries -(1/tau)(M + chi0 Q M),
///     which is diagonal per mode in the (PM, QM) splitting.
enum class LinearSplit { diffusion, diffusion_and_relaxation };

struct Tendency {
  VecField du_linear, du_explicit;
  Field domega_linear, domega_explicit;
  VecField dM_linear, dM_explicit;

  VecField du() const { return du_linear + du_explicit; }
  Field domega() const { return domega_linear + domega_explicit; }
  VecField dM() const { return dM_linear + dM_explicit; }
};

/// Time derivative of (u, omega, M). Throws NonFiniteError on NaN/Inf.
Tendency rhs(const State& state, const Forcing& forcing, const Params& params, double kmax,
             LinearSplit split = LinearSplit::diffusion);

/// Only the explicit part, for the stepper.
struct ExplicitTendency {
  VecField du;
  Field domega;
  VecField dM;
};

ExplicitTendency explicit_tendency(const State& state, const ExternalPotential& gf, const Params& params,
                                   double kmax, LinearSplit split);

/// p = Delta^-1 div(-rho0 J(u . grad u) + mu0 J(M . grad H)), zero mean.
Field recover_pressure(const State& state, const Forcing& forcing, const Params& params, double kmax);

/// Momentum tendency before the Leray projection (pressure gradient omitted).
VecField unprojected_momentum_tendency(const State& state, const Forcing& forcing, const Params& params,
                                       double kmax);

}  // namespace frsm
