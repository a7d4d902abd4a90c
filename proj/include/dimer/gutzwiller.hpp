#pragma once

#include <array>
#include <cstdint>
#include <utility>

#include "dimer/angles.hpp"
#include "dimer/params.hpp"
#include "dimer/trajectory.hpp"

namespace dimer {

/// Angular velocities of the no-click Gutzwiller flow. Angles advance as
/// theta -> theta - Omega dt.
struct DriftField {
  double omega_l = 0.0;
  double omega_r = 0.0;
};

/// Omega_L = 2 omega_s [1 + (lambda1 + lambda2 sin^2(theta_R/2)) sin theta_L],
/// Omega_R obtained by exchanging the arguments.
DriftField drift(AngleState theta, double lambda1, double lambda2,
                 double omega_s = 1.0);

/// Same field written in terms of the rates, valid also for omega_s = 0:
/// Omega_L = 2 omega_s + (gamma1 + gamma2 sin^2(theta_R/2)) sin(theta_L) / 2.
DriftField drift_from_rates(AngleState theta, double gamma1, double gamma2,
                            double omega_s);

/// d(Omega_L, Omega_R)/d(theta_L, theta_R), row-major.
std::array<double, 4> drift_jacobian(AngleState theta, double lambda1,
                                     double lambda2, double omega_s = 1.0);

/// Readout probabilities of a product state within the Gutzwiller ansatz.
/// Throws ValidationError when p0 would be negative.
std::array<double, 4> gw_readout_probs(AngleState theta, double gamma1,
                                       double gamma2, double dt);

/// One stochastic Gutzwiller step. r = 0 drifts both angles by -Omega dt
/// (then wraps); r = 1, 2 send the clicked angle to pi and leave the partner
/// untouched; r = 3 sends both to pi.
std::pair<AngleState, int> gw_step(AngleState theta, const SimParams& params,
                                   double rand);

/// Gutzwiller trajectory from (pi, pi). Entropy is 0 and fidelity 1 by
/// construction.
TrajectorySample run_gw_trajectory(const SimParams& params,
                                   std::uint64_t traj_index);

/// RK4 integration of the no-click mean-field flow theta' = -Omega(theta)
/// up to time t, using steps no longer than params.dt.
AngleState meanfield_ode_check(AngleState theta0, const SimParams& params,
                               double t);

}  // namespace dimer
