#pragma once

#include <cstdint>
#include <utility>

#include "dimer/quantum_core.hpp"
#include "dimer/trajectory.hpp"

namespace dimer {

/// One step of the monitored evolution: phi = U psi, draw the readout r by
/// inverse CDF over r = 0..3 with the uniform `rand`, then return
/// M_r phi / |M_r phi|. Throws NumericError when the chosen outcome has
/// probability below 1e-15.
std::pair<PureState4, int> jump_step(const PureState4& state,
                                     const KrausSet& kraus,
                                     const Operator4& u, double rand);

/// Exact four-amplitude trajectory from |11>. Throws NumericError with the
/// trajectory index attached if a step fails.
TrajectorySample run_exact_trajectory(const SimParams& params,
                                      std::uint64_t traj_index,
                                      const StateObserver* observer = nullptr);

/// |<theta_l, theta_r|psi>|^2 for the product state along the reduced Bloch
/// directions of each site. Throws UndefinedAngleError when a marginal has no
/// y-z Bloch component.
double gutzwiller_fidelity(const PureState4& state);

/// Fills angles, entropy and fidelity of a sample from a final state.
void fill_state_observables(const PureState4& state, TrajectorySample& out);

}  // namespace dimer
