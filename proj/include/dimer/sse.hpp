#pragma once

#include <array>
#include <cstdint>

#include "dimer/params.hpp"
#include "dimer/quantum_core.hpp"
#include "dimer/rng.hpp"
#include "dimer/trajectory.hpp"

namespace dimer {

/// Quantum-state-diffusion unravelling with monitored operators
/// O1 = n_L, O2 = n_R (rate gamma1 each) and O3 = n_L n_R (rate gamma2).
/// Increments satisfy <dW_r dW_r'> = gamma_r dt delta_rr'.
struct SseParams {
  SimParams sim;

  std::array<double, 3> rates() const {
    return {sim.gamma1, sim.gamma1, sim.gamma2};
  }
  void validate() const { sim.validate(); }
};

/// Scales three standard normals into the increments dW_r = sqrt(gamma_r dt) xi_r.
std::array<double, 3> noise_increments(const SseParams& params,
                                       const std::array<double, 3>& noise);

/// Draws three independent standard normals.
std::array<double, 3> draw_standard_normals(TrajectoryRng& rng);

/// Euler-Maruyama step of the stochastic Schrodinger equation followed by
/// explicit renormalization. Throws NumericError if the pre-normalization
/// norm falls below 1e-12.
PureState4 sse_step(const PureState4& state, const SseParams& params,
                    const std::array<double, 3>& noise);

/// SSE trajectory from |11>; readout_counts stay zero for this backend.
TrajectorySample run_sse_trajectory(const SseParams& params,
                                    std::uint64_t traj_index,
                                    const StateObserver* observer = nullptr);

}  // namespace dimer
