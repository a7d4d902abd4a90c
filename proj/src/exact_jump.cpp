#include "dimer/exact_jump.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dimer/errors.hpp"
#include "dimer/rng.hpp"

namespace dimer {

namespace {

// Inverse-CDF draw over r = 0, 1, 2, 3.
int select_readout(const std::array<double, 4>& p, double rand) {
  double cumulative = 0.0;
  for (int r = 0; r < 3; ++r) {
    cumulative += p[r];
    if (rand < cumulative) return r;
  }
  return 3;
}

}  // namespace

std::pair<PureState4, int> jump_step(const PureState4& state,
                                     const KrausSet& kraus,
                                     const Operator4& u, double rand) {
  const PureState4 phi = u * state;

  std::array<double, 4> weight{};
  for (int k = 0; k < 4; ++k) weight[k] = std::norm(phi[k]);
  std::array<double, 4> p{};
  for (int r = 0; r < 4; ++r) {
    double acc = 0.0;
    for (int k = 0; k < 4; ++k) acc += kraus.diag[r][k] * kraus.diag[r][k] * weight[k];
    p[r] = acc;
  }

  const int r = select_readout(p, rand);
  if (p[r] < 1e-15) {
    throw NumericError("selected readout r=" + std::to_string(r) +
                       " has probability below 1e-15; cannot normalize");
  }

  PureState4 out;
  double n2 = 0.0;
  for (int k = 0; k < 4; ++k) {
    out[k] = kraus.diag[r][k] * phi[k];
    n2 += std::norm(out[k]);
  }
  const double inv = 1.0 / std::sqrt(n2);
  for (auto& a : out.amplitudes) a *= inv;
  return {out, r};
}

double gutzwiller_fidelity(const PureState4& state) {
  const AngleState angles{bloch_angle(reduced_bloch(state, Site::Left)),
                          bloch_angle(reduced_bloch(state, Site::Right))};
  const double f = std::norm(inner(PureState4::product(angles), state));
  return std::clamp(f, 0.0, 1.0);
}

void fill_state_observables(const PureState4& state, TrajectorySample& out) {
  out.entropy = entanglement_entropy(state);
  try {
    out.angles = {bloch_angle(reduced_bloch(state, Site::Left)),
                  bloch_angle(reduced_bloch(state, Site::Right))};
    out.fidelity =
        std::clamp(std::norm(inner(PureState4::product(out.angles), state)),
                   0.0, 1.0);
    out.angles_defined = true;
  } catch (const UndefinedAngleError&) {
    out.angles = {};
    out.fidelity = 0.0;
    out.angles_defined = false;
  }
}

TrajectorySample run_exact_trajectory(const SimParams& params,
                                      std::uint64_t traj_index,
                                      const StateObserver* observer) {
  params.validate();
  const KrausSet kraus = build_kraus(params.gamma1, params.gamma2, params.dt);
  const Operator4 u = propagator(params.omega_s, params.dt);
  auto rng = trajectory_rng(params.master_seed, traj_index);

  TrajectorySample sample;
  PureState4 psi = PureState4::basis(3);
  const std::int64_t steps = params.n_steps();
  const bool observe = observer != nullptr && observer->stride > 0;
  if (observe) observer->on_state(0, 0.0, psi);

  for (std::int64_t s = 0; s < steps; ++s) {
    int r = 0;
    try {
      std::tie(psi, r) = jump_step(psi, kraus, u, uniform01(rng));
    } catch (const NumericError& e) {
      throw NumericError("trajectory " + std::to_string(traj_index) +
                         ", step " + std::to_string(s) + ": " + e.what());
    }
    ++sample.readout_counts[r];
    if (observe && (s + 1) % observer->stride == 0) {
      observer->on_state(s + 1, static_cast<double>(s + 1) * params.dt, psi);
    }
  }

  fill_state_observables(psi, sample);
  return sample;
}

}  // namespace dimer
