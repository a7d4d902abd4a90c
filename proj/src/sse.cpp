#include "dimer/sse.hpp"

#include <cmath>
#include <random>
#include <string>

#include "dimer/errors.hpp"
#include "dimer/exact_jump.hpp"

namespace dimer {

namespace {

constexpr Complex kMinusI{0.0, -1.0};

// Eigenvalue of O_r on basis state k (all monitored operators are diagonal
// 0/1 projectors).
constexpr double occupation(int r, int k) {
  const int nl = k >> 1, nr = k & 1;
  return r == 0 ? nl : r == 1 ? nr : nl * nr;
}

}  // namespace

std::array<double, 3> noise_increments(const SseParams& params,
                                       const std::array<double, 3>& noise) {
  const auto g = params.rates();
  std::array<double, 3> dw{};
  for (int r = 0; r < 3; ++r) dw[r] = std::sqrt(g[r] * params.sim.dt) * noise[r];
  return dw;
}

std::array<double, 3> draw_standard_normals(TrajectoryRng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  return {normal(rng), normal(rng), normal(rng)};
}

PureState4 sse_step(const PureState4& state, const SseParams& params,
                    const std::array<double, 3>& noise) {
  const double dt = params.sim.dt;
  const double w = params.sim.omega_s;
  const auto g = params.rates();
  const auto dw = noise_increments(params, noise);

  std::array<double, 3> mean{};
  for (int r = 0; r < 3; ++r) {
    for (int k = 0; k < 4; ++k) mean[r] += occupation(r, k) * std::norm(state[k]);
  }

  PureState4 next;
  for (int k = 0; k < 4; ++k) {
    // H psi with H = w (sx_L + sx_R): flip the left bit, flip the right bit.
    const Complex h_psi = w * (state[k ^ 2] + state[k ^ 1]);
    double damping = 0.0;
    double kick = 0.0;
    for (int r = 0; r < 3; ++r) {
      const double delta = occupation(r, k) - mean[r];
      damping += g[r] * delta * delta;
      kick += dw[r] * delta;
    }
    next[k] = state[k] + kMinusI * dt * h_psi +
              (kick - 0.5 * dt * damping) * state[k];
  }

  const double n2 = next.norm_squared();
  if (!(n2 >= 1e-24)) {
    throw NumericError("SSE state norm collapsed below 1e-12");
  }
  const double inv = 1.0 / std::sqrt(n2);
  for (auto& a : next.amplitudes) a *= inv;
  return next;
}

TrajectorySample run_sse_trajectory(const SseParams& params,
                                    std::uint64_t traj_index,
                                    const StateObserver* observer) {
  params.validate();
  auto rng = trajectory_rng(params.sim.master_seed, traj_index);
  PureState4 psi = PureState4::basis(3);
  const std::int64_t steps = params.sim.n_steps();
  const bool observe = observer != nullptr && observer->stride > 0;
  if (observe) observer->on_state(0, 0.0, psi);

  for (std::int64_t s = 0; s < steps; ++s) {
    try {
      psi = sse_step(psi, params, draw_standard_normals(rng));
    } catch (const NumericError& e) {
      throw NumericError("trajectory " + std::to_string(traj_index) +
                         ", step " + std::to_string(s) + ": " + e.what());
    }
    if (observe && (s + 1) % observer->stride == 0) {
      observer->on_state(s + 1, static_cast<double>(s + 1) * params.sim.dt, psi);
    }
  }

  TrajectorySample sample;
  fill_state_observables(psi, sample);
  return sample;
}

}  // namespace dimer
