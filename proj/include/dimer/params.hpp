#pragma once

#include <cstdint>

namespace dimer {

/// Physical and numerical parameters of a monitored-dimer run. Times are in
/// units of 1/omega_s, rates in units of omega_s.
struct SimParams {
  double omega_s = 1.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double dt = 1e-3;
  double t_final = 20.0;
  std::uint64_t n_traj = 1000;
  std::uint64_t master_seed = 0;

  /// Effective adimensional measurement strengths gamma/(4 omega_s).
  double lambda1() const { return gamma1 / (4.0 * omega_s); }
  double lambda2() const { return gamma2 / (4.0 * omega_s); }

  /// ceil(t_final/dt), tolerant to representation error in the ratio.
  std::int64_t n_steps() const;

  /// Throws ValidationError naming the violated constraint.
  void validate() const;

  bool operator==(const SimParams&) const = default;

  static SimParams from_lambdas(double lambda1, double lambda2,
                                double omega_s = 1.0);
};

}  // namespace dimer
