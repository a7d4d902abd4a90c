#include "dimer/gutzwiller.hpp"

#include <cmath>

#include "dimer/errors.hpp"
#include "dimer/rng.hpp"

namespace dimer {

namespace {

// Rates pre-multiplied by dt for the trajectory loop.
struct StepConstants {
  double g1dt;
  double g2dt;
  double half_g1;
  double half_g2;
  double two_omega;
  double dt;

  explicit StepConstants(const SimParams& p)
      : g1dt(p.gamma1 * p.dt),
        g2dt(p.gamma2 * p.dt),
        half_g1(0.5 * p.gamma1),
        half_g2(0.5 * p.gamma2),
        two_omega(2.0 * p.omega_s),
        dt(p.dt) {}
};

inline std::pair<AngleState, int> step_kernel(AngleState th,
                                              const StepConstants& c,
                                              double rand) {
  const double sin_l = std::sin(th.theta_l);
  const double cos_l = std::cos(th.theta_l);
  const double sin_r = std::sin(th.theta_r);
  const double cos_r = std::cos(th.theta_r);
  // sin^2(theta/2) = (1 - cos theta)/2
  const double sl2 = 0.5 * (1.0 - cos_l);
  const double sr2 = 0.5 * (1.0 - cos_r);

  const double p1 = c.g1dt * sl2;
  const double p2 = c.g1dt * sr2;
  const double p3 = c.g2dt * sl2 * sr2;
  const double p0 = 1.0 - (p1 + p2 + p3);

  if (rand < p0) {
    const double om_l = c.two_omega + (c.half_g1 + c.half_g2 * sr2) * sin_l;
    const double om_r = c.two_omega + (c.half_g1 + c.half_g2 * sl2) * sin_r;
    return {{wrap_angle(th.theta_l - om_l * c.dt),
             wrap_angle(th.theta_r - om_r * c.dt)},
            0};
  }
  if (rand < p0 + p1) return {{kPi, th.theta_r}, 1};
  if (rand < p0 + p1 + p2) return {{th.theta_l, kPi}, 2};
  return {{kPi, kPi}, 3};
}

}  // namespace

DriftField drift_from_rates(AngleState theta, double gamma1, double gamma2,
                            double omega_s) {
  const double sl2 = std::pow(std::sin(0.5 * theta.theta_l), 2);
  const double sr2 = std::pow(std::sin(0.5 * theta.theta_r), 2);
  return {2.0 * omega_s + 0.5 * (gamma1 + gamma2 * sr2) * std::sin(theta.theta_l),
          2.0 * omega_s + 0.5 * (gamma1 + gamma2 * sl2) * std::sin(theta.theta_r)};
}

DriftField drift(AngleState theta, double lambda1, double lambda2,
                 double omega_s) {
  auto omega_l = [&](double a, double b) {
    const double sb = std::sin(0.5 * b);
    return 2.0 * omega_s * (1.0 + (lambda1 + lambda2 * sb * sb) * std::sin(a));
  };
  return {omega_l(theta.theta_l, theta.theta_r),
          omega_l(theta.theta_r, theta.theta_l)};
}

std::array<double, 4> drift_jacobian(AngleState theta, double lambda1,
                                     double lambda2, double omega_s) {
  // d/da Omega_L(a, b) = 2 w (l1 + l2 sin^2(b/2)) cos a
  // d/db Omega_L(a, b) = 2 w l2 sin(b/2) cos(b/2) sin a = w l2 sin b sin a
  auto d_first = [&](double a, double b) {
    const double sb = std::sin(0.5 * b);
    return 2.0 * omega_s * (lambda1 + lambda2 * sb * sb) * std::cos(a);
  };
  auto d_second = [&](double a, double b) {
    return omega_s * lambda2 * std::sin(b) * std::sin(a);
  };
  const double l = theta.theta_l, r = theta.theta_r;
  return {d_first(l, r), d_second(l, r), d_second(r, l), d_first(r, l)};
}

std::array<double, 4> gw_readout_probs(AngleState theta, double gamma1,
                                       double gamma2, double dt) {
  const double sl2 = std::pow(std::sin(0.5 * theta.theta_l), 2);
  const double sr2 = std::pow(std::sin(0.5 * theta.theta_r), 2);
  const double p1 = gamma1 * dt * sl2;
  const double p2 = gamma1 * dt * sr2;
  const double p3 = gamma2 * dt * sl2 * sr2;
  const double p0 = 1.0 - (p1 + p2 + p3);
  if (p0 < 0.0) {
    throw ValidationError("no-click probability is negative; dt too large");
  }
  return {p0, p1, p2, p3};
}

std::pair<AngleState, int> gw_step(AngleState theta, const SimParams& params,
                                   double rand) {
  return step_kernel(theta, StepConstants(params), rand);
}

namespace {

// cos/sin of a small rotation angle by Taylor series; |x| <= 0.1 gives
// errors below 1e-17 with these orders.
inline void small_rotation(double x, double& c, double& s) {
  const double x2 = x * x;
  c = 1.0 + x2 * (-1.0 / 2 + x2 * (1.0 / 24 + x2 * (-1.0 / 720 +
                  x2 * (1.0 / 40320 - x2 / 3628800.0))));
  s = x * (1.0 + x2 * (-1.0 / 6 + x2 * (1.0 / 120 + x2 * (-1.0 / 5040 +
                  x2 * (1.0 / 362880 - x2 / 39916800.0)))));
}

// Unit vector (cos theta, sin theta) of one Gutzwiller angle.
struct Phasor {
  double c;
  double s;

  void rotate_by(double minus_angle) {
    double cr, sr;
    if (std::abs(minus_angle) <= 0.1) {
      small_rotation(minus_angle, cr, sr);
    } else {
      cr = std::cos(minus_angle);
      sr = std::sin(minus_angle);
    }
    const double nc = c * cr - s * sr;
    const double ns = s * cr + c * sr;
    // One Newton step towards unit length keeps rounding from accumulating.
    const double fix = 0.5 * (3.0 - (nc * nc + ns * ns));
    c = nc * fix;
    s = ns * fix;
  }
  double angle() const { return wrap_angle(std::atan2(s, c)); }
};

constexpr Phasor kPointer{-1.0, 0.0};

}  // namespace

TrajectorySample run_gw_trajectory(const SimParams& params,
                                   std::uint64_t traj_index) {
  params.validate();
  const StepConstants c(params);
  auto rng = trajectory_rng(params.master_seed, traj_index);

  // Same update as iterating gw_step, with each angle carried as a unit
  // vector so a no-click step costs a small rotation instead of trig calls.
  TrajectorySample sample;
  Phasor l = kPointer, r = kPointer;
  bool l_at_pointer = true, r_at_pointer = true;
  const std::int64_t steps = params.n_steps();
  for (std::int64_t s = 0; s < steps; ++s) {
    const double sl2 = 0.5 * (1.0 - l.c);
    const double sr2 = 0.5 * (1.0 - r.c);
    const double p1 = c.g1dt * sl2;
    const double p2 = c.g1dt * sr2;
    const double p3 = c.g2dt * sl2 * sr2;
    const double p0 = 1.0 - (p1 + p2 + p3);
    const double u = uniform01(rng);
    if (u < p0) {
      const double om_l = c.two_omega + (c.half_g1 + c.half_g2 * sr2) * l.s;
      const double om_r = c.two_omega + (c.half_g1 + c.half_g2 * sl2) * r.s;
      l.rotate_by(-om_l * c.dt);
      r.rotate_by(-om_r * c.dt);
      l_at_pointer = r_at_pointer = false;
      ++sample.readout_counts[0];
    } else if (u < p0 + p1) {
      l = kPointer;
      l_at_pointer = true;
      ++sample.readout_counts[1];
    } else if (u < p0 + p1 + p2) {
      r = kPointer;
      r_at_pointer = true;
      ++sample.readout_counts[2];
    } else {
      l = r = kPointer;
      l_at_pointer = r_at_pointer = true;
      ++sample.readout_counts[3];
    }
  }
  sample.angles = {l_at_pointer ? kPi : l.angle(),
                   r_at_pointer ? kPi : r.angle()};
  sample.entropy = 0.0;
  sample.fidelity = 1.0;
  return sample;
}

AngleState meanfield_ode_check(AngleState theta0, const SimParams& params,
                               double t) {
  if (!(t >= 0.0)) throw ValidationError("integration time must be >= 0");
  const auto n = static_cast<std::int64_t>(std::ceil(t / params.dt - 1e-9));
  if (n == 0) return wrapped(theta0);
  const double h = t / static_cast<double>(n);

  auto rhs = [&](double l, double r) {
    const DriftField f = drift_from_rates({l, r}, params.gamma1, params.gamma2,
                                          params.omega_s);
    return std::array<double, 2>{-f.omega_l, -f.omega_r};
  };

  double l = theta0.theta_l, r = theta0.theta_r;
  for (std::int64_t s = 0; s < n; ++s) {
    const auto k1 = rhs(l, r);
    const auto k2 = rhs(l + 0.5 * h * k1[0], r + 0.5 * h * k1[1]);
    const auto k3 = rhs(l + 0.5 * h * k2[0], r + 0.5 * h * k2[1]);
    const auto k4 = rhs(l + h * k3[0], r + h * k3[1]);
    l += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    r += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
  }
  return {wrap_angle(l), wrap_angle(r)};
}

}  // namespace dimer
