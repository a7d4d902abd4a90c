#include "dimer/params.hpp"

#include <cmath>
#include <sstream>

#include "dimer/errors.hpp"

namespace dimer {

std::int64_t SimParams::n_steps() const {
  const double ratio = t_final / dt;
  return static_cast<std::int64_t>(std::ceil(ratio * (1.0 - 1e-12)));
}

void SimParams::validate() const {
  auto fail = [](const std::string& msg) { throw ValidationError(msg); };
  if (!(omega_s > 0.0) || !std::isfinite(omega_s)) {
    fail("omega_s must be positive and finite");
  }
  if (!(gamma1 >= 0.0) || !(gamma2 >= 0.0)) {
    fail("measurement rates gamma1, gamma2 must be nonnegative");
  }
  if (!(dt > 0.0)) fail("dt must be positive");
  if (!(t_final >= 0.0)) fail("t_final must be nonnegative");
  if (dt * omega_s > 1e-2 * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "dt*omega_s = " << dt * omega_s
       << " violates dt << 1/omega_s (must be <= 1e-2); reduce --dt";
    fail(os.str());
  }
  if ((2.0 * gamma1 + gamma2) * dt > 1.0) {
    std::ostringstream os;
    os << "(2*gamma1 + gamma2)*dt = " << (2.0 * gamma1 + gamma2) * dt
       << " exceeds 1; no-click probability would be negative, reduce --dt";
    fail(os.str());
  }
}

SimParams SimParams::from_lambdas(double lambda1, double lambda2,
                                  double omega_s) {
  SimParams p;
  p.omega_s = omega_s;
  p.gamma1 = 4.0 * omega_s * lambda1;
  p.gamma2 = 4.0 * omega_s * lambda2;
  return p;
}

}  // namespace dimer
