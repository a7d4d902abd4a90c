#pragma once

#include <cmath>
#include <numbers>

namespace dimer {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Maps an angle onto the canonical interval (-pi, pi]. Both -pi and pi map
/// to +pi.
inline double wrap_angle(double theta) {
  if (theta > -kPi && theta <= kPi) return theta;
  double r = std::remainder(theta, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

/// Shortest separation between two angles on the circle, in [0, pi].
inline double angular_distance(double a, double b) {
  return std::abs(std::remainder(a - b, kTwoPi));
}

/// Gutzwiller coordinates of the dimer: one Bloch angle per qubit, each in
/// (-pi, pi]. The pointer state |1>|1> sits at (pi, pi).
struct AngleState {
  double theta_l = kPi;
  double theta_r = kPi;

  friend bool operator==(const AngleState&, const AngleState&) = default;
};

inline AngleState wrapped(AngleState a) {
  return {wrap_angle(a.theta_l), wrap_angle(a.theta_r)};
}

inline AngleState swapped(AngleState a) { return {a.theta_r, a.theta_l}; }

enum class Site { Left, Right };

}  // namespace dimer
