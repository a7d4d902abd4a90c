#pragma once

#include <array>
#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include "dimer/angles.hpp"
#include "dimer/gutzwiller.hpp"

namespace dimer {

enum class StabilityClass { Stable, Unstable, Saddle, Marginal };
enum class PhaseLabel { Ergodic, CorrelatedZeno, StandardZeno };

std::string_view to_string(StabilityClass c);
std::string_view to_string(PhaseLabel p);

/// A zero of the no-click flow theta' = -Omega(theta) on the torus, with the
/// eigenvalues of the flow Jacobian -dOmega/dtheta.
struct FixedPoint {
  AngleState theta;
  std::complex<double> eig1;
  std::complex<double> eig2;
  StabilityClass cls = StabilityClass::Marginal;
  double residual = 0.0;
};

/// Velocity field (-Omega_L, -Omega_R) at the cell centres of a uniform
/// n x n grid over (-pi, pi]^2, row-major with the left angle as row index.
struct FlowGrid {
  int n = 0;
  std::vector<AngleState> points;
  std::vector<DriftField> velocity;  // already negated: (-Omega_L, -Omega_R)
};

FlowGrid flow_field(int grid_n, double lambda1, double lambda2,
                    double omega_s = 1.0);

/// Classification from the real parts of the flow-Jacobian eigenvalues.
StabilityClass classify_eigenvalues(std::complex<double> e1,
                                    std::complex<double> e2);

struct FixedPointOptions {
  int scan_n = 144;
  double newton_damping = 0.5;
  int newton_max_iter = 100;
  double residual_tol = 1e-10;
  double dedup_distance = 1e-6;
};

struct FixedPointSearch {
  std::vector<FixedPoint> points;
  /// One line per Newton candidate that was dropped.
  std::vector<std::string> warnings;
};

/// Grid scan for cells where both velocity components change sign, seeded
/// additionally with the diagonal roots, followed by damped Newton
/// refinement, deduplication and classification. Points are sorted by
/// (theta_l, theta_r).
FixedPointSearch find_fixed_points_detailed(double lambda1, double lambda2,
                                            const FixedPointOptions& opts = {});

std::vector<FixedPoint> find_fixed_points(double lambda1, double lambda2,
                                          const FixedPointOptions& opts = {});

struct DiagonalRoots {
  bool exists = false;
  std::vector<double> roots;
};

/// Zeros of g(theta) = 1 + (lambda1 + lambda2 sin^2(theta/2)) sin(theta) on
/// (-pi, pi], including tangential (double) roots.
DiagonalRoots diagonal_root_condition(double lambda1, double lambda2);

/// Ergodic without fixed points, StandardZeno when any is Stable,
/// CorrelatedZeno otherwise. Throws BoundaryIndeterminateError when a fixed
/// point is Marginal.
PhaseLabel classify_phase(double lambda1, double lambda2,
                          const FixedPointOptions& opts = {});

struct PhaseCell {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  int n_fixed = 0;
  int n_stable = 0;
  bool boundary = false;
  PhaseLabel phase = PhaseLabel::Ergodic;
};

/// `count` evenly spaced nodes spanning [lo, hi]; count 1 requires lo == hi.
struct AxisRange {
  double lo = 0.0;
  double hi = 0.0;
  int count = 1;
};

/// Row-major (lambda1 outer) grid of classified cells.
std::vector<PhaseCell> phase_diagram(AxisRange lambda1, AxisRange lambda2,
                                     unsigned threads = 1,
                                     const FixedPointOptions& opts = {});

/// Row-major (lambda1 outer) grid of classified cells. resolution nodes per
/// axis span each closed range; a degenerate range (min == max) with
/// resolution 1 is allowed.
std::vector<PhaseCell> phase_diagram(double l1_min, double l1_max,
                                     double l2_min, double l2_max,
                                     int resolution, unsigned threads = 1,
                                     const FixedPointOptions& opts = {});

/// Bisects the segment from `from` to `to` in (lambda1, lambda2) for the
/// point where the phase label stops being the one at `from` (boundary cells
/// count as changed). The returned point is resolved to `tol` in lambda
/// units. Throws ValidationError if both ends carry the same label.
std::array<double, 2> locate_transition(std::array<double, 2> from, std::array<double, 2> to,
                         double tol, const FixedPointOptions& opts = {});

}  // namespace dimer
