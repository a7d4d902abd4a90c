#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dimer/angles.hpp"
#include "dimer/observables.hpp"
#include "dimer/params.hpp"

namespace dimer {

/// Probability density of the Gutzwiller angles on an n x n periodic grid
/// (row-major, left angle as row index), h = 2 pi / n.
///
/// The flow maps the line theta_L = theta_R onto itself, and joint clicks
/// land on it, so part of the mass lives exactly on that line. It is kept as
/// a separate line density `diagonal` (per unit theta, n cells) instead of
/// letting crosswind numerical diffusion smear it into the bulk. Line node k
/// sits at theta = -pi + (k + 1) h and is reported in bin (k, k).
/// Total mass is sum(bulk) h^2 + sum(diagonal) h.
struct PdfGrid {
  int n = 0;
  std::vector<double> bulk;
  std::vector<double> diagonal;
  double time = 0.0;

  double cell_width() const { return kTwoPi / n; }
  double mass() const;
  double& at(int i, int j) { return bulk[static_cast<std::size_t>(i) * n + j]; }
  double at(int i, int j) const { return bulk[static_cast<std::size_t>(i) * n + j]; }

  /// All mass at (pi, pi), held on the diagonal line.
  static PdfGrid pointer_delta(int n);
  static PdfGrid uniform(int n);
};

struct FpStepReport {
  /// Mass removed by click depletion, per channel (1: left, 2: right,
  /// 3: joint), and the total re-deposited onto the pointer lines.
  double removed[3] = {0.0, 0.0, 0.0};
  double deposited = 0.0;
};

/// Largest stable step 0.5 h / max|Omega| for these rates.
double fp_max_step(int n, const SimParams& params);

/// One operator-split step: upwind advection with velocity -Omega, then
/// exponential click depletion, then re-deposit of the removed mass on the
/// theta_L = pi row (channel 1), the theta_R = pi column (channel 2) and the
/// (pi, pi) point of the diagonal line (channel 3). Throws ValidationError
/// on a CFL violation.
PdfGrid fp_step(const PdfGrid& p, const SimParams& params, double dt_fp,
                FpStepReport* report = nullptr);

/// fp_step with the time-independent face velocities and per-cell decay
/// factors computed once. Repeated steps reuse them.
class FpOperator {
 public:
  FpOperator(const SimParams& params, int n, double dt_fp);

  int n() const { return n_; }
  double dt() const { return dt_; }
  /// Writes the advanced grid into `out` (resized as needed).
  void step(const PdfGrid& in, PdfGrid& out, FpStepReport* report = nullptr) const;

 private:
  int n_;
  double dt_;
  // Face velocities at the upper face of each cell, decay factors
  // exp(-rate dt) and the channel 1 and 2 shares of the removed mass.
  std::vector<double> vl_, vr_, keep_, frac1_, frac2_;
  std::vector<double> vd_, keep_d_, frac_d_;  // same at the diagonal nodes
  mutable std::vector<double> flux_l_, flux_r_, flux_d_, to_row_, to_col_;
};

struct FpStationaryResult {
  PdfGrid grid;
  bool converged = false;
  /// "tolerance" when the change rate fell below tol, "t_max" otherwise.
  std::string criterion;
  double last_change_rate = 0.0;
  /// Largest |mass - 1| observed over the whole integration.
  double max_mass_error = 0.0;
  std::int64_t steps = 0;
};

/// Evolves the pointer delta until max |dP/dt| < tol or t_max is reached.
FpStationaryResult fp_stationary(const SimParams& params, int n, double t_max,
                                 double tol);

/// Averages f x f blocks of cells (f = p.n / n) so the result lives on an
/// n x n grid with the same mass. Throws unless n divides p.n.
PdfGrid coarsen(const PdfGrid& p, int n);

/// The grid as a normalized density for comparison with histograms. The
/// diagonal line is folded into the (i, i) cells.
Density2D to_density(const PdfGrid& p);

}  // namespace dimer
