#include "dimer/fokker_planck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "dimer/errors.hpp"
#include "dimer/gutzwiller.hpp"

namespace dimer {

double PdfGrid::mass() const {
  double s = 0.0, d = 0.0;
  for (double v : bulk) s += v;
  for (double v : diagonal) d += v;
  const double h = cell_width();
  return s * h * h + d * h;
}

PdfGrid PdfGrid::pointer_delta(int n) {
  PdfGrid p;
  p.n = n;
  p.bulk.assign(static_cast<std::size_t>(n) * n, 0.0);
  p.diagonal.assign(n, 0.0);
  p.diagonal[n - 1] = 1.0 / p.cell_width();
  return p;
}

PdfGrid PdfGrid::uniform(int n) {
  PdfGrid p;
  p.n = n;
  p.bulk.assign(static_cast<std::size_t>(n) * n, 1.0 / (kTwoPi * kTwoPi));
  p.diagonal.assign(n, 0.0);
  return p;
}

double fp_max_step(int n, const SimParams& params) {
  const double max_speed =
      2.0 * params.omega_s + 0.5 * (params.gamma1 + params.gamma2);
  if (max_speed == 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 * (kTwoPi / n) / max_speed;
}

namespace {

void check_rates(const SimParams& params) {
  if (!(params.gamma1 >= 0.0) || !(params.gamma2 >= 0.0) || !(params.omega_s >= 0.0)) {
    throw ValidationError("fp_step: rates and omega_s must be nonnegative");
  }
}

}  // namespace

FpOperator::FpOperator(const SimParams& params, int n, double dt_fp) : n_(n), dt_(dt_fp) {
  if (n < 2) throw ValidationError("fp_step needs a grid of at least 2x2");
  check_rates(params);
  if (!(dt_fp > 0.0) || dt_fp > fp_max_step(n, params) * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "fp_step: dt_fp = " << dt_fp << " violates the CFL bound "
       << fp_max_step(n, params);
    throw ValidationError(os.str());
  }
  const double h = kTwoPi / n;
  auto face = [h](int i) { return -kPi + (i + 1) * h; };
  auto drift = [&](double a, double b) {
    return drift_from_rates({a, b}, params.gamma1, params.gamma2, params.omega_s);
  };
  const std::size_t cells = static_cast<std::size_t>(n) * n;
  vl_.resize(cells);
  vr_.resize(cells);
  keep_.assign(cells, 1.0);
  frac1_.assign(cells, 0.0);
  frac2_.assign(cells, 0.0);
  std::vector<double> s2(n);
  for (int i = 0; i < n; ++i) {
    const double s = std::sin(0.5 * bin_center(i, n));
    s2[i] = s * s;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::size_t q = static_cast<std::size_t>(i) * n + j;
      vl_[q] = -drift(face(i), bin_center(j, n)).omega_l;
      vr_[q] = -drift(bin_center(i, n), face(j)).omega_r;
      const double c1 = params.gamma1 * s2[i];
      const double c2 = params.gamma1 * s2[j];
      const double rate = c1 + c2 + params.gamma2 * s2[i] * s2[j];
      if (rate <= 0.0) continue;
      keep_[q] = std::exp(-rate * dt_fp);
      frac1_[q] = c1 / rate;
      frac2_[q] = c2 / rate;
    }
  }
  // Diagonal nodes sit at theta_k = -pi + (k + 1) h, so the last one is
  // exactly pi. Both single-click channels have the same share there.
  vd_.resize(n);
  keep_d_.assign(n, 1.0);
  frac_d_.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    vd_[i] = -drift(face(i), face(i)).omega_l;
    const double s = std::sin(0.5 * face(i));
    const double c = params.gamma1 * s * s;
    const double rate = 2.0 * c + params.gamma2 * s * s * s * s;
    if (rate <= 0.0) continue;
    keep_d_[i] = std::exp(-rate * dt_fp);
    frac_d_[i] = c / rate;
  }
  flux_l_.resize(cells);
  flux_r_.resize(cells);
  flux_d_.resize(n);
  to_row_.resize(n);
  to_col_.resize(n);
}

void FpOperator::step(const PdfGrid& p, PdfGrid& out, FpStepReport* report) const {
  const int n = n_;
  if (p.n != n || p.bulk.size() != static_cast<std::size_t>(n) * n ||
      p.diagonal.size() != static_cast<std::size_t>(n)) {
    throw ValidationError("FpOperator: grid size mismatch");
  }
  const double h = kTwoPi / n;
  const double k = dt_ / h;
  auto idx = [n](int i, int j) { return static_cast<std::size_t>(i) * n + j; };

  // (i) conservative upwind advection with velocity -Omega.
  for (int i = 0; i < n; ++i) {
    const int ip = (i + 1) % n;
    for (int j = 0; j < n; ++j) {
      const int jp = (j + 1) % n;
      const std::size_t q = idx(i, j);
      const double vl = vl_[q], vr = vr_[q];
      flux_l_[q] = vl > 0.0 ? vl * p.bulk[q] : vl * p.bulk[idx(ip, j)];
      flux_r_[q] = vr > 0.0 ? vr * p.bulk[q] : vr * p.bulk[idx(i, jp)];
    }
  }
  out.n = n;
  out.time = p.time + dt_;
  out.bulk.resize(p.bulk.size());
  out.diagonal.resize(n);
  std::fill(to_row_.begin(), to_row_.end(), 0.0);
  std::fill(to_col_.begin(), to_col_.end(), 0.0);
  double to_point = 0.0;  // line density added at (pi, pi)
  double removed[3] = {0.0, 0.0, 0.0};

  // (ii) click depletion, collected for (iii). Bulk amounts are densities
  // per h^2, line amounts densities per h.
  for (int i = 0; i < n; ++i) {
    const int im = (i + n - 1) % n;
    for (int j = 0; j < n; ++j) {
      const int jm = (j + n - 1) % n;
      const std::size_t q = idx(i, j);
      const double div = (flux_l_[q] - flux_l_[idx(im, j)]) +
                         (flux_r_[q] - flux_r_[idx(i, jm)]);
      const double v = std::max(0.0, p.bulk[q] - k * div);
      const double kept = v * keep_[q];
      const double lost = v - kept;
      out.bulk[q] = kept;
      const double m1 = lost * frac1_[q], m2 = lost * frac2_[q];
      const double m3 = lost - m1 - m2;
      to_row_[j] += m1;  // left qubit clicks: theta_L -> pi, theta_R kept
      to_col_[i] += m2;  // right qubit clicks: theta_R -> pi, theta_L kept
      removed[0] += m1 * h;
      removed[1] += m2 * h;
      removed[2] += m3 * h;
      to_point += m3 * h;
    }
  }
  // Donor-cell transport between diagonal nodes with the node velocity, so a
  // node where the flow vanishes keeps its mass.
  std::copy(p.diagonal.begin(), p.diagonal.end(), flux_d_.begin());
  for (int i = 0; i < n; ++i) {
    const double moved = std::abs(vd_[i]) * k * p.diagonal[i];
    flux_d_[i] -= moved;
    flux_d_[vd_[i] < 0.0 ? (i + n - 1) % n : (i + 1) % n] += moved;
  }
  for (int i = 0; i < n; ++i) {
    const double v = std::max(0.0, flux_d_[i]);
    const double kept = v * keep_d_[i];
    const double lost = v - kept;
    out.diagonal[i] = kept;
    const double m = lost * frac_d_[i];
    // A single click moves (theta, theta) onto a pointer line, spread over
    // the cell of width h: line density / h becomes bulk density.
    to_row_[i] += m / h;
    to_col_[i] += m / h;
    removed[0] += m;
    removed[1] += m;
    removed[2] += lost - 2.0 * m;
    to_point += lost - 2.0 * m;
  }

  // (iii) deposit.
  for (int j = 0; j < n; ++j) out.bulk[idx(n - 1, j)] += to_row_[j];
  for (int i = 0; i < n; ++i) out.bulk[idx(i, n - 1)] += to_col_[i];
  out.diagonal[n - 1] += to_point;

  if (report != nullptr) {
    FpStepReport rep;
    for (int c = 0; c < 3; ++c) rep.removed[c] = removed[c] * h;
    double dep = 0.0;
    for (int q = 0; q < n; ++q) dep += to_row_[q] + to_col_[q];
    rep.deposited = dep * h * h + to_point * h;
    *report = rep;
  }
}

PdfGrid fp_step(const PdfGrid& p, const SimParams& params, double dt_fp,
                FpStepReport* report) {
  if (p.n < 2) throw ValidationError("fp_step needs a grid of at least 2x2");
  PdfGrid out;
  FpOperator(params, p.n, dt_fp).step(p, out, report);
  return out;
}

FpStationaryResult fp_stationary(const SimParams& params, int n, double t_max,
                                 double tol) {
  if (n < 36) throw ValidationError("fp_stationary needs n >= 36");
  check_rates(params);
  FpStationaryResult res;
  res.grid = PdfGrid::pointer_delta(n);
  const double dt_max = fp_max_step(n, params);
  const double dt_fp = std::isfinite(dt_max) ? dt_max : 0.01;
  const FpOperator full(params, n, dt_fp);
  PdfGrid next;

  while (res.grid.time < t_max) {
    const double step = std::min(dt_fp, t_max - res.grid.time);
    if (step <= 1e-14) break;
    if (step == dt_fp) {
      full.step(res.grid, next);
    } else {
      FpOperator(params, n, step).step(res.grid, next);
    }
    double change = 0.0;
    for (std::size_t q = 0; q < next.bulk.size(); ++q) {
      change = std::max(change, std::abs(next.bulk[q] - res.grid.bulk[q]));
    }
    // Line density compared as the bulk density of its diagonal cell.
    for (int q = 0; q < n; ++q) {
      change = std::max(change, std::abs(next.diagonal[q] - res.grid.diagonal[q]) /
                                    res.grid.cell_width());
    }
    res.last_change_rate = change / step;
    std::swap(res.grid, next);
    ++res.steps;
    res.max_mass_error = std::max(res.max_mass_error, std::abs(res.grid.mass() - 1.0));
    if (res.last_change_rate < tol) {
      res.converged = true;
      res.criterion = "tolerance";
      return res;
    }
  }
  res.criterion = "t_max";
  return res;
}

PdfGrid coarsen(const PdfGrid& p, int n) {
  if (n < 1 || p.n % n != 0) {
    throw ValidationError("coarsen: target size " + std::to_string(n) +
                          " does not divide grid size " + std::to_string(p.n));
  }
  const int f = p.n / n;
  PdfGrid out;
  out.n = n;
  out.time = p.time;
  out.bulk.assign(static_cast<std::size_t>(n) * n, 0.0);
  out.diagonal.assign(n, 0.0);
  const double w = 1.0 / (static_cast<double>(f) * f);
  for (int i = 0; i < p.n; ++i) {
    for (int j = 0; j < p.n; ++j) out.at(i / f, j / f) += w * p.at(i, j);
    out.diagonal[i / f] += p.diagonal[i] / f;
  }
  return out;
}

Density2D to_density(const PdfGrid& p) {
  Density2D d;
  d.n = p.n;
  d.density = p.bulk;
  const double h = p.cell_width();
  for (int i = 0; i < p.n; ++i) d.density[static_cast<std::size_t>(i) * p.n + i] += p.diagonal[i] / h;
  const double m = p.mass();
  if (m > 0.0) {
    for (double& v : d.density) v /= m;
  }
  return d;
}

}  // namespace dimer
