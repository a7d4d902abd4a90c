#include "dimer/noclick_flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dimer/errors.hpp"
#include "dimer/parallel.hpp"

namespace dimer {

std::string_view to_string(StabilityClass c) {
  switch (c) {
    case StabilityClass::Stable: return "stable";
    case StabilityClass::Unstable: return "unstable";
    case StabilityClass::Saddle: return "saddle";
    case StabilityClass::Marginal: return "marginal";
  }
  return "marginal";
}

std::string_view to_string(PhaseLabel p) {
  switch (p) {
    case PhaseLabel::Ergodic: return "ergodic";
    case PhaseLabel::CorrelatedZeno: return "correlated_zeno";
    case PhaseLabel::StandardZeno: return "standard_zeno";
  }
  return "ergodic";
}

namespace {

double residual_of(const DriftField& f) {
  return std::max(std::abs(f.omega_l), std::abs(f.omega_r));
}

double torus_distance(AngleState a, AngleState b) {
  return std::max(angular_distance(a.theta_l, b.theta_l),
                  angular_distance(a.theta_r, b.theta_r));
}

double diagonal_g(double theta, double lambda1, double lambda2) {
  const double s = std::sin(0.5 * theta);
  return 1.0 + (lambda1 + lambda2 * s * s) * std::sin(theta);
}

struct NewtonResult {
  AngleState theta;
  double residual;
};

NewtonResult refine(AngleState x, double lambda1, double lambda2,
                    const FixedPointOptions& opts) {
  DriftField f = drift(x, lambda1, lambda2);
  double res = residual_of(f);
  for (int it = 0; it < opts.newton_max_iter; ++it) {
    if (res <= 1e-3 * opts.residual_tol) break;
    const auto j = drift_jacobian(x, lambda1, lambda2);
    const double det = j[0] * j[3] - j[1] * j[2];
    if (det == 0.0 || !std::isfinite(det)) break;
    const double dl = -(j[3] * f.omega_l - j[1] * f.omega_r) / det;
    const double dr = -(-j[2] * f.omega_l + j[0] * f.omega_r) / det;

    // Backtracking: halve the step (damping factor) until the residual drops.
    double step = 1.0;
    bool accepted = false;
    for (int k = 0; k < 60; ++k) {
      const AngleState trial =
          wrapped({x.theta_l + step * dl, x.theta_r + step * dr});
      const DriftField ft = drift(trial, lambda1, lambda2);
      const double rt = residual_of(ft);
      if (rt < res) {
        x = trial;
        f = ft;
        res = rt;
        accepted = true;
        break;
      }
      step *= opts.newton_damping;
    }
    if (!accepted) break;
  }
  return {x, res};
}

FixedPoint make_fixed_point(AngleState x, double residual, double lambda1,
                            double lambda2) {
  // Flow Jacobian is -dOmega/dtheta.
  const auto j = drift_jacobian(x, lambda1, lambda2);
  const double a = -j[0], b = -j[1], c = -j[2], d = -j[3];
  const double half_tr = 0.5 * (a + d);
  const double det = a * d - b * c;
  const std::complex<double> disc =
      std::sqrt(std::complex<double>(half_tr * half_tr - det, 0.0));
  FixedPoint fp;
  fp.theta = x;
  fp.eig1 = half_tr + disc;
  fp.eig2 = half_tr - disc;
  fp.cls = classify_eigenvalues(fp.eig1, fp.eig2);
  fp.residual = residual;
  return fp;
}

double golden_min(double a, double b, double lambda1, double lambda2) {
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = diagonal_g(c, lambda1, lambda2), fd = diagonal_g(d, lambda1, lambda2);
  while (b - a > 1e-12) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = diagonal_g(c, lambda1, lambda2);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = diagonal_g(d, lambda1, lambda2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

FlowGrid flow_field(int grid_n, double lambda1, double lambda2,
                    double omega_s) {
  if (grid_n < 8) throw ValidationError("flow_field needs grid_n >= 8");
  FlowGrid g;
  g.n = grid_n;
  const double h = kTwoPi / grid_n;
  g.points.reserve(static_cast<std::size_t>(grid_n) * grid_n);
  g.velocity.reserve(g.points.capacity());
  for (int i = 0; i < grid_n; ++i) {
    for (int j = 0; j < grid_n; ++j) {
      const AngleState p{-kPi + (i + 0.5) * h, -kPi + (j + 0.5) * h};
      const DriftField f = drift(p, lambda1, lambda2, omega_s);
      g.points.push_back(p);
      g.velocity.push_back({-f.omega_l, -f.omega_r});
    }
  }
  return g;
}

StabilityClass classify_eigenvalues(std::complex<double> e1,
                                    std::complex<double> e2) {
  const double r1 = e1.real(), r2 = e2.real();
  if (std::abs(r1) < 1e-8 || std::abs(r2) < 1e-8) return StabilityClass::Marginal;
  if (r1 < 0 && r2 < 0) return StabilityClass::Stable;
  if (r1 > 0 && r2 > 0) return StabilityClass::Unstable;
  return StabilityClass::Saddle;
}

DiagonalRoots diagonal_root_condition(double lambda1, double lambda2) {
  constexpr int kSamples = 4096;
  const double h = kTwoPi / kSamples;
  std::vector<double> theta(kSamples + 1), g(kSamples + 1);
  for (int k = 0; k <= kSamples; ++k) {
    theta[k] = -kPi + k * h;
    g[k] = diagonal_g(theta[k], lambda1, lambda2);
  }

  DiagonalRoots out;
  auto add_root = [&](double r) {
    r = wrap_angle(r);
    for (double existing : out.roots)
      if (angular_distance(existing, r) < 1e-9) return;
    out.roots.push_back(r);
  };

  for (int k = 0; k < kSamples; ++k) {
    if (g[k] == 0.0) {
      add_root(theta[k]);
      continue;
    }
    if ((g[k] < 0.0) != (g[k + 1] < 0.0) && g[k + 1] != 0.0) {
      double lo = theta[k], hi = theta[k + 1];
      const bool lo_negative = g[k] < 0.0;
      while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if ((diagonal_g(mid, lambda1, lambda2) < 0.0) == lo_negative) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      add_root(0.5 * (lo + hi));
    }
  }

  // Tangential roots: positive local minima that touch zero.
  for (int k = 1; k < kSamples; ++k) {
    if (g[k] > 0.0 && g[k] <= g[k - 1] && g[k] <= g[k + 1] && g[k] < 1e-2) {
      const double t = golden_min(theta[k - 1], theta[k + 1], lambda1, lambda2);
      if (diagonal_g(t, lambda1, lambda2) <= 1e-12) add_root(t);
    }
  }

  std::sort(out.roots.begin(), out.roots.end());
  out.exists = !out.roots.empty();
  return out;
}

FixedPointSearch find_fixed_points_detailed(double lambda1, double lambda2,
                                            const FixedPointOptions& opts) {
  const int n = opts.scan_n;
  if (n < 8) throw ValidationError("fixed-point scan grid must be >= 8");
  const double h = kTwoPi / n;

  std::vector<DriftField> node(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      node[static_cast<std::size_t>(i) * n + j] =
          drift({-kPi + i * h, -kPi + j * h}, lambda1, lambda2);

  std::vector<AngleState> seeds;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int i1 = (i + 1) % n, j1 = (j + 1) % n;
      const DriftField c[4] = {node[static_cast<std::size_t>(i) * n + j],
                               node[static_cast<std::size_t>(i1) * n + j],
                               node[static_cast<std::size_t>(i) * n + j1],
                               node[static_cast<std::size_t>(i1) * n + j1]};
      bool l_pos = false, l_neg = false, r_pos = false, r_neg = false;
      for (const auto& f : c) {
        (f.omega_l >= 0 ? l_pos : l_neg) = true;
        (f.omega_r >= 0 ? r_pos : r_neg) = true;
      }
      if (l_pos && l_neg && r_pos && r_neg) {
        seeds.push_back(wrapped({-kPi + (i + 0.5) * h, -kPi + (j + 0.5) * h}));
      }
    }
  }
  for (double r : diagonal_root_condition(lambda1, lambda2).roots) {
    seeds.push_back({r, r});
  }

  FixedPointSearch out;
  for (const auto& seed : seeds) {
    const NewtonResult nr = refine(seed, lambda1, lambda2, opts);
    if (nr.residual > opts.residual_tol) {
      std::ostringstream os;
      os << "Newton candidate from (" << seed.theta_l << ", " << seed.theta_r
         << ") dropped: residual " << nr.residual;
      out.warnings.push_back(os.str());
      continue;
    }
    bool duplicate = false;
    for (auto& existing : out.points) {
      if (torus_distance(existing.theta, nr.theta) < opts.dedup_distance) {
        if (nr.residual < existing.residual) {
          existing = make_fixed_point(nr.theta, nr.residual, lambda1, lambda2);
        }
        duplicate = true;
        break;
      }
    }
    if (!duplicate) {
      out.points.push_back(make_fixed_point(nr.theta, nr.residual, lambda1, lambda2));
    }
  }

  std::sort(out.points.begin(), out.points.end(),
            [](const FixedPoint& a, const FixedPoint& b) {
              if (a.theta.theta_l != b.theta.theta_l)
                return a.theta.theta_l < b.theta.theta_l;
              return a.theta.theta_r < b.theta.theta_r;
            });
  return out;
}

std::vector<FixedPoint> find_fixed_points(double lambda1, double lambda2,
                                          const FixedPointOptions& opts) {
  return find_fixed_points_detailed(lambda1, lambda2, opts).points;
}

namespace {

PhaseLabel label_from(const std::vector<FixedPoint>& pts, double lambda1,
                      double lambda2) {
  if (pts.empty()) return PhaseLabel::Ergodic;
  bool stable = false;
  for (const auto& p : pts) {
    if (p.cls == StabilityClass::Marginal) {
      std::ostringstream os;
      os << "marginal fixed point at (lambda1, lambda2) = (" << lambda1 << ", "
         << lambda2 << "): phase boundary";
      throw BoundaryIndeterminateError(os.str());
    }
    stable = stable || p.cls == StabilityClass::Stable;
  }
  return stable ? PhaseLabel::StandardZeno : PhaseLabel::CorrelatedZeno;
}

}  // namespace

PhaseLabel classify_phase(double lambda1, double lambda2,
                          const FixedPointOptions& opts) {
  return label_from(find_fixed_points(lambda1, lambda2, opts), lambda1, lambda2);
}

std::vector<PhaseCell> phase_diagram(AxisRange l1, AxisRange l2, unsigned threads,
                                     const FixedPointOptions& opts) {
  for (const AxisRange* r : {&l1, &l2}) {
    if (r->count < 1) throw ValidationError("phase_diagram: node count must be >= 1");
    if (r->count == 1 && r->lo != r->hi) {
      throw ValidationError("phase_diagram: a range needs at least 2 nodes");
    }
    if (!(r->lo >= 0.0) || !(r->hi >= r->lo)) {
      throw ValidationError("phase_diagram: ranges must be nonnegative and ordered");
    }
  }
  auto node = [](const AxisRange& r, int k) {
    return r.count == 1 ? r.lo : r.lo + (r.hi - r.lo) * k / (r.count - 1);
  };

  std::vector<PhaseCell> cells(static_cast<std::size_t>(l1.count) * l2.count);
  parallel_for(cells.size(), threads, [&](std::uint64_t idx) {
    PhaseCell c;
    c.lambda1 = node(l1, static_cast<int>(idx / l2.count));
    c.lambda2 = node(l2, static_cast<int>(idx % l2.count));
    const auto pts = find_fixed_points(c.lambda1, c.lambda2, opts);
    c.n_fixed = static_cast<int>(pts.size());
    for (const auto& p : pts) c.n_stable += p.cls == StabilityClass::Stable;
    try {
      c.phase = label_from(pts, c.lambda1, c.lambda2);
    } catch (const BoundaryIndeterminateError&) {
      c.boundary = true;
    }
    cells[idx] = c;
  });
  return cells;
}

std::vector<PhaseCell> phase_diagram(double l1_min, double l1_max,
                                     double l2_min, double l2_max,
                                     int resolution, unsigned threads,
                                     const FixedPointOptions& opts) {
  return phase_diagram(AxisRange{l1_min, l1_max, resolution},
                       AxisRange{l2_min, l2_max, resolution}, threads, opts);
}

std::array<double, 2> locate_transition(std::array<double, 2> from,
                                        std::array<double, 2> to, double tol,
                                        const FixedPointOptions& opts) {
  auto at = [&](double t) {
    return std::array<double, 2>{from[0] + t * (to[0] - from[0]),
                                 from[1] + t * (to[1] - from[1])};
  };
  auto label = [&](double t) -> int {
    const auto p = at(t);
    try {
      return static_cast<int>(classify_phase(p[0], p[1], opts));
    } catch (const BoundaryIndeterminateError&) {
      return -1;
    }
  };
  const int start = label(0.0);
  if (label(1.0) == start) {
    throw ValidationError("locate_transition: both ends have the same phase");
  }
  const double length = std::hypot(to[0] - from[0], to[1] - from[1]);
  double lo = 0.0, hi = 1.0;
  while ((hi - lo) * length > tol) {
    const double mid = 0.5 * (lo + hi);
    (label(mid) == start ? lo : hi) = mid;
  }
  return at(0.5 * (lo + hi));
}

}  // namespace dimer
