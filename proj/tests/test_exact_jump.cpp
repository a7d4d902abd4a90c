#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "dimer/errors.hpp"
#include "dimer/exact_jump.hpp"
#include "dimer/gutzwiller.hpp"
#include "dimer/rng.hpp"

using namespace dimer;

namespace {

double state_diff(const PureState4& a, const PureState4& b) {
  double m = 0.0;
  for (int k = 0; k < 4; ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

}  // namespace

TEST_CASE("jump step without monitoring is the unitary step") {
  const KrausSet k = build_kraus(0.0, 0.0, 1e-3);
  const Operator4 u = propagator(1.0, 1e-3);
  for (double r : {0.0, 0.5, 0.999999}) {
    const auto [s, out] = jump_step(PureState4::basis(0), k, u, r);
    CHECK(out == 0);
    CHECK(state_diff(s, u * PureState4::basis(0)) < 1e-15);
  }
}

TEST_CASE("joint click fixes the pointer state") {
  const double dt = 1e-3;
  const KrausSet k = build_kraus(1.0, 1.0, dt);
  const Operator4 u = propagator(1.0, dt);
  const auto p = born_probabilities(u * PureState4::basis(3), k);
  const auto [s, r] = jump_step(PureState4::basis(3), k, u, 1.0 - 0.5 * p[3]);
  CHECK(r == 3);
  CHECK(std::abs(std::abs(s[3]) - 1.0) < 1e-15);
  CHECK(std::norm(s[0]) + std::norm(s[1]) + std::norm(s[2]) == 0.0);
}

TEST_CASE("jump step refuses a zero-probability outcome") {
  // Without rotation |00> can only produce r = 0; a draw past the
  // cumulative sum lands on the empty r = 3 window.
  const KrausSet k = build_kraus(1.0, 1.0, 1e-3);
  CHECK_NOTHROW(jump_step(PureState4::basis(0), k, Operator4::identity(), 0.999999999));
  CHECK_THROWS_AS(jump_step(PureState4::basis(0), k, Operator4::identity(), 1.0), NumericError);
}

TEST_CASE("click frequencies match Born probabilities") {
  // With omega_s = 0 the state stays |11> and each step is an iid draw.
  const double dt = 1e-3;
  const KrausSet k = build_kraus(1.0, 1.0, dt);
  const Operator4 u = propagator(0.0, dt);
  auto rng = trajectory_rng(42, 0);
  const int n = 1000000;
  std::array<int, 4> counts{};
  PureState4 s = PureState4::basis(3);
  for (int t = 0; t < n; ++t) {
    auto [next, r] = jump_step(s, k, u, uniform01(rng));
    s = next;
    ++counts[r];
  }
  const auto p = born_probabilities(s, k);
  for (int r = 0; r < 4; ++r) {
    const double se = std::sqrt(n * p[r] * (1 - p[r]));
    CHECK(std::abs(counts[r] - n * p[r]) < 4 * se);
  }
}

TEST_CASE("norm stays one over long runs") {
  const double dt = 1e-3;
  const KrausSet k = build_kraus(2.0, 3.0, dt);
  const Operator4 u = propagator(1.0, dt);
  auto rng = trajectory_rng(1, 2);
  PureState4 s = PureState4::basis(3);
  double worst = 0.0;
  for (int t = 0; t < 100000; ++t) {
    s = jump_step(s, k, u, uniform01(rng)).first;
    worst = std::max(worst, std::abs(s.norm_squared() - 1.0));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("Rabi period returns to the pointer state") {
  SimParams p;
  p.dt = kPi / 4000;
  p.t_final = kPi;  // 2 pi / (2 omega_s)
  const TrajectorySample s = run_exact_trajectory(p, 0);
  CHECK(angular_distance(s.angles.theta_l, kPi) < 1e-6);
  CHECK(angular_distance(s.angles.theta_r, kPi) < 1e-6);
}

TEST_CASE("local monitoring never entangles") {
  // The discrete no-click operator entangles at O(dt^2) per step, so the
  // check runs where that residue sits well below the threshold.
  SimParams p = SimParams::from_lambdas(0.75, 0.0);
  p.dt = 1e-5;
  p.t_final = 10.0;
  double worst = 0.0;
  const StateObserver obs{1, [&](std::int64_t, double, const PureState4& st) {
                            worst = std::max(worst, entanglement_entropy(st));
                          }};
  for (std::uint64_t i = 0; i < 5; ++i) run_exact_trajectory(p, i, &obs);
  CHECK(worst <= 1e-8);
}

TEST_CASE("trajectory at the ergodic parameters completes") {
  SimParams p = SimParams::from_lambdas(0.25, 0.25);
  p.master_seed = 9;
  const TrajectorySample s = run_exact_trajectory(p, 3);
  CHECK(s.fidelity >= 0.0);
  CHECK(s.fidelity <= 1.0 + 1e-12);
  CHECK(s.entropy >= 0.0);
  CHECK(s.entropy <= 1.0);
  CHECK(s.readout_counts[0] + s.readout_counts[1] + s.readout_counts[2] +
            s.readout_counts[3] ==
        static_cast<std::uint64_t>(p.n_steps()));
}

TEST_CASE("trajectories are deterministic in (seed, index)") {
  SimParams p = SimParams::from_lambdas(0.5, 0.5);
  p.t_final = 5.0;
  p.master_seed = 77;
  const auto a = run_exact_trajectory(p, 12), b = run_exact_trajectory(p, 12);
  CHECK(a.angles == b.angles);
  CHECK(a.entropy == b.entropy);
  CHECK(a.readout_counts == b.readout_counts);

  p.n_traj = 40;
  const auto e1 = run_ensemble(Backend::Exact, p, 1);
  const auto e3 = run_ensemble(Backend::Exact, p, 3);
  for (std::size_t i = 0; i < e1.size(); ++i) {
    CHECK(e1[i].angles == e3[i].angles);
    CHECK(e1[i].fidelity == e3[i].fidelity);
  }
  CHECK(e1[12].angles == a.angles);
}

TEST_CASE("Gutzwiller fidelity") {
  CHECK(gutzwiller_fidelity(PureState4::product({0.4, -2.2})) ==
        doctest::Approx(1.0).epsilon(1e-12));

  PureState4 bell;
  bell[0] = bell[3] = 1.0 / std::sqrt(2.0);
  CHECK_THROWS_AS(gutzwiller_fidelity(bell), UndefinedAngleError);

  PureState4 s;
  s[0] = std::sqrt(0.9);
  s[3] = std::sqrt(0.1);
  CHECK(gutzwiller_fidelity(s) == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("ensemble averages") {
  std::vector<TrajectorySample> same(5);
  const auto a = ensemble_averages(same);
  CHECK(a.mean_fidelity == 1.0);
  CHECK(a.se_fidelity == 0.0);

  std::vector<TrajectorySample> two(2);
  two[1].entropy = 1.0;
  CHECK(ensemble_averages(two).mean_entropy == 0.5);

  std::vector<TrajectorySample> mixed(3);
  mixed[1].angles_defined = false;
  mixed[1].fidelity = 0.0;
  const auto m = ensemble_averages(mixed);
  CHECK(m.n_excluded == 1);
  CHECK(m.mean_fidelity == 1.0);
  CHECK(m.n_samples == 3);

  CHECK_THROWS_AS(ensemble_averages({}), ValidationError);
}

TEST_CASE("local-only ensemble has no entanglement") {
  SimParams p = SimParams::from_lambdas(1.25, 0.0);
  p.dt = 1e-5;
  p.t_final = 5.0;
  p.n_traj = 40;
  CHECK(ensemble_averages(run_ensemble(Backend::Exact, p, 1)).mean_entropy <= 1e-8);
}

TEST_CASE("left and right marginals are statistically identical") {
  SimParams p = SimParams::from_lambdas(0.25, 0.75);
  p.dt = 1e-2;
  p.t_final = 5.0;
  p.n_traj = 100000;
  p.master_seed = 2024;
  const auto s = run_ensemble(Backend::Exact, p, 0);
  // Independent halves so the two samples are independent.
  std::vector<double> l, r;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!s[i].angles_defined) continue;
    (i % 2 ? l : r).push_back(i % 2 ? s[i].angles.theta_l : s[i].angles.theta_r);
  }
  const double n = l.size(), m = r.size();
  CHECK(ks_statistic(l, r) < 1.628 * std::sqrt((n + m) / (n * m)));  // 1% level
}

TEST_CASE("no-click step agrees with the Gutzwiller drift to second order") {
  // Without the joint channel the product form is exact; the remaining
  // difference is the O(dt^2) discretization of the angle flow.
  const AngleState th0{-0.7, 2.1};
  auto err = [&](double dt) {
    SimParams p = SimParams::from_lambdas(0.6, 0.0);
    p.dt = dt;
    const KrausSet k = build_kraus(p.gamma1, p.gamma2, dt);
    const PureState4 phi =
        (k.m[0] * (propagator(1.0, dt) * PureState4::product(th0))).normalized();
    const AngleState exact{bloch_angle(reduced_bloch(phi, Site::Left)),
                           bloch_angle(reduced_bloch(phi, Site::Right))};
    const AngleState gw = gw_step(th0, p, 0.0).first;
    return std::max(angular_distance(exact.theta_l, gw.theta_l),
                    angular_distance(exact.theta_r, gw.theta_r));
  };
  const double ratio = err(1e-3) / err(5e-4);
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.1));
}
