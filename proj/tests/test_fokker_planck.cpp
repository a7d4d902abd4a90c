#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "dimer/errors.hpp"
#include "dimer/fokker_planck.hpp"

using namespace dimer;

namespace {

PdfGrid random_grid(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PdfGrid p = PdfGrid::uniform(n);
  for (double& v : p.bulk) v = u(rng);
  for (double& v : p.diagonal) v = u(rng);
  const double m = p.mass();
  for (double& v : p.bulk) v /= m;
  for (double& v : p.diagonal) v /= m;
  return p;
}

}  // namespace

TEST_CASE("uniform density is invariant without monitoring") {
  SimParams p;
  PdfGrid g = PdfGrid::uniform(36);
  const double dt = fp_max_step(36, p);
  for (int s = 0; s < 50; ++s) g = fp_step(g, p, dt);
  for (double v : g.bulk) CHECK(v == doctest::Approx(1.0 / (kTwoPi * kTwoPi)).epsilon(1e-12));
  CHECK(g.time == doctest::Approx(50 * dt));
}

TEST_CASE("click losses are redeposited exactly") {
  const SimParams p = SimParams::from_lambdas(0.8, 1.3);
  PdfGrid g = random_grid(40, 3);
  const double dt = fp_max_step(40, p);
  for (int s = 0; s < 30; ++s) {
    FpStepReport rep;
    const double before = g.mass();
    g = fp_step(g, p, dt, &rep);
    const double removed = rep.removed[0] + rep.removed[1] + rep.removed[2];
    CHECK(removed > 0.0);
    CHECK(std::abs(removed - rep.deposited) < 1e-12);
    CHECK(std::abs(g.mass() - before) < 1e-12);
    CHECK(*std::min_element(g.bulk.begin(), g.bulk.end()) >= 0.0);
    CHECK(*std::min_element(g.diagonal.begin(), g.diagonal.end()) >= 0.0);
  }
}

TEST_CASE("pointer mass stays put without rotation") {
  SimParams p;
  p.omega_s = 0.0;
  p.gamma1 = 0.0;
  p.gamma2 = 1e3;
  PdfGrid g = PdfGrid::pointer_delta(36);
  const double dt = fp_max_step(36, p);
  for (int s = 0; s < 500; ++s) g = fp_step(g, p, dt);
  const Density2D d = to_density(g);
  const double h = d.bin_width();
  CHECK(d.at(35, 35) * h * h == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("CFL violations are rejected") {
  const SimParams p = SimParams::from_lambdas(0.25, 0.25);
  const PdfGrid g = PdfGrid::pointer_delta(36);
  CHECK_THROWS_AS(fp_step(g, p, 1.01 * fp_max_step(36, p)), ValidationError);
  CHECK_NOTHROW(fp_step(g, p, fp_max_step(36, p)));
  CHECK_THROWS_AS(fp_step(g, p, 0.0), ValidationError);
}

TEST_CASE("symmetric start stays exchange symmetric") {
  const SimParams p = SimParams::from_lambdas(0.25, 1.75);
  const FpStationaryResult r = fp_stationary(p, 48, 10.0, 1e-12);
  for (int i = 0; i < 48; ++i) {
    for (int j = 0; j < 48; ++j) CHECK(std::abs(r.grid.at(i, j) - r.grid.at(j, i)) <= 1e-10);
  }
}

TEST_CASE("stationary solver reports its stopping rule") {
  const SimParams p = SimParams::from_lambdas(1.25, 0.25);
  const FpStationaryResult conv = fp_stationary(p, 36, 200.0, 1e-6);
  CHECK(conv.converged);
  CHECK(conv.criterion == "tolerance");
  CHECK(conv.last_change_rate < 1e-6);
  CHECK(conv.max_mass_error < 1e-12);

  const FpStationaryResult cut = fp_stationary(p, 36, 0.5, 1e-12);
  CHECK_FALSE(cut.converged);
  CHECK(cut.criterion == "t_max");
  CHECK(cut.grid.time == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(fp_stationary(p, 35, 1.0, 1e-6), ValidationError);
}

TEST_CASE("regime signatures of the stationary density") {
  const FpStationaryResult erg = fp_stationary(SimParams::from_lambdas(0.25, 0.25), 72, 20.0, 1e-9);
  const Density2D e = to_density(erg.grid);
  CHECK(*std::min_element(e.density.begin(), e.density.end()) > 0.0);
  CHECK(erg.max_mass_error < 1e-6);

  const FpStationaryResult cz = fp_stationary(SimParams::from_lambdas(0.25, 1.75), 72, 20.0, 1e-9);
  const Density2D c = to_density(cz.grid);
  Histogram2D zeros(72);
  for (std::size_t q = 0; q < c.density.size(); ++q) zeros.counts[q] = c.density[q] > 0.0;
  zeros.total = 1;
  const auto regions = empty_regions(zeros);
  bool near_corner = false;
  for (const auto& reg : regions) {
    for (int q : reg) {
      const int i = q / 72, j = q % 72;
      near_corner = near_corner || (i <= 4 && j <= 4);
    }
  }
  CHECK(near_corner);
  for (Site s : {Site::Left, Site::Right}) {
    const Marginal1D m = marginal(c, s);
    CHECK(*std::min_element(m.density.begin(), m.density.end()) > 0.0);
  }
}

TEST_CASE("grid refinement and coarsening") {
  const SimParams p = SimParams::from_lambdas(0.25, 1.75);
  const PdfGrid fine = fp_stationary(p, 144, 20.0, 1e-9).grid;
  const PdfGrid coarse = coarsen(fine, 72);
  CHECK(coarse.mass() == doctest::Approx(fine.mass()).epsilon(1e-12));
  CHECK_THROWS_AS(coarsen(fine, 70), ValidationError);
  const Density2D a = to_density(coarse);
  const Density2D b = to_density(fp_stationary(p, 72, 20.0, 1e-9).grid);
  // Reported for reference: the two resolutions agree to within the
  // click-broadening scale.
  MESSAGE("TV(72, 144 coarsened) = " << tv_distance(a, b));
  CHECK(tv_distance(a, b) < 0.2);
}
