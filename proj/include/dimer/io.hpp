#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dimer/fokker_planck.hpp"
#include "dimer/noclick_flow.hpp"
#include "dimer/observables.hpp"
#include "dimer/trajectory.hpp"

namespace dimer {

/// Parsed histogram CSV. For Monte Carlo backends `counts` holds the bin
/// counts; for the grid solver the count column is zero and only
/// `densities` carries information.
struct HistogramFile {
  HistogramMeta meta;
  int n = 0;
  std::vector<std::uint64_t> counts;
  std::vector<double> densities;

  Histogram2D histogram() const;
  Density2D density() const;
};

/// Histogram CSV: `# key=value` header lines (backend, omega_s, gamma1,
/// gamma2, dt, t_final, n_traj, master_seed, n_bins), then rows
/// `i,j,theta_l_center,theta_r_center,count,density` in row-major order.
void write_histogram(std::ostream& os, const Histogram2D& h);
void write_histogram(const std::filesystem::path& path, const Histogram2D& h);

/// Grid-solver output in the histogram format (count column 0).
void write_pdf_grid(std::ostream& os, const PdfGrid& p, const HistogramMeta& meta);
void write_pdf_grid(const std::filesystem::path& path, const PdfGrid& p,
                    const HistogramMeta& meta);

HistogramFile read_histogram(std::istream& is);
HistogramFile read_histogram(const std::filesystem::path& path);

/// Header `theta_l,theta_r,eig1_re,eig1_im,eig2_re,eig2_im,class`, one row per
/// point.
void write_fixed_points(std::ostream& os, const std::vector<FixedPoint>& pts,
                        double lambda1, double lambda2);
void write_fixed_points(const std::filesystem::path& path,
                        const std::vector<FixedPoint>& pts, double lambda1,
                        double lambda2);

/// Header `lambda1,lambda2,n_fixed,n_stable,phase`.
void write_phase_grid(std::ostream& os, const std::vector<PhaseCell>& cells);
void write_phase_grid(const std::filesystem::path& path,
                      const std::vector<PhaseCell>& cells);

/// Header `theta_l,theta_r,v_l,v_r` with v = -Omega.
void write_flow_field(std::ostream& os, const FlowGrid& g, double lambda1,
                      double lambda2);
void write_flow_field(const std::filesystem::path& path, const FlowGrid& g,
                      double lambda1, double lambda2);

/// `key=value` lines: averages, standard errors, excluded count, readout
/// totals and the run parameters.
void write_ensemble_summary(std::ostream& os, const EnsembleAverages& avg,
                            const HistogramMeta& meta);
void write_ensemble_summary(const std::filesystem::path& path,
                            const EnsembleAverages& avg,
                            const HistogramMeta& meta);

/// Shortest-round-trip-safe decimal (17 significant digits).
std::string format_double(double v);

}  // namespace dimer
