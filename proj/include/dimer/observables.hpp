#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dimer/angles.hpp"
#include "dimer/params.hpp"

namespace dimer {

/// Run metadata carried alongside a histogram.
struct HistogramMeta {
  std::string backend = "gutzwiller";  // exact | gutzwiller | sse | fokker-planck
  SimParams params;

  friend bool operator==(const HistogramMeta&, const HistogramMeta&) = default;
};

/// Bin index of an angle on a uniform partition of (-pi, pi] into n
/// half-open bins [left, right); theta = pi belongs to the last bin.
int bin_index(double theta, int n);
double bin_center(int k, int n);

/// Counts of final-time angle pairs on an n x n grid. Storage is row-major
/// with the left-angle bin as row index.
struct Histogram2D {
  int n = 72;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
  HistogramMeta meta;

  Histogram2D() = default;
  explicit Histogram2D(int bins);

  std::uint64_t& at(int i, int j) { return counts[static_cast<std::size_t>(i) * n + j]; }
  std::uint64_t at(int i, int j) const { return counts[static_cast<std::size_t>(i) * n + j]; }
  double bin_width() const { return kTwoPi / n; }
  /// count / (total * bin_width^2); integrates to one over the torus.
  double density(int i, int j) const;

  void add(AngleState a);
  /// Associative, commutative count addition. Throws on shape mismatch.
  void merge(const Histogram2D& other);
  Histogram2D transposed() const;
};

Histogram2D bin_angles(const std::vector<AngleState>& samples, int n = 72);

/// Generic normalized density on an n x n torus grid (row-major, left angle
/// as row). Used to compare Monte Carlo histograms with grid solutions.
struct Density2D {
  int n = 0;
  std::vector<double> density;

  double bin_width() const { return kTwoPi / n; }
  double at(int i, int j) const { return density[static_cast<std::size_t>(i) * n + j]; }
};

Density2D to_density(const Histogram2D& h);

/// Densities over (-pi, pi]; sum(density) * bin_width = 1.
struct Marginal1D {
  int n = 0;
  std::vector<double> density;

  double bin_width() const { return kTwoPi / n; }
};

/// Throws ValidationError for an empty histogram.
Marginal1D marginal(const Histogram2D& h, Site axis);
Marginal1D marginal(const Density2D& d, Site axis);

/// Outer product of the two marginals of d, as a density.
Density2D product_of_marginals(const Density2D& d);

struct ConditionalCuts {
  /// Distribution of theta_L on the slice theta_R = pi (last right bin).
  std::optional<Marginal1D> edge_r_pi;
  /// Distribution of theta_R on the slice theta_L = pi (last left bin).
  std::optional<Marginal1D> edge_l_pi;
  /// Distribution of theta_L = theta_R along the bins with i == j.
  std::optional<Marginal1D> diagonal;
};

/// Normalized slices; a slice without mass is returned empty.
ConditionalCuts conditional_cuts(const Histogram2D& h);

/// Half the L1 distance between normalized densities. Throws ValidationError
/// on shape mismatch.
double tv_distance(const Density2D& a, const Density2D& b);
double tv_distance(const Histogram2D& a, const Histogram2D& b);
double tv_distance(const Marginal1D& a, const Marginal1D& b);

/// Fraction of bins (optionally restricted to mask != 0) with nonzero count.
double occupied_fraction(const Histogram2D& h,
                         const std::vector<std::uint8_t>* mask = nullptr);
double occupied_fraction(const Density2D& d,
                         const std::vector<std::uint8_t>* mask = nullptr);

/// Length of the longest run of consecutive zero bins, periodic in theta.
int longest_empty_run(const Marginal1D& m);

/// Connected components (4-neighbour, periodic) of empty bins. Each entry
/// lists the flat bin indices of one component.
std::vector<std::vector<int>> empty_regions(const Histogram2D& h);

}  // namespace dimer
