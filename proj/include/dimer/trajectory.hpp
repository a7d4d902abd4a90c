#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "dimer/angles.hpp"
#include "dimer/params.hpp"
#include "dimer/quantum_core.hpp"

namespace dimer {

/// Final-time record of one trajectory, shared by all stochastic backends.
struct TrajectorySample {
  AngleState angles;
  double entropy = 0.0;
  double fidelity = 1.0;
  std::array<std::uint64_t, 4> readout_counts{};
  /// False when a reduced Bloch vector had no y-z component at the final
  /// time; angles and fidelity are then meaningless and the sample is
  /// excluded from histograms and from the fidelity average.
  bool angles_defined = true;
};

/// Called every `stride` steps with (step index, time, current state).
struct StateObserver {
  std::int64_t stride = 0;
  std::function<void(std::int64_t, double, const PureState4&)> on_state;
};

struct EnsembleAverages {
  double mean_fidelity = 0.0;
  double se_fidelity = 0.0;
  double mean_entropy = 0.0;
  double se_entropy = 0.0;
  std::uint64_t n_samples = 0;
  /// Samples left out of the fidelity mean because it was undefined.
  std::uint64_t n_excluded = 0;
  std::array<std::uint64_t, 4> readout_totals{};
};

/// Means and standard errors of the mean. Throws ValidationError on empty
/// input.
EnsembleAverages ensemble_averages(const std::vector<TrajectorySample>& samples);

/// Running sums behind EnsembleAverages. Adding samples in index order makes
/// the result independent of how the ensemble was chunked or threaded.
class EnsembleAccumulator {
 public:
  void add(const TrajectorySample& s);
  /// Throws ValidationError when no sample was added.
  EnsembleAverages result() const;

 private:
  double sf_ = 0.0, sf2_ = 0.0, se_ = 0.0, se2_ = 0.0;
  std::uint64_t n_ = 0, nf_ = 0;
  std::array<std::uint64_t, 4> readouts_{};
};

enum class Backend { Exact, Gutzwiller, Sse };

/// Runs n_traj trajectories of the chosen backend on `threads` workers.
/// Sample i depends only on (params, i); the result is ordered by index.
std::vector<TrajectorySample> run_ensemble(Backend backend,
                                           const SimParams& params,
                                           unsigned threads = 0);

/// Runs trajectories [first, first + count) only.
std::vector<TrajectorySample> run_ensemble_range(Backend backend,
                                                 const SimParams& params,
                                                 std::uint64_t first,
                                                 std::uint64_t count,
                                                 unsigned threads = 0);

/// Streams the ensemble in fixed-size chunks, calling sink(index, sample) in
/// increasing index order. Memory stays bounded for any n_traj.
void stream_ensemble(Backend backend, const SimParams& params, unsigned threads,
                     const std::function<void(std::uint64_t,
                                              const TrajectorySample&)>& sink);

}  // namespace dimer
