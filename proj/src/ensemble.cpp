#include <algorithm>
#include <cmath>

#include "dimer/errors.hpp"
#include "dimer/exact_jump.hpp"
#include "dimer/gutzwiller.hpp"
#include "dimer/parallel.hpp"
#include "dimer/sse.hpp"
#include "dimer/trajectory.hpp"

namespace dimer {

void EnsembleAccumulator::add(const TrajectorySample& s) {
  ++n_;
  se_ += s.entropy;
  se2_ += s.entropy * s.entropy;
  for (int r = 0; r < 4; ++r) readouts_[r] += s.readout_counts[r];
  if (!s.angles_defined) return;
  sf_ += s.fidelity;
  sf2_ += s.fidelity * s.fidelity;
  ++nf_;
}

EnsembleAverages EnsembleAccumulator::result() const {
  if (n_ == 0) throw ValidationError("ensemble_averages needs at least one sample");
  EnsembleAverages out;
  out.n_samples = n_;
  out.n_excluded = n_ - nf_;
  out.readout_totals = readouts_;

  auto mean_and_se = [](double sum, double sum2, std::uint64_t n,
                        double& mean, double& err) {
    if (n == 0) {
      mean = std::nan("");
      err = std::nan("");
      return;
    }
    const double dn = static_cast<double>(n);
    mean = sum / dn;
    if (n < 2) {
      err = 0.0;
      return;
    }
    const double var = std::max(0.0, (sum2 - dn * mean * mean) / (dn - 1.0));
    err = std::sqrt(var / dn);
  };
  mean_and_se(sf_, sf2_, nf_, out.mean_fidelity, out.se_fidelity);
  mean_and_se(se_, se2_, n_, out.mean_entropy, out.se_entropy);
  return out;
}

EnsembleAverages ensemble_averages(
    const std::vector<TrajectorySample>& samples) {
  EnsembleAccumulator acc;
  for (const auto& s : samples) acc.add(s);
  return acc.result();
}

std::vector<TrajectorySample> run_ensemble_range(Backend backend,
                                                 const SimParams& params,
                                                 std::uint64_t first,
                                                 std::uint64_t count,
                                                 unsigned threads) {
  params.validate();
  std::vector<TrajectorySample> samples(count);
  const SseParams sse{params};
  parallel_for(count, threads, [&](std::uint64_t k) {
    const std::uint64_t i = first + k;
    switch (backend) {
      case Backend::Exact:
        samples[k] = run_exact_trajectory(params, i);
        break;
      case Backend::Gutzwiller:
        samples[k] = run_gw_trajectory(params, i);
        break;
      case Backend::Sse:
        samples[k] = run_sse_trajectory(sse, i);
        break;
    }
  });
  return samples;
}

std::vector<TrajectorySample> run_ensemble(Backend backend,
                                           const SimParams& params,
                                           unsigned threads) {
  return run_ensemble_range(backend, params, 0, params.n_traj, threads);
}

void stream_ensemble(Backend backend, const SimParams& params, unsigned threads,
                     const std::function<void(std::uint64_t,
                                              const TrajectorySample&)>& sink) {
  constexpr std::uint64_t kChunk = 1u << 16;
  params.validate();
  for (std::uint64_t first = 0; first < params.n_traj; first += kChunk) {
    const std::uint64_t count = std::min(kChunk, params.n_traj - first);
    const auto chunk = run_ensemble_range(backend, params, first, count, threads);
    for (std::uint64_t k = 0; k < count; ++k) sink(first + k, chunk[k]);
  }
}

}  // namespace dimer
