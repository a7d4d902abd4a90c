#pragma once

#include <cstdint>
#include <random>

namespace dimer {

/// SplitMix64 finalizer; a bijective 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stream key for trajectory `index` of an ensemble: a pure function of the
/// pair, so every trajectory owns an independent generator no matter which
/// worker runs it or in which order.
constexpr std::uint64_t stream_key(std::uint64_t master_seed,
                                   std::uint64_t index) {
  return mix64(mix64(master_seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

using TrajectoryRng = std::mt19937_64;

inline TrajectoryRng trajectory_rng(std::uint64_t master_seed,
                                    std::uint64_t index) {
  return TrajectoryRng(stream_key(master_seed, index));
}

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(TrajectoryRng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace dimer
