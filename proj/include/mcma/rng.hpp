#pragma once

// Seed derivation for reproducible substreams.
//
// All randomness in a run flows from a single 64-bit seed. Independent
// substreams (one per purpose, plus an optional index for per-row or
// per-replication streams) are derived by mixing (seed, stream tag, index)
// through SplitMix64. Engines are std::mt19937_64 seeded with the derived
// value, so any fixed (seed, tag, index) triple reproduces the same draws.

#include <cstdint>
#include <random>

namespace mcma::rng {

enum class Stream : std::uint64_t {
  Confounder = 1,  // u_i draws
  Bias = 2,        // bias-bit draws (including rejection resampling)
  Weights = 3,     // per-dataset Poisson weight vectors
  Labels = 4,      // outcome label draws
  Holdout = 5,     // held-entry selection
  PpcaInit = 6,    // factor-model parameter initialization
  Check = 7,       // predictive-check replication draws
  Train = 8,       // classifier initialization
  Split = 9,       // train/test splitting
  Replication = 10 // per-replication root seeds in sweeps
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive(std::uint64_t seed, Stream stream,
                               std::uint64_t index = 0) {
  std::uint64_t h = splitmix64(seed ^ 0x5851f42d4c957f2dULL);
  h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
  h = splitmix64(h ^ index);
  return h;
}

inline std::mt19937_64 engine(std::uint64_t seed, Stream stream,
                              std::uint64_t index = 0) {
  return std::mt19937_64(derive(seed, stream, index));
}

// Uniform draw on the open interval (0,1); rejects the measure-zero 0.
inline double uniform_open01(std::mt19937_64& eng) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  double u = dist(eng);
  while (u <= 0.0) u = dist(eng);
  return u;
}

} // namespace mcma::rng
