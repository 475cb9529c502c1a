#pragma once

#include <cstdint>
#include <random>

namespace uavvlc {

/// Every stochastic routine takes its generator explicitly; there is no global RNG.
using Rng = std::mt19937_64;

/// Derives an independent stream seed from a parent seed and a stream tag
/// (splitmix64 finaliser). Used to give tasks, episodes and learners
/// non-overlapping generators from one master seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace uavvlc
