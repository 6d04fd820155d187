#pragma once

#include <cstdint>
#include <random>

#include "stlearn/vec.hpp"

namespace stlearn {

/// splitmix64 step; used only to derive well-separated seeds for the
/// std::mt19937_64 streams that do the actual sampling.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for substream `stream` of the generator rooted at `root`.
/// Distinct (root, stream) pairs give independent-looking streams, so the
/// content of one tracklet does not depend on how many draws its
/// predecessors consumed.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
  std::uint64_t state = root + 0x9e3779b97f4a7c15ULL * (stream + 1);
  splitmix64_next(state);
  return splitmix64_next(state);
}

inline FeatureVector sample_gaussian(std::mt19937_64& rng, int dim, double sigma) {
  std::normal_distribution<double> normal(0.0, sigma);
  FeatureVector v(static_cast<std::size_t>(dim));
  for (double& x : v) x = normal(rng);
  return v;
}

/// Uniform draw from the unit sphere (normalized isotropic gaussian).
inline FeatureVector sample_unit_sphere(std::mt19937_64& rng, int dim) {
  FeatureVector v = sample_gaussian(rng, dim, 1.0);
  while (!normalize_unit(v)) v = sample_gaussian(rng, dim, 1.0);
  return v;
}

}  // namespace stlearn
