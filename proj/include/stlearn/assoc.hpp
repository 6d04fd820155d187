#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stlearn/memory.hpp"
#include "stlearn/vec.hpp"

namespace stlearn {

enum class NeighborScope { PerCamera, CrossCamera };

struct NeighborEntry {
  std::int64_t id = -1;
  double similarity = 0.0;
};

/// Neighbors of one query tracklet, sorted by descending similarity
/// (ties by lower id). Size ranges from 0 to k; never contains the query.
using NeighborSet = std::vector<NeighborEntry>;

struct Candidate {
  std::int64_t id;
  const FeatureVector* rep;
};

/// Top-k candidates by dot-product similarity. Callers must not pass the
/// query itself among the candidates.
inline NeighborSet knn(const FeatureVector& query, std::span<const Candidate> candidates,
                       int k) {
  NeighborSet scored;
  scored.reserve(candidates.size());
  for (const Candidate& c : candidates) {
    scored.push_back({c.id, dot(query, *c.rep)});
  }
  auto order = [](const NeighborEntry& a, const NeighborEntry& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.id < b.id;
  };
  const std::size_t take = std::min<std::size_t>(scored.size(), static_cast<std::size_t>(std::max(k, 0)));
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                    scored.end(), order);
  scored.resize(take);
  return scored;
}

/// k-NN with the similarity floor: keep only neighbors with sim strictly
/// above epsilon, so the set adapts between 0 and k members.
inline NeighborSet epsilon_knn(const FeatureVector& query,
                               std::span<const Candidate> candidates, int k,
                               double epsilon) {
  NeighborSet set = knn(query, candidates, k);
  std::erase_if(set, [epsilon](const NeighborEntry& e) { return !(e.similarity > epsilon); });
  return set;
}

struct WeightedNeighbor {
  std::int64_t id = -1;  // -1 entry = the query's own tracklet
  double weight = 0.0;
};

/// One row of the association weight table: L1-normalized similarity
/// weights over {query's own tracklet} ∪ neighbors. The query participates
/// with its self-similarity (1 on the unit sphere), so every image keeps a
/// supervised signal even when no neighbor survives the filter. Negative
/// similarities (possible when the epsilon filter is disabled) are clamped
/// to 0 before normalization to keep the row a distribution.
using WeightRow = std::vector<WeightedNeighbor>;

inline WeightRow association_weights(std::int64_t query_id, double own_similarity,
                                     const NeighborSet& neighbors) {
  double denom = own_similarity;
  for (const NeighborEntry& e : neighbors) denom += std::max(0.0, e.similarity);
  WeightRow row;
  row.reserve(neighbors.size() + 1);
  row.push_back({query_id, own_similarity / denom});
  for (const NeighborEntry& e : neighbors) {
    row.push_back({e.id, std::max(0.0, e.similarity) / denom});
  }
  return row;
}

namespace detail {

inline std::vector<Candidate> camera_candidates(const MemoryBank& bank, int camera,
                                                std::int64_t exclude_id) {
  const auto& reps = bank.camera_bank(camera);
  const auto& ids = bank.camera_ids(camera);
  std::vector<Candidate> out;
  out.reserve(reps.size());
  for (std::size_t i = 0; i < reps.size(); ++i) {
    if (ids[i] == exclude_id) continue;
    out.push_back({ids[i], &reps[i]});
  }
  return out;
}

inline NeighborSet select(const FeatureVector& query, std::span<const Candidate> candidates,
                          int k, std::optional<double> epsilon) {
  return epsilon ? epsilon_knn(query, candidates, k, *epsilon) : knn(query, candidates, k);
}

}  // namespace detail

/// Per-camera neighbor sets for every tracklet of `camera`, in label order.
/// epsilon = nullopt disables the similarity floor (pure k-NN association).
inline std::vector<NeighborSet> build_camera_neighbor_sets(const MemoryBank& bank,
                                                           int camera, int k,
                                                           std::optional<double> epsilon) {
  const auto& reps = bank.camera_bank(camera);
  const auto& ids = bank.camera_ids(camera);
  std::vector<NeighborSet> sets;
  sets.reserve(reps.size());
  for (std::size_t i = 0; i < reps.size(); ++i) {
    auto candidates = detail::camera_candidates(bank, camera, ids[i]);
    sets.push_back(detail::select(reps[i], candidates, k, epsilon));
  }
  return sets;
}

/// Cross-camera neighbor sets for every tracklet (global-id order):
/// candidates are all tracklets whose camera differs from the query's,
/// pooled across cameras before the top-k cut.
inline std::vector<NeighborSet> build_cross_neighbor_sets(const MemoryBank& bank, int k,
                                                          std::optional<double> epsilon) {
  std::size_t total = 0;
  for (int m = 0; m < bank.cameras(); ++m) total += bank.camera_ids(m).size();

  std::vector<NeighborSet> sets(total);
  for (int m = 0; m < bank.cameras(); ++m) {
    std::vector<Candidate> candidates;
    for (int other = 0; other < bank.cameras(); ++other) {
      if (other == m) continue;
      const auto& reps = bank.camera_bank(other);
      const auto& ids = bank.camera_ids(other);
      for (std::size_t i = 0; i < reps.size(); ++i) candidates.push_back({ids[i], &reps[i]});
    }
    const auto& reps = bank.camera_bank(m);
    const auto& ids = bank.camera_ids(m);
    for (std::size_t i = 0; i < reps.size(); ++i) {
      sets[static_cast<std::size_t>(ids[i])] = detail::select(reps[i], candidates, k, epsilon);
    }
  }
  return sets;
}

}  // namespace stlearn
