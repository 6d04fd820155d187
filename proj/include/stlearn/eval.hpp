#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stlearn/config.hpp"
#include "stlearn/core.hpp"
#include "stlearn/embed.hpp"
#include "stlearn/trainer.hpp"
#include "stlearn/vec.hpp"

namespace stlearn {

/// Test-time representation of a whole tracklet: normalized mean of its
/// frame embeddings.
inline FeatureVector tracklet_descriptor(const EmbedModel& model, const Tracklet& t) {
  FeatureVector mean(static_cast<std::size_t>(model.out_dim()), 0.0);
  for (const Frame& f : t.frames) {
    add_scaled(mean, model.forward(std::span<const float>(f.raw)),
               1.0 / static_cast<double>(t.frames.size()));
  }
  normalize_unit(mean);
  return mean;
}

struct RetrievalResult {
  std::vector<double> cmc;  // cmc[k-1] = rank-k accuracy, k = 1..K
  double map = 0.0;
  std::vector<double> per_query_ap;  // by query tracklet, in id order
};

/**
 * Cross-camera retrieval protocol: every tracklet with a known identity and
 * at least one same-identity tracklet in another camera queries a gallery
 * of ALL tracklets from the other cameras — distractors and unmatched
 * identities stay in and count as incorrect. Ranking by descending cosine
 * similarity, ties broken by lower id.
 */
inline RetrievalResult evaluate_retrieval(const EmbedModel& model, const TrackletDataset& ds,
                                          int max_rank = 20) {
  const GroundTruth& gt = ds.ground_truth();
  const auto& tracklets = ds.tracklets();

  std::vector<FeatureVector> descriptors;
  descriptors.reserve(tracklets.size());
  for (const Tracklet& t : tracklets) descriptors.push_back(tracklet_descriptor(model, t));

  RetrievalResult result;
  result.cmc.assign(static_cast<std::size_t>(max_rank), 0.0);

  for (const Tracklet& q : tracklets) {
    if (!gt.known(q.id)) continue;
    bool has_match = false;
    for (const Tracklet& g : tracklets) {
      if (g.camera != q.camera && gt.same_identity(q.id, g.id)) {
        has_match = true;
        break;
      }
    }
    if (!has_match) continue;

    struct Entry {
      std::int64_t id;
      double sim;
      bool correct;
    };
    std::vector<Entry> gallery;
    for (const Tracklet& g : tracklets) {
      if (g.camera == q.camera) continue;
      gallery.push_back({g.id,
                         dot(descriptors[static_cast<std::size_t>(q.id)],
                             descriptors[static_cast<std::size_t>(g.id)]),
                         gt.same_identity(q.id, g.id)});
    }
    std::sort(gallery.begin(), gallery.end(), [](const Entry& a, const Entry& b) {
      if (a.sim != b.sim) return a.sim > b.sim;
      return a.id < b.id;
    });

    std::size_t hits = 0;
    std::size_t total_correct = 0;
    double ap = 0.0;
    std::optional<std::size_t> first_hit;
    for (std::size_t rank = 0; rank < gallery.size(); ++rank) {
      if (!gallery[rank].correct) continue;
      ++hits;
      ++total_correct;
      if (!first_hit) first_hit = rank;
      ap += static_cast<double>(hits) / static_cast<double>(rank + 1);
    }
    ap /= static_cast<double>(total_correct);

    result.per_query_ap.push_back(ap);
    for (std::size_t k = *first_hit; k < result.cmc.size(); ++k) result.cmc[k] += 1.0;
  }

  if (result.per_query_ap.empty()) {
    throw std::runtime_error("evaluate_retrieval: no valid queries in the dataset");
  }
  const double n = static_cast<double>(result.per_query_ap.size());
  for (double& v : result.cmc) v /= n;
  for (double ap : result.per_query_ap) result.map += ap;
  result.map /= n;
  return result;
}

// --- ablation harness ---

struct AblationPoint {
  std::string name;
  Json overrides;  // merged onto the base train config
};

struct AblationRow {
  std::string name;
  bool ok = false;
  std::string error;          // set when !ok
  TrainConfig config;         // resolved config (valid when parsing succeeded)
  RetrievalResult metrics;    // valid when ok
  EmbedModel model;           // valid when ok
  TrainReport train_report;   // valid when ok
};

/// Train + evaluate once per grid point, all from the same base config (and
/// seed). A failing point is recorded and does not stop the rest.
inline std::vector<AblationRow> run_ablation(const TrackletDataset& ds,
                                             const TrainConfig& base,
                                             const std::vector<AblationPoint>& grid) {
  std::vector<AblationRow> rows;
  rows.reserve(grid.size());
  for (const AblationPoint& point : grid) {
    AblationRow row;
    row.name = point.name;
    try {
      row.config = train_config_from_json(apply_override(to_json(base), point.overrides));
      TrainResult trained = run_training(ds, row.config);
      row.metrics = evaluate_retrieval(trained.model, ds);
      row.model = std::move(trained.model);
      row.train_report = std::move(trained.report);
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace stlearn
