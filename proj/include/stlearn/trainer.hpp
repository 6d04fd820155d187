#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stlearn/assoc.hpp"
#include "stlearn/config.hpp"
#include "stlearn/core.hpp"
#include "stlearn/embed.hpp"
#include "stlearn/loss.hpp"
#include "stlearn/memory.hpp"

namespace stlearn {

struct EpochStats {
  int epoch = 0;  // 1-based
  double mean_pcm_loss = 0.0;  // holds the CE loss in the ce_baseline mode
  double mean_ccm_loss = 0.0;  // exactly 0 before stage 2
  std::size_t cross_pair_count = 0;
  std::optional<double> cross_pair_precision;
  std::size_t per_camera_pair_count = 0;
  std::optional<double> per_camera_pair_precision;
};

struct NeighborRecord {
  int epoch = 0;
  NeighborScope scope = NeighborScope::PerCamera;
  std::int64_t query_id = -1;
  std::int64_t member_id = -1;
  double similarity = 0.0;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  std::vector<NeighborRecord> neighbor_log;
};

struct TrainResult {
  EmbedModel model;
  TrainReport report;
};

class TrainingDiverged : public std::runtime_error {
 public:
  explicit TrainingDiverged(const std::string& what) : std::runtime_error(what) {}
};

/// Shuffle all frame indices and split them into batches; the remainder
/// batch may be short. Every index appears exactly once.
inline std::vector<std::vector<std::size_t>> make_epoch_batches(std::size_t n,
                                                                int batch_size,
                                                                std::mt19937_64& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t at = 0; at < n; at += static_cast<std::size_t>(batch_size)) {
    const std::size_t end = std::min(n, at + static_cast<std::size_t>(batch_size));
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(at),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

/// Pair count and ground-truth precision of a family of neighbor sets.
/// `query_ids[i]` is the query of `sets[i]`. Pairs touching a distractor or
/// an unknown identity count as incorrect.
inline std::pair<std::size_t, std::optional<double>> assoc_diagnostics(
    const std::vector<NeighborSet>& sets, const std::vector<std::int64_t>& query_ids,
    const GroundTruth& gt) {
  std::size_t pairs = 0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (const NeighborEntry& e : sets[i]) {
      ++pairs;
      if (gt.same_identity(query_ids[i], e.id)) ++correct;
    }
  }
  if (pairs == 0) return {0, std::nullopt};
  return {pairs, static_cast<double>(correct) / static_cast<double>(pairs)};
}

namespace detail {

struct FrameRef {
  std::int64_t tracklet_id;
  std::size_t frame_index;
};

inline std::vector<FrameRef> flatten_frames(const TrackletDataset& ds) {
  std::vector<FrameRef> frames;
  frames.reserve(ds.total_frames());
  for (const Tracklet& t : ds.tracklets()) {
    for (std::size_t f = 0; f < t.frames.size(); ++f) frames.push_back({t.id, f});
  }
  return frames;
}

inline void log_neighbor_sets(TrainReport& report, int epoch, NeighborScope scope,
                              const std::vector<NeighborSet>& sets,
                              const std::vector<std::int64_t>& query_ids) {
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (const NeighborEntry& e : sets[i]) {
      report.neighbor_log.push_back({epoch, scope, query_ids[i], e.id, e.similarity});
    }
  }
}

}  // namespace detail

/**
 * The two-stage training loop.
 *
 * Per epoch: rebuild the per-camera neighbor sets and association weights
 * from the current bank; from stage 2 on, also the cross-camera sets. Then
 * sweep all frames once in shuffled mini-batches. Per batch: embed every
 * frame, refresh the bank with the new embeddings (in batch order), then
 * evaluate the mode's loss per frame against the refreshed, constant bank
 * and take one mean-gradient SGD step.
 *
 * Modes: `stl` = selective matching + cross-camera term from stage 2;
 * `pcm_only` drops the cross-camera term; `knn_only` is `stl` with the
 * similarity floor disabled (pure k-NN association); `ce_baseline` swaps
 * the selective loss for a parametric per-camera softmax classifier.
 */
inline TrainResult run_training(const TrackletDataset& ds, const TrainConfig& cfg) {
  cfg.validate();

  std::mt19937_64 rng(cfg.seed);
  EmbedModel model(ds.dim(), cfg.embed_dim, cfg.hidden_width, rng);
  TrainReport report;
  if (cfg.epochs == 0) return {std::move(model), std::move(report)};

  MemoryBank bank(ds, model);
  const bool uses_pcm = cfg.loss_mode != LossMode::CeBaseline;
  const bool uses_ccm = cfg.loss_mode == LossMode::Stl || cfg.loss_mode == LossMode::KnnOnly;
  const std::optional<double> eps =
      cfg.loss_mode == LossMode::KnnOnly ? std::nullopt : std::optional<double>(cfg.epsilon);

  CameraClassifier classifier;
  if (cfg.loss_mode == LossMode::CeBaseline) classifier = CameraClassifier(ds, cfg.embed_dim);

  const std::vector<detail::FrameRef> frames = detail::flatten_frames(ds);
  const GroundTruth& gt = ds.ground_truth();

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const bool stage2 = epoch >= cfg.stage2_start_epoch;

    // --- epoch head: association from the current bank snapshot ---
    std::vector<SoftTarget> targets(ds.tracklets().size());
    std::vector<NeighborSet> per_camera_sets;   // concatenated across cameras
    std::vector<std::int64_t> per_camera_ids;
    for (int m = 0; m < ds.cameras(); ++m) {
      auto sets = build_camera_neighbor_sets(bank, m, cfg.k, eps);
      const auto& ids = bank.camera_ids(m);
      if (uses_pcm) {
        for (std::size_t i = 0; i < sets.size(); ++i) {
          WeightRow row = association_weights(ids[i], 1.0, sets[i]);
          targets[static_cast<std::size_t>(ids[i])] = to_soft_target(row, bank, m);
        }
      }
      per_camera_ids.insert(per_camera_ids.end(), ids.begin(), ids.end());
      std::move(sets.begin(), sets.end(), std::back_inserter(per_camera_sets));
    }
    detail::log_neighbor_sets(report, epoch, NeighborScope::PerCamera, per_camera_sets,
                              per_camera_ids);

    std::vector<NeighborSet> cross_sets;
    std::vector<std::int64_t> all_ids(ds.tracklets().size());
    std::iota(all_ids.begin(), all_ids.end(), std::int64_t{0});
    const bool build_cross = stage2 && uses_ccm;
    if (build_cross) {
      cross_sets = build_cross_neighbor_sets(bank, cfg.k, eps);
      detail::log_neighbor_sets(report, epoch, NeighborScope::CrossCamera, cross_sets,
                                all_ids);
    }

    EpochStats stats;
    stats.epoch = epoch;
    std::tie(stats.per_camera_pair_count, stats.per_camera_pair_precision) =
        assoc_diagnostics(per_camera_sets, per_camera_ids, gt);
    if (build_cross) {
      std::tie(stats.cross_pair_count, stats.cross_pair_precision) =
          assoc_diagnostics(cross_sets, all_ids, gt);
    }

    // --- batch sweep ---
    double pcm_sum = 0.0;
    double ccm_sum = 0.0;
    std::size_t frame_count = 0;
    const auto batches = make_epoch_batches(frames.size(), cfg.batch_size, rng);
    for (std::size_t b = 0; b < batches.size(); ++b) {
      const auto& batch = batches[b];

      std::vector<ForwardCache> caches(batch.size());
      for (std::size_t i = 0; i < batch.size(); ++i) {
        const detail::FrameRef& ref = frames[batch[i]];
        const Frame& frame = ds.tracklet(ref.tracklet_id).frames[ref.frame_index];
        model.forward(std::span<const float>(frame.raw), &caches[i]);
      }
      for (std::size_t i = 0; i < batch.size(); ++i) {
        bank.update(frames[batch[i]].tracklet_id, caches[i].output);
      }

      Gradients grads = model.zero_gradients();
      std::vector<std::vector<double>> classifier_grads;
      if (cfg.loss_mode == LossMode::CeBaseline) {
        classifier_grads.resize(static_cast<std::size_t>(ds.cameras()));
        for (int m = 0; m < ds.cameras(); ++m) {
          classifier_grads[static_cast<std::size_t>(m)].assign(
              classifier.labels(m) * static_cast<std::size_t>(cfg.embed_dim), 0.0);
        }
      }

      for (std::size_t i = 0; i < batch.size(); ++i) {
        const detail::FrameRef& ref = frames[batch[i]];
        const Tracklet& t = ds.tracklet(ref.tracklet_id);
        const FeatureVector& y = caches[i].output;

        double frame_pcm = 0.0;
        double frame_ccm = 0.0;
        FeatureVector grad_y(y.size(), 0.0);
        if (cfg.loss_mode == LossMode::CeBaseline) {
          auto res = classifier.ce_loss(y, t.camera, static_cast<std::size_t>(t.label));
          frame_pcm = res.loss;
          grad_y = std::move(res.grad_x);
          auto& cg = classifier_grads[static_cast<std::size_t>(t.camera)];
          for (std::size_t j = 0; j < cg.size(); ++j) cg[j] += res.grad_w[j];
        } else {
          auto pcm = pcm_loss(y, bank.camera_bank(t.camera),
                              targets[static_cast<std::size_t>(t.id)], cfg.tau);
          frame_pcm = pcm.loss;
          grad_y = std::move(pcm.grad_x);
          if (build_cross) {
            auto ccm = ccm_loss(y, cross_sets[static_cast<std::size_t>(t.id)], bank);
            frame_ccm = ccm.loss;
            add_scaled(grad_y, ccm.grad_x, cfg.lambda);
          }
        }

        if (!std::isfinite(frame_pcm) || !std::isfinite(frame_ccm) ||
            !all_finite(std::span<const double>(grad_y))) {
          std::ostringstream msg;
          msg << "training diverged: non-finite loss at epoch " << epoch << ", batch " << b
              << ", frame of tracklet " << t.id << " (pcm/ce=" << frame_pcm
              << ", ccm=" << frame_ccm << ")";
          throw TrainingDiverged(msg.str());
        }

        pcm_sum += frame_pcm;
        ccm_sum += frame_ccm;
        ++frame_count;
        grads.add(model.backward(caches[i], grad_y));
      }

      const double inv = 1.0 / static_cast<double>(batch.size());
      grads.scale(inv);
      model.apply_gradients(grads, cfg.learning_rate);
      if (cfg.loss_mode == LossMode::CeBaseline) {
        for (int m = 0; m < ds.cameras(); ++m) {
          auto& cg = classifier_grads[static_cast<std::size_t>(m)];
          for (double& g : cg) g *= inv;
          classifier.apply_gradients(m, cg, cfg.learning_rate);
        }
      }
    }

    stats.mean_pcm_loss = frame_count ? pcm_sum / static_cast<double>(frame_count) : 0.0;
    stats.mean_ccm_loss =
        build_cross && frame_count ? ccm_sum / static_cast<double>(frame_count) : 0.0;
    report.epochs.push_back(stats);
  }

  return {std::move(model), std::move(report)};
}

}  // namespace stlearn
