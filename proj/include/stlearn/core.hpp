#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stlearn/vec.hpp"

namespace stlearn {

/// One frame of a tracklet: the raw (pre-embedding) feature as it arrives
/// from upstream or from the synthetic generator. Raw values are kept in f32,
/// matching the on-disk payload bit for bit.
struct Frame {
  std::vector<float> raw;
  std::int64_t tracklet_id = -1;
};

/// A short single-camera sequence of frames. `label` is the automatically
/// assigned class index, unique and contiguous within the tracklet's camera.
struct Tracklet {
  std::int64_t id = -1;   // global index in dataset order
  int camera = 0;         // m in [0, M)
  std::int64_t label = -1;
  std::vector<Frame> frames;
};

/**
 * Ground-truth identities, kept apart from the training-facing types.
 * Training code never receives this view; evaluation and the association
 * diagnostics do. Identity kDistractor marks a tracklet with no valid
 * identity (e.g. a non-person track) — it never matches anything.
 */
struct GroundTruth {
  static constexpr std::int64_t kDistractor = -1;

  std::vector<std::optional<std::int64_t>> tracklet_identity;  // by global id

  bool known(std::int64_t tracklet_id) const {
    const auto& v = tracklet_identity.at(static_cast<std::size_t>(tracklet_id));
    return v.has_value() && *v >= 0;
  }

  bool same_identity(std::int64_t a, std::int64_t b) const {
    return known(a) && known(b) &&
           *tracklet_identity[static_cast<std::size_t>(a)] ==
               *tracklet_identity[static_cast<std::size_t>(b)];
  }
};

/**
 * Immutable container for a multi-camera tracklet dataset.
 *
 * Construction validates and indexes: global ids and per-camera labels are
 * (re)assigned in dataset order, so labels per camera always form the
 * contiguous range [0, N^m). After construction the dataset never changes,
 * so concurrent readers need no synchronization.
 */
class TrackletDataset {
 public:
  TrackletDataset() = default;

  TrackletDataset(int cameras, int dim, std::vector<Tracklet> tracklets,
                  GroundTruth ground_truth)
      : cameras_(cameras),
        dim_(dim),
        tracklets_(std::move(tracklets)),
        gt_(std::move(ground_truth)) {
    validate_and_index();
  }

  int cameras() const { return cameras_; }
  int dim() const { return dim_; }

  const std::vector<Tracklet>& tracklets() const { return tracklets_; }

  const Tracklet& tracklet(std::int64_t id) const {
    return tracklets_.at(static_cast<std::size_t>(id));
  }

  /// Global ids of camera m's tracklets, in label order.
  const std::vector<std::int64_t>& camera_tracklets(int camera) const {
    return by_camera_.at(static_cast<std::size_t>(camera));
  }

  std::size_t total_frames() const { return total_frames_; }

  /// Evaluation-only view; never consulted by training code.
  const GroundTruth& ground_truth() const { return gt_; }

 private:
  void validate_and_index() {
    if (cameras_ < 1) throw std::invalid_argument("dataset: cameras must be >= 1");
    if (dim_ < 1) throw std::invalid_argument("dataset: dim must be >= 1");
    if (!gt_.tracklet_identity.empty() &&
        gt_.tracklet_identity.size() != tracklets_.size()) {
      throw std::invalid_argument("dataset: ground-truth size mismatch");
    }
    if (gt_.tracklet_identity.empty()) {
      gt_.tracklet_identity.assign(tracklets_.size(), std::nullopt);
    }

    by_camera_.assign(static_cast<std::size_t>(cameras_), {});
    total_frames_ = 0;
    for (std::size_t i = 0; i < tracklets_.size(); ++i) {
      Tracklet& t = tracklets_[i];
      if (t.camera < 0 || t.camera >= cameras_) {
        throw std::invalid_argument("dataset: camera index out of range for tracklet " +
                                    std::to_string(i));
      }
      if (t.frames.empty()) {
        throw std::invalid_argument("dataset: tracklet " + std::to_string(i) +
                                    " has no frames");
      }
      t.id = static_cast<std::int64_t>(i);
      t.label = static_cast<std::int64_t>(by_camera_[static_cast<std::size_t>(t.camera)].size());
      by_camera_[static_cast<std::size_t>(t.camera)].push_back(t.id);
      for (Frame& f : t.frames) {
        if (static_cast<int>(f.raw.size()) != dim_) {
          throw std::invalid_argument("dataset: frame dimension mismatch in tracklet " +
                                      std::to_string(i));
        }
        if (!all_finite(std::span<const float>(f.raw))) {
          throw std::invalid_argument("dataset: non-finite feature value in tracklet " +
                                      std::to_string(i));
        }
        f.tracklet_id = t.id;
      }
      total_frames_ += t.frames.size();
    }
  }

  int cameras_ = 0;
  int dim_ = 0;
  std::vector<Tracklet> tracklets_;
  std::vector<std::vector<std::int64_t>> by_camera_;
  std::size_t total_frames_ = 0;
  GroundTruth gt_;
};

}  // namespace stlearn
