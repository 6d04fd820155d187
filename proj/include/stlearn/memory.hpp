#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "stlearn/core.hpp"
#include "stlearn/embed.hpp"
#include "stlearn/vec.hpp"

namespace stlearn {

/**
 * One representation per tracklet, grouped by camera and indexed by the
 * tracklet's per-camera label. Initialized as the normalized mean of the
 * embedded frames; refreshed online as z <- normalize((z + x) / 2) whenever
 * a frame x of the tracklet passes through a batch. Gradients never flow
 * into the bank — it is a constant from the loss's point of view.
 */
class MemoryBank {
 public:
  MemoryBank() = default;

  MemoryBank(const TrackletDataset& ds, const EmbedModel& model) {
    cameras_ = ds.cameras();
    banks_.resize(static_cast<std::size_t>(cameras_));
    ids_.resize(static_cast<std::size_t>(cameras_));
    locate_.resize(ds.tracklets().size());
    for (int m = 0; m < cameras_; ++m) {
      const auto& members = ds.camera_tracklets(m);
      banks_[static_cast<std::size_t>(m)].reserve(members.size());
      ids_[static_cast<std::size_t>(m)] = members;
      for (std::int64_t tid : members) {
        const Tracklet& t = ds.tracklet(tid);
        FeatureVector mean(static_cast<std::size_t>(model.out_dim()), 0.0);
        for (const Frame& f : t.frames) {
          add_scaled(mean, model.forward(std::span<const float>(f.raw)),
                     1.0 / static_cast<double>(t.frames.size()));
        }
        normalize_unit(mean);
        locate_[static_cast<std::size_t>(tid)] = {
            t.camera, static_cast<std::size_t>(banks_[static_cast<std::size_t>(m)].size())};
        banks_[static_cast<std::size_t>(m)].push_back(std::move(mean));
      }
    }
  }

  int cameras() const { return cameras_; }

  /// Representations of camera m, ordered by label.
  const std::vector<FeatureVector>& camera_bank(int camera) const {
    return banks_.at(static_cast<std::size_t>(camera));
  }

  /// Global tracklet ids of camera m, by label (parallel to camera_bank).
  const std::vector<std::int64_t>& camera_ids(int camera) const {
    return ids_.at(static_cast<std::size_t>(camera));
  }

  std::pair<int, std::size_t> locate(std::int64_t tracklet_id) const {
    if (tracklet_id < 0 || static_cast<std::size_t>(tracklet_id) >= locate_.size()) {
      throw std::out_of_range("memory bank: unknown tracklet id " +
                              std::to_string(tracklet_id));
    }
    return locate_[static_cast<std::size_t>(tracklet_id)];
  }

  const FeatureVector& representation(std::int64_t tracklet_id) const {
    const auto [camera, label] = locate(tracklet_id);
    return banks_[static_cast<std::size_t>(camera)][label];
  }

  /// Moving-average refresh with renormalization back onto the unit sphere.
  void update(std::int64_t tracklet_id, const FeatureVector& x) {
    const auto [camera, label] = locate(tracklet_id);
    FeatureVector& z = banks_[static_cast<std::size_t>(camera)][label];
    if (x.size() != z.size()) {
      throw std::invalid_argument("memory bank: update dimension mismatch");
    }
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = 0.5 * (z[i] + x[i]);
    normalize_unit(z);
  }

 private:
  int cameras_ = 0;
  std::vector<std::vector<FeatureVector>> banks_;       // [camera][label]
  std::vector<std::vector<std::int64_t>> ids_;          // [camera][label] -> global id
  std::vector<std::pair<int, std::size_t>> locate_;     // global id -> (camera, label)
};

}  // namespace stlearn
