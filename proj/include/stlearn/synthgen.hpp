#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "stlearn/config.hpp"
#include "stlearn/core.hpp"
#include "stlearn/rng.hpp"

namespace stlearn {

enum class Corruption { None, IdSwitch, Distractor, MultiPerson, Occlusion };

struct GenStats {
  std::size_t clean = 0;
  std::size_t id_switch = 0;
  std::size_t distractor = 0;
  std::size_t multi_person = 0;
  std::size_t occlusion = 0;
  std::size_t unmatched_identities = 0;
};

namespace detail {

/// Spherical interpolation between unit vectors; t=0 gives a, t=1 gives b.
/// Near-parallel inputs fall back to normalized linear interpolation.
inline FeatureVector slerp(const FeatureVector& a, const FeatureVector& b, double t) {
  const double c = std::clamp(dot(a, b), -1.0, 1.0);
  const double theta = std::acos(c);
  FeatureVector out(a.size());
  if (std::sin(theta) < 1e-8) {
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = (1.0 - t) * a[i] + t * b[i];
  } else {
    const double wa = std::sin((1.0 - t) * theta) / std::sin(theta);
    const double wb = std::sin(t * theta) / std::sin(theta);
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = wa * a[i] + wb * b[i];
  }
  normalize_unit(out);
  return out;
}

inline std::vector<float> to_f32(const FeatureVector& v) {
  std::vector<float> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i]);
  return out;
}

}  // namespace detail

/**
 * Synthetic multi-camera tracklet data.
 *
 * Each identity gets a unit-sphere prototype; each camera an anchor
 * direction it pulls observations toward (slerp by camera_shift), modeling
 * the camera-conditional appearance gap. Frames add isotropic gaussian
 * noise and are renormalized. A tracklet may then be corrupted in one of
 * four ways, mirroring what real trackers produce:
 *   id_switch    — a suffix of the frames belongs to another identity
 *   distractor   — the whole tracklet is background clutter (identity -1)
 *   multi_person — every frame mixes the identity with a second person
 *   occlusion    — random frames get 5x noise
 * A configurable fraction of identities appears in only one camera, so
 * some tracklets have no cross-camera positive at all.
 *
 * Layout of randomness: one structure stream fixes prototypes, anchors and
 * tracklet counts; every tracklet then draws its content from its own
 * substream, so tracklet i's frames do not depend on how many draws
 * tracklet i-1 consumed.
 */
inline TrackletDataset generate(const GenConfig& cfg, GenStats* stats = nullptr) {
  cfg.validate();

  std::mt19937_64 structure(derive_seed(cfg.seed, 0));

  std::vector<FeatureVector> prototypes;
  prototypes.reserve(static_cast<std::size_t>(cfg.identities));
  for (int i = 0; i < cfg.identities; ++i) {
    prototypes.push_back(sample_unit_sphere(structure, cfg.dim));
  }
  std::vector<FeatureVector> anchors;
  anchors.reserve(static_cast<std::size_t>(cfg.cameras));
  for (int m = 0; m < cfg.cameras; ++m) {
    anchors.push_back(sample_unit_sphere(structure, cfg.dim));
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> camera_pick(0, cfg.cameras - 1);
  std::uniform_int_distribution<int> count_pick(cfg.tracklets_per_identity_per_camera.min,
                                                cfg.tracklets_per_identity_per_camera.max);

  struct Slot {
    int identity;
    int camera;
  };
  std::vector<Slot> slots;
  std::size_t unmatched_count = 0;
  for (int i = 0; i < cfg.identities; ++i) {
    const bool unmatched = unit(structure) < cfg.unmatched_fraction;
    const int home = camera_pick(structure);
    if (unmatched) ++unmatched_count;
    for (int m = 0; m < cfg.cameras; ++m) {
      int count = count_pick(structure);  // always drawn, to keep the stream aligned
      if (unmatched) count = (m == home) ? std::max(1, count) : 0;
      for (int t = 0; t < count; ++t) slots.push_back({i, m});
    }
  }

  std::vector<Tracklet> tracklets;
  tracklets.reserve(slots.size());
  GroundTruth gt;
  gt.tracklet_identity.reserve(slots.size());
  GenStats local;
  local.unmatched_identities = unmatched_count;

  std::uniform_int_distribution<int> frames_pick(cfg.frames_per_tracklet.min,
                                                 cfg.frames_per_tracklet.max);
  std::uniform_int_distribution<int> partner_pick(0, cfg.identities - 2);

  for (std::size_t idx = 0; idx < slots.size(); ++idx) {
    const Slot slot = slots[idx];
    std::mt19937_64 rng(derive_seed(cfg.seed, 1 + idx));

    const int num_frames = frames_pick(rng);
    // One corruption at most, checked in a fixed order.
    const double u_distractor = unit(rng);
    const double u_switch = unit(rng);
    const double u_multi = unit(rng);
    const double u_occlusion = unit(rng);
    Corruption mode = Corruption::None;
    if (u_distractor < cfg.distractor_rate) {
      mode = Corruption::Distractor;
    } else if (u_switch < cfg.id_switch_rate) {
      mode = Corruption::IdSwitch;
    } else if (u_multi < cfg.multi_person_rate) {
      mode = Corruption::MultiPerson;
    } else if (u_occlusion < cfg.occlusion_rate) {
      mode = Corruption::Occlusion;
    }

    Tracklet t;
    t.camera = slot.camera;
    t.frames.reserve(static_cast<std::size_t>(num_frames));

    if (mode == Corruption::Distractor) {
      for (int f = 0; f < num_frames; ++f) {
        Frame frame;
        frame.raw = detail::to_f32(sample_unit_sphere(rng, cfg.dim));
        t.frames.push_back(std::move(frame));
      }
      gt.tracklet_identity.emplace_back(GroundTruth::kDistractor);
      ++local.distractor;
      tracklets.push_back(std::move(t));
      continue;
    }

    int partner = -1;
    if (mode == Corruption::IdSwitch || mode == Corruption::MultiPerson) {
      partner = partner_pick(rng);
      if (partner >= slot.identity) ++partner;  // uniform over identities != own
    }
    int switch_at = num_frames;  // first frame belonging to the partner
    if (mode == Corruption::IdSwitch) {
      if (num_frames < 2) {
        mode = Corruption::None;  // nothing to switch within a single frame
      } else {
        switch_at = std::uniform_int_distribution<int>(1, num_frames - 1)(rng);
      }
    }

    FeatureVector base = detail::slerp(prototypes[static_cast<std::size_t>(slot.identity)],
                                       anchors[static_cast<std::size_t>(slot.camera)],
                                       cfg.camera_shift);
    FeatureVector partner_base;
    if (mode == Corruption::IdSwitch) {
      partner_base = detail::slerp(prototypes[static_cast<std::size_t>(partner)],
                                   anchors[static_cast<std::size_t>(slot.camera)],
                                   cfg.camera_shift);
    } else if (mode == Corruption::MultiPerson) {
      FeatureVector mix(static_cast<std::size_t>(cfg.dim), 0.0);
      add_scaled(mix, prototypes[static_cast<std::size_t>(slot.identity)], 0.5);
      add_scaled(mix, prototypes[static_cast<std::size_t>(partner)], 0.5);
      normalize_unit(mix);
      base = detail::slerp(mix, anchors[static_cast<std::size_t>(slot.camera)],
                           cfg.camera_shift);
    }

    for (int f = 0; f < num_frames; ++f) {
      const FeatureVector& center =
          (mode == Corruption::IdSwitch && f >= switch_at) ? partner_base : base;
      double sigma = cfg.noise_sigma;
      if (mode == Corruption::Occlusion && unit(rng) < 0.5) sigma *= 5.0;
      FeatureVector v = center;
      if (sigma > 0) {
        FeatureVector noise = sample_gaussian(rng, cfg.dim, sigma);
        add_scaled(v, noise, 1.0);
      }
      normalize_unit(v);
      Frame frame;
      frame.raw = detail::to_f32(v);
      t.frames.push_back(std::move(frame));
    }

    gt.tracklet_identity.emplace_back(slot.identity);
    switch (mode) {
      case Corruption::None: ++local.clean; break;
      case Corruption::IdSwitch: ++local.id_switch; break;
      case Corruption::MultiPerson: ++local.multi_person; break;
      case Corruption::Occlusion: ++local.occlusion; break;
      case Corruption::Distractor: break;  // handled above
    }
    tracklets.push_back(std::move(t));
  }

  if (stats) *stats = local;
  return TrackletDataset(cfg.cameras, cfg.dim, std::move(tracklets), std::move(gt));
}

}  // namespace stlearn
