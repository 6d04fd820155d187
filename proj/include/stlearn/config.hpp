#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "stlearn/jsonio.hpp"

namespace stlearn {

struct IntRange {
  int min = 0;
  int max = 0;
};

/// Knobs of the synthetic tracklet generator. Defaults describe a mid-size
/// four-camera scene that trains in seconds; every run must pin `seed`.
struct GenConfig {
  std::uint64_t seed = 0;
  int cameras = 4;
  int identities = 50;
  int dim = 32;
  IntRange tracklets_per_identity_per_camera{1, 3};
  IntRange frames_per_tracklet{5, 15};
  double noise_sigma = 0.1;
  // How far each camera drags its observations toward a camera-specific
  // anchor direction, in [0, 1]. 0 = no camera bias, 1 = camera bias only.
  double camera_shift = 0.8;
  double id_switch_rate = 0.1;
  double distractor_rate = 0.1;
  double multi_person_rate = 0.1;
  double occlusion_rate = 0.1;
  // Fraction of identities that appear in a single camera only.
  double unmatched_fraction = 0.2;

  void validate() const {
    if (cameras < 2) throw std::invalid_argument("gen config: cameras must be >= 2");
    if (identities < 2) throw std::invalid_argument("gen config: identities must be >= 2");
    if (dim < 2) throw std::invalid_argument("gen config: dim must be >= 2");
    auto check_range = [](const IntRange& r, const std::string& name, int lo) {
      if (r.min < lo || r.max < r.min) {
        throw std::invalid_argument("gen config: invalid range for " + name);
      }
    };
    check_range(tracklets_per_identity_per_camera, "tracklets_per_identity_per_camera", 0);
    check_range(frames_per_tracklet, "frames_per_tracklet", 1);
    if (noise_sigma < 0) throw std::invalid_argument("gen config: noise_sigma must be >= 0");
    auto check_unit = [](double v, const std::string& name) {
      if (v < 0.0 || v > 1.0) {
        throw std::invalid_argument("gen config: " + name + " must be in [0, 1]");
      }
    };
    check_unit(camera_shift, "camera_shift");
    check_unit(id_switch_rate, "corruption.id_switch");
    check_unit(distractor_rate, "corruption.distractor");
    check_unit(multi_person_rate, "corruption.multi_person");
    check_unit(occlusion_rate, "corruption.occlusion");
    check_unit(unmatched_fraction, "unmatched_fraction");
  }
};

enum class LossMode { Stl, CeBaseline, PcmOnly, KnnOnly };

inline std::string to_string(LossMode mode) {
  switch (mode) {
    case LossMode::Stl: return "stl";
    case LossMode::CeBaseline: return "ce_baseline";
    case LossMode::PcmOnly: return "pcm_only";
    case LossMode::KnnOnly: return "knn_only";
  }
  throw std::logic_error("unreachable loss mode");
}

inline LossMode loss_mode_from_string(const std::string& s) {
  if (s == "stl") return LossMode::Stl;
  if (s == "ce_baseline") return LossMode::CeBaseline;
  if (s == "pcm_only") return LossMode::PcmOnly;
  if (s == "knn_only") return LossMode::KnnOnly;
  throw std::runtime_error("unknown loss_mode \"" + s + "\"");
}

/// Training hyperparameters. Defaults are the published operating point;
/// small synthetic scenes typically want a larger learning rate and a
/// smaller batch than these.
struct TrainConfig {
  std::uint64_t seed = 0;
  int epochs = 20;
  int stage2_start_epoch = 10;  // 1-based epoch where cross-camera terms kick in
  int batch_size = 384;
  double learning_rate = 3e-5;
  int k = 1;
  double epsilon = 0.7;
  double tau = 0.1;
  double lambda = 10.0;
  LossMode loss_mode = LossMode::Stl;
  int embed_dim = 128;
  int hidden_width = 0;  // 0 = linear embedding, >0 = one tanh hidden layer

  void validate() const {
    if (epochs < 0) throw std::invalid_argument("train config: epochs must be >= 0");
    if (stage2_start_epoch < 1) {
      throw std::invalid_argument("train config: stage2_start_epoch must be >= 1");
    }
    if (batch_size < 1) throw std::invalid_argument("train config: batch_size must be >= 1");
    if (!(learning_rate > 0)) {
      throw std::invalid_argument("train config: learning_rate must be > 0");
    }
    if (k < 1) throw std::invalid_argument("train config: k must be >= 1");
    if (epsilon < -1.0 || epsilon > 1.0) {
      throw std::invalid_argument("train config: epsilon must be in [-1, 1]");
    }
    if (!(tau > 0)) throw std::invalid_argument("train config: tau must be > 0");
    if (lambda < 0) throw std::invalid_argument("train config: lambda must be >= 0");
    if (embed_dim < 1) throw std::invalid_argument("train config: embed_dim must be >= 1");
    if (hidden_width < 0) {
      throw std::invalid_argument("train config: hidden_width must be >= 0");
    }
  }
};

// --- JSON (strict keys: unknown keys are rejected by name) ---

inline Json to_json(const GenConfig& c) {
  Json j;
  j["seed"] = c.seed;
  j["cameras"] = c.cameras;
  j["identities"] = c.identities;
  j["dim"] = c.dim;
  j["tracklets_per_identity_per_camera"] = {{"min", c.tracklets_per_identity_per_camera.min},
                                            {"max", c.tracklets_per_identity_per_camera.max}};
  j["frames_per_tracklet"] = {{"min", c.frames_per_tracklet.min},
                              {"max", c.frames_per_tracklet.max}};
  j["noise_sigma"] = c.noise_sigma;
  j["camera_shift"] = c.camera_shift;
  j["corruption"] = {{"id_switch", c.id_switch_rate},
                     {"distractor", c.distractor_rate},
                     {"multi_person", c.multi_person_rate},
                     {"occlusion", c.occlusion_rate}};
  j["unmatched_fraction"] = c.unmatched_fraction;
  return j;
}

inline IntRange int_range_from_json(const Json& j, const std::string& ctx) {
  require_known_keys(j, ctx, {"min", "max"});
  IntRange r;
  r.min = require_field(j, ctx, "min").get<int>();
  r.max = require_field(j, ctx, "max").get<int>();
  return r;
}

inline GenConfig gen_config_from_json(const Json& j) {
  const std::string ctx = "gen config";
  require_known_keys(j, ctx,
                     {"seed", "cameras", "identities", "dim",
                      "tracklets_per_identity_per_camera", "frames_per_tracklet",
                      "noise_sigma", "camera_shift", "corruption", "unmatched_fraction"});
  GenConfig c;
  c.seed = require_field(j, ctx, "seed").get<std::uint64_t>();
  if (auto it = j.find("cameras"); it != j.end()) c.cameras = it->get<int>();
  if (auto it = j.find("identities"); it != j.end()) c.identities = it->get<int>();
  if (auto it = j.find("dim"); it != j.end()) c.dim = it->get<int>();
  if (auto it = j.find("tracklets_per_identity_per_camera"); it != j.end()) {
    c.tracklets_per_identity_per_camera =
        int_range_from_json(*it, ctx + ".tracklets_per_identity_per_camera");
  }
  if (auto it = j.find("frames_per_tracklet"); it != j.end()) {
    c.frames_per_tracklet = int_range_from_json(*it, ctx + ".frames_per_tracklet");
  }
  if (auto it = j.find("noise_sigma"); it != j.end()) c.noise_sigma = it->get<double>();
  if (auto it = j.find("camera_shift"); it != j.end()) c.camera_shift = it->get<double>();
  if (auto it = j.find("corruption"); it != j.end()) {
    const std::string cctx = ctx + ".corruption";
    require_known_keys(*it, cctx, {"id_switch", "distractor", "multi_person", "occlusion"});
    if (auto f = it->find("id_switch"); f != it->end()) c.id_switch_rate = f->get<double>();
    if (auto f = it->find("distractor"); f != it->end()) c.distractor_rate = f->get<double>();
    if (auto f = it->find("multi_person"); f != it->end()) {
      c.multi_person_rate = f->get<double>();
    }
    if (auto f = it->find("occlusion"); f != it->end()) c.occlusion_rate = f->get<double>();
  }
  if (auto it = j.find("unmatched_fraction"); it != j.end()) {
    c.unmatched_fraction = it->get<double>();
  }
  c.validate();
  return c;
}

inline Json to_json(const TrainConfig& c) {
  Json j;
  j["seed"] = c.seed;
  j["epochs"] = c.epochs;
  j["stage2_start_epoch"] = c.stage2_start_epoch;
  j["batch_size"] = c.batch_size;
  j["learning_rate"] = c.learning_rate;
  j["k"] = c.k;
  j["epsilon"] = c.epsilon;
  j["tau"] = c.tau;
  j["lambda"] = c.lambda;
  j["loss_mode"] = to_string(c.loss_mode);
  j["embed_dim"] = c.embed_dim;
  j["hidden_width"] = c.hidden_width;
  return j;
}

inline TrainConfig train_config_from_json(const Json& j) {
  const std::string ctx = "train config";
  require_known_keys(j, ctx,
                     {"seed", "epochs", "stage2_start_epoch", "batch_size", "learning_rate",
                      "k", "epsilon", "tau", "lambda", "loss_mode", "embed_dim",
                      "hidden_width"});
  TrainConfig c;
  c.seed = require_field(j, ctx, "seed").get<std::uint64_t>();
  if (auto it = j.find("epochs"); it != j.end()) c.epochs = it->get<int>();
  if (auto it = j.find("stage2_start_epoch"); it != j.end()) {
    c.stage2_start_epoch = it->get<int>();
  }
  if (auto it = j.find("batch_size"); it != j.end()) c.batch_size = it->get<int>();
  if (auto it = j.find("learning_rate"); it != j.end()) c.learning_rate = it->get<double>();
  if (auto it = j.find("k"); it != j.end()) c.k = it->get<int>();
  if (auto it = j.find("epsilon"); it != j.end()) c.epsilon = it->get<double>();
  if (auto it = j.find("tau"); it != j.end()) c.tau = it->get<double>();
  if (auto it = j.find("lambda"); it != j.end()) c.lambda = it->get<double>();
  if (auto it = j.find("loss_mode"); it != j.end()) {
    c.loss_mode = loss_mode_from_string(it->get<std::string>());
  }
  if (auto it = j.find("embed_dim"); it != j.end()) c.embed_dim = it->get<int>();
  if (auto it = j.find("hidden_width"); it != j.end()) c.hidden_width = it->get<int>();
  c.validate();
  return c;
}

/// Recursive overlay of `override` onto `base` (objects merge, everything
/// else replaces). Used by the ablation grid.
inline Json apply_override(Json base, const Json& override_values) {
  if (!override_values.is_object() || !base.is_object()) return override_values;
  for (const auto& item : override_values.items()) {
    if (base.contains(item.key())) {
      base[item.key()] = apply_override(base[item.key()], item.value());
    } else {
      base[item.key()] = item.value();
    }
  }
  return base;
}

/// FNV-1a over the canonical (key-sorted) serialization; stable across runs
/// on any platform, used to stamp run manifests.
inline std::string config_hash(const Json& j) {
  const std::string canonical = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  static const char* hex = "0123456789abcdef";
  for (int i = 0; i < 16; ++i) buf[i] = hex[(h >> (60 - 4 * i)) & 0xf];
  buf[16] = '\0';
  return std::string(buf);
}

}  // namespace stlearn
