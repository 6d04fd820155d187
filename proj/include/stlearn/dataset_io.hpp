#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "stlearn/binio.hpp"
#include "stlearn/core.hpp"
#include "stlearn/jsonio.hpp"
#include "stlearn/version.hpp"

namespace stlearn {

/**
 * On-disk dataset layout: a directory holding
 *   manifest.json  — structure (cameras, dim, per-tracklet camera/frame
 *                    counts, optional ground-truth identity)
 *   features.bin   — all frame features as little-endian f32, concatenated
 *                    in manifest order
 *
 * identity = -1 records a known distractor; an absent identity field means
 * the identity is simply unknown. Payload size must match the manifest
 * exactly; trailing or missing bytes are errors.
 */

inline std::filesystem::path manifest_path_of(const std::filesystem::path& path) {
  if (std::filesystem::is_directory(path)) return path / "manifest.json";
  return path;
}

inline void save_dataset(const TrackletDataset& ds, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  Json manifest;
  manifest["version"] = kDatasetFormatVersion;
  manifest["cameras"] = ds.cameras();
  manifest["dim"] = ds.dim();
  Json tracklets = Json::array();
  std::vector<unsigned char> payload;
  payload.reserve(ds.total_frames() * static_cast<std::size_t>(ds.dim()) * 4);
  const GroundTruth& gt = ds.ground_truth();
  for (const Tracklet& t : ds.tracklets()) {
    Json entry;
    entry["camera"] = t.camera;
    entry["num_frames"] = t.frames.size();
    const auto& identity = gt.tracklet_identity[static_cast<std::size_t>(t.id)];
    if (identity.has_value()) entry["identity"] = *identity;
    tracklets.push_back(std::move(entry));
    for (const Frame& f : t.frames) {
      append_f32_span_le(payload, std::span<const float>(f.raw));
    }
  }
  manifest["tracklets"] = std::move(tracklets);

  {
    std::ofstream os(dir / "manifest.json");
    if (!os) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
    os << manifest.dump(2) << '\n';
  }
  {
    std::ofstream os(dir / "features.bin", std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (dir / "features.bin").string());
    write_bytes(os, payload);
  }
}

inline TrackletDataset load_dataset(const std::filesystem::path& path) {
  const std::filesystem::path manifest_file = manifest_path_of(path);
  std::ifstream is(manifest_file);
  if (!is) throw std::runtime_error("cannot open " + manifest_file.string());
  Json manifest = Json::parse(is);

  const std::string ctx = "dataset manifest";
  require_known_keys(manifest, ctx, {"version", "cameras", "dim", "tracklets"});
  const int version = require_field(manifest, ctx, "version").get<int>();
  if (version != kDatasetFormatVersion) {
    throw std::runtime_error(ctx + ": unsupported version " + std::to_string(version));
  }
  const int cameras = require_field(manifest, ctx, "cameras").get<int>();
  const int dim = require_field(manifest, ctx, "dim").get<int>();
  const Json& entries = require_field(manifest, ctx, "tracklets");
  if (!entries.is_array()) throw std::runtime_error(ctx + ": tracklets must be an array");

  std::vector<unsigned char> payload;
  {
    const std::filesystem::path bin = manifest_file.parent_path() / "features.bin";
    std::ifstream bs(bin, std::ios::binary);
    if (!bs) throw std::runtime_error("cannot open " + bin.string());
    payload = read_all_bytes(bs);
  }

  std::vector<Tracklet> tracklets;
  tracklets.reserve(entries.size());
  GroundTruth gt;
  gt.tracklet_identity.reserve(entries.size());
  std::size_t offset = 0;
  const std::size_t frame_bytes = static_cast<std::size_t>(dim) * 4;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const Json& e = entries[i];
    const std::string ectx = ctx + " tracklet " + std::to_string(i);
    require_known_keys(e, ectx, {"camera", "num_frames", "identity"});
    Tracklet t;
    t.camera = require_field(e, ectx, "camera").get<int>();
    const std::int64_t num_frames = require_field(e, ectx, "num_frames").get<std::int64_t>();
    if (num_frames < 1) throw std::runtime_error(ectx + ": num_frames must be >= 1");
    if (auto it = e.find("identity"); it != e.end()) {
      const std::int64_t identity = it->get<std::int64_t>();
      if (identity < GroundTruth::kDistractor) {
        throw std::runtime_error(ectx + ": identity must be >= -1");
      }
      gt.tracklet_identity.emplace_back(identity);
    } else {
      gt.tracklet_identity.emplace_back(std::nullopt);
    }
    t.frames.resize(static_cast<std::size_t>(num_frames));
    for (Frame& f : t.frames) {
      if (offset + frame_bytes > payload.size()) {
        throw std::runtime_error("features.bin is shorter than the manifest requires");
      }
      f.raw = f32_vector_from_le(
          std::span<const unsigned char>(payload.data() + offset, frame_bytes));
      offset += frame_bytes;
    }
    tracklets.push_back(std::move(t));
  }
  if (offset != payload.size()) {
    throw std::runtime_error("features.bin is longer than the manifest requires");
  }

  return TrackletDataset(cameras, dim, std::move(tracklets), std::move(gt));
}

}  // namespace stlearn
