#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "stlearn/eval.hpp"
#include "stlearn/jsonio.hpp"
#include "stlearn/trainer.hpp"

namespace stlearn {

/// Shortest decimal string that round-trips the exact double. Keeps report
/// files deterministic without committing to a fixed digit count.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, end);
}

inline const char* to_string(NeighborScope scope) {
  return scope == NeighborScope::PerCamera ? "per_camera" : "cross_camera";
}

// --- training report ---

inline std::string train_report_csv(const TrainReport& report) {
  std::ostringstream os;
  os << "epoch,mean_pcm_loss,mean_ccm_loss,cross_pair_count,cross_pair_precision,"
        "per_camera_pair_count,per_camera_pair_precision\n";
  for (const EpochStats& e : report.epochs) {
    os << e.epoch << ',' << format_double(e.mean_pcm_loss) << ','
       << format_double(e.mean_ccm_loss) << ',' << e.cross_pair_count << ',';
    if (e.cross_pair_precision) os << format_double(*e.cross_pair_precision);
    os << ',' << e.per_camera_pair_count << ',';
    if (e.per_camera_pair_precision) os << format_double(*e.per_camera_pair_precision);
    os << '\n';
  }
  return os.str();
}

inline std::string neighbor_log_csv(const TrainReport& report) {
  std::ostringstream os;
  os << "epoch,scope,query_id,member_id,similarity\n";
  for (const NeighborRecord& r : report.neighbor_log) {
    os << r.epoch << ',' << to_string(r.scope) << ',' << r.query_id << ',' << r.member_id
       << ',' << format_double(r.similarity) << '\n';
  }
  return os.str();
}

inline Json train_report_json(const TrainReport& report) {
  Json epochs = Json::array();
  for (const EpochStats& e : report.epochs) {
    Json row;
    row["epoch"] = e.epoch;
    row["mean_pcm_loss"] = e.mean_pcm_loss;
    row["mean_ccm_loss"] = e.mean_ccm_loss;
    row["cross_pair_count"] = e.cross_pair_count;
    row["cross_pair_precision"] =
        e.cross_pair_precision ? Json(*e.cross_pair_precision) : Json(nullptr);
    row["per_camera_pair_count"] = e.per_camera_pair_count;
    row["per_camera_pair_precision"] =
        e.per_camera_pair_precision ? Json(*e.per_camera_pair_precision) : Json(nullptr);
    epochs.push_back(std::move(row));
  }
  Json j;
  j["epochs"] = std::move(epochs);
  return j;
}

// --- retrieval metrics ---

inline Json metrics_json(const RetrievalResult& r) {
  Json j;
  j["cmc"] = r.cmc;
  j["map"] = r.map;
  j["num_queries"] = r.per_query_ap.size();
  return j;
}

inline std::string metrics_csv(const RetrievalResult& r) {
  std::ostringstream os;
  os << "metric,value\n";
  for (std::size_t k = 0; k < r.cmc.size(); ++k) {
    os << "rank" << (k + 1) << ',' << format_double(r.cmc[k]) << '\n';
  }
  os << "map," << format_double(r.map) << '\n';
  os << "num_queries," << r.per_query_ap.size() << '\n';
  return os.str();
}

// --- ablation comparison table ---

inline std::string comparison_csv(const std::vector<AblationRow>& rows) {
  std::ostringstream os;
  os << "name,status,rank1,rank5,rank20,map\n";
  for (const AblationRow& row : rows) {
    os << row.name << ',' << (row.ok ? "ok" : "failed") << ',';
    if (row.ok) {
      const auto& cmc = row.metrics.cmc;
      auto rank = [&cmc](std::size_t k) {
        return k <= cmc.size() ? format_double(cmc[k - 1]) : std::string();
      };
      os << rank(1) << ',' << rank(5) << ',' << rank(20) << ','
         << format_double(row.metrics.map);
    } else {
      os << ",,,";
    }
    os << '\n';
  }
  return os.str();
}

inline void write_text_file(const std::filesystem::path& file, const std::string& content) {
  std::ofstream os(file, std::ios::binary);  // binary: no newline translation anywhere
  if (!os) throw std::runtime_error("cannot write " + file.string());
  os.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!os) throw std::runtime_error("write failed for " + file.string());
}

inline std::string read_text_file(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + file.string());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace stlearn
