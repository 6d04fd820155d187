#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <map>
#include <string>

#include "stlearn/jsonio.hpp"
#include "stlearn/report_io.hpp"
#include "stlearn/version.hpp"

namespace stlearn {

inline std::string iso8601_utc(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
  return buf;
}

/// Provenance record of one CLI run. Timestamps live here and only here —
/// report files must stay byte-identical across reruns.
struct RunManifest {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string started_at;
  std::string finished_at;
  std::map<std::string, std::string> artifacts;  // name -> path relative to the run dir
  std::string status = "ok";

  Json to_json() const {
    Json j;
    j["command"] = command;
    j["config_hash"] = config_hash;
    j["seed"] = seed;
    j["software_version"] = std::string(kVersion);
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    j["artifacts"] = artifacts;
    j["status"] = status;
    return j;
  }

  void write(const std::filesystem::path& run_dir) const {
    write_text_file(run_dir / "run_manifest.json", to_json().dump(2) + "\n");
  }
};

}  // namespace stlearn
