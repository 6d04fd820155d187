// Command-line front end: generate / train / evaluate / ablate.
//
// Every command takes --out DIR, writes its artifacts there plus a
// run_manifest.json recording config hash, seed, software version and
// timestamps, and exits 0 only after re-reading what it wrote.

#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stlearn/stlearn.hpp"

namespace fs = std::filesystem;
using namespace stlearn;

namespace {

Json parse_json_file(const fs::path& file, const std::string& what) {
  std::ifstream is(file);
  if (!is) throw std::runtime_error("cannot open " + what + " " + file.string());
  try {
    return Json::parse(is);
  } catch (const std::exception& e) {
    throw std::runtime_error(what + " " + file.string() + ": " + e.what());
  }
}

RunManifest begin_manifest(const std::string& command, const Json& config,
                           std::uint64_t seed) {
  RunManifest m;
  m.command = command;
  m.config_hash = config_hash(config);
  m.seed = seed;
  m.started_at = iso8601_utc(std::chrono::system_clock::now());
  return m;
}

void finish_manifest(RunManifest& m, const fs::path& out_dir) {
  m.finished_at = iso8601_utc(std::chrono::system_clock::now());
  m.write(out_dir);
}

void apply_seed_override(Json& config, const std::optional<std::uint64_t>& seed) {
  if (seed) config["seed"] = *seed;
}

int cmd_generate(const fs::path& config_path, const fs::path& out_dir,
                 std::optional<std::uint64_t> seed) {
  Json cfg_json = parse_json_file(config_path, "config");
  apply_seed_override(cfg_json, seed);
  const GenConfig cfg = gen_config_from_json(cfg_json);

  fs::create_directories(out_dir);
  RunManifest manifest = begin_manifest("generate", to_json(cfg), cfg.seed);

  GenStats stats;
  TrackletDataset ds = generate(cfg, &stats);
  save_dataset(ds, out_dir);

  // validate: the written dataset must load back with the same shape
  TrackletDataset reloaded = load_dataset(out_dir);
  if (reloaded.tracklets().size() != ds.tracklets().size() ||
      reloaded.total_frames() != ds.total_frames()) {
    throw std::runtime_error("generated dataset failed reload validation");
  }

  manifest.artifacts["dataset_manifest"] = "manifest.json";
  manifest.artifacts["features"] = "features.bin";
  finish_manifest(manifest, out_dir);

  std::cout << "generated " << ds.tracklets().size() << " tracklets / " << ds.total_frames()
            << " frames across " << ds.cameras() << " cameras ("
            << stats.distractor << " distractor, " << stats.id_switch << " id-switch, "
            << stats.multi_person << " multi-person, " << stats.occlusion
            << " occluded)\n";
  return 0;
}

void write_train_artifacts(const fs::path& dir, const EmbedModel& model,
                           const TrainReport& report) {
  save_model(model, dir / "checkpoint.bin");
  write_text_file(dir / "report.csv", train_report_csv(report));
  write_text_file(dir / "report.json", train_report_json(report).dump(2) + "\n");
  write_text_file(dir / "neighbors.csv", neighbor_log_csv(report));
}

void validate_train_artifacts(const fs::path& dir, int expected_epochs) {
  load_model(dir / "checkpoint.bin");
  Json report = parse_json_file(dir / "report.json", "report");
  if (!report.contains("epochs") ||
      static_cast<int>(report["epochs"].size()) != expected_epochs) {
    throw std::runtime_error("report.json failed validation in " + dir.string());
  }
  if (read_text_file(dir / "report.csv").empty() ||
      read_text_file(dir / "neighbors.csv").empty()) {
    throw std::runtime_error("report CSVs failed validation in " + dir.string());
  }
}

int cmd_train(const fs::path& dataset_path, const fs::path& config_path,
              const fs::path& out_dir, std::optional<std::uint64_t> seed) {
  Json cfg_json = parse_json_file(config_path, "config");
  apply_seed_override(cfg_json, seed);
  const TrainConfig cfg = train_config_from_json(cfg_json);
  const TrackletDataset ds = load_dataset(dataset_path);

  fs::create_directories(out_dir);
  RunManifest manifest = begin_manifest("train", to_json(cfg), cfg.seed);

  TrainResult result = run_training(ds, cfg);
  write_train_artifacts(out_dir, result.model, result.report);
  validate_train_artifacts(out_dir, cfg.epochs);

  manifest.artifacts["checkpoint"] = "checkpoint.bin";
  manifest.artifacts["report_csv"] = "report.csv";
  manifest.artifacts["report_json"] = "report.json";
  manifest.artifacts["neighbors_csv"] = "neighbors.csv";
  finish_manifest(manifest, out_dir);

  if (!result.report.epochs.empty()) {
    const EpochStats& last = result.report.epochs.back();
    std::cout << "trained " << cfg.epochs << " epochs (" << to_string(cfg.loss_mode)
              << "); final mean loss " << format_double(last.mean_pcm_loss)
              << ", cross-camera pairs " << last.cross_pair_count << "\n";
  } else {
    std::cout << "trained 0 epochs; checkpoint is the initialization\n";
  }
  return 0;
}

void write_metrics_artifacts(const fs::path& dir, const RetrievalResult& metrics) {
  write_text_file(dir / "metrics.json", metrics_json(metrics).dump(2) + "\n");
  write_text_file(dir / "metrics.csv", metrics_csv(metrics));
}

void validate_metrics_artifacts(const fs::path& dir) {
  Json metrics = parse_json_file(dir / "metrics.json", "metrics");
  if (!metrics.contains("cmc") || metrics["cmc"].size() != 20 || !metrics.contains("map")) {
    throw std::runtime_error("metrics.json failed validation in " + dir.string());
  }
}

int cmd_evaluate(const fs::path& dataset_path, const fs::path& checkpoint,
                 const fs::path& out_dir) {
  const TrackletDataset ds = load_dataset(dataset_path);
  const EmbedModel model = load_model(checkpoint);

  fs::create_directories(out_dir);
  Json eval_config;
  eval_config["dataset"] = dataset_path.string();
  eval_config["checkpoint"] = checkpoint.string();
  RunManifest manifest = begin_manifest("evaluate", eval_config, 0);

  const RetrievalResult metrics = evaluate_retrieval(model, ds);
  write_metrics_artifacts(out_dir, metrics);
  validate_metrics_artifacts(out_dir);

  manifest.artifacts["metrics_json"] = "metrics.json";
  manifest.artifacts["metrics_csv"] = "metrics.csv";
  finish_manifest(manifest, out_dir);

  std::cout << "rank-1 " << format_double(metrics.cmc.at(0)) << ", map "
            << format_double(metrics.map) << " over " << metrics.per_query_ap.size()
            << " queries\n";
  return 0;
}

std::vector<AblationPoint> parse_grid(const Json& grid_json) {
  const std::string ctx = "grid file";
  require_known_keys(grid_json, ctx, {"grid"});
  const Json& points = require_field(grid_json, ctx, "grid");
  if (!points.is_array() || points.empty()) {
    throw std::runtime_error(ctx + ": \"grid\" must be a non-empty array");
  }
  std::vector<AblationPoint> grid;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::string pctx = ctx + " point " + std::to_string(i);
    require_known_keys(points[i], pctx, {"name", "overrides"});
    AblationPoint p;
    p.name = require_field(points[i], pctx, "name").get<std::string>();
    p.overrides = require_field(points[i], pctx, "overrides");
    if (!p.overrides.is_object()) {
      throw std::runtime_error(pctx + ": \"overrides\" must be an object");
    }
    if (p.name.empty() || p.name.find_first_of(",/\\\n") != std::string::npos) {
      throw std::runtime_error(pctx + ": invalid point name \"" + p.name + "\"");
    }
    for (const AblationPoint& seen : grid) {
      if (seen.name == p.name) {
        throw std::runtime_error(pctx + ": duplicate point name \"" + p.name + "\"");
      }
    }
    grid.push_back(std::move(p));
  }
  return grid;
}

int cmd_ablate(const fs::path& dataset_path, const fs::path& config_path,
               const fs::path& grid_path, const fs::path& out_dir,
               std::optional<std::uint64_t> seed) {
  Json cfg_json = parse_json_file(config_path, "config");
  apply_seed_override(cfg_json, seed);
  const TrainConfig base = train_config_from_json(cfg_json);
  const std::vector<AblationPoint> grid = parse_grid(parse_json_file(grid_path, "grid file"));
  const TrackletDataset ds = load_dataset(dataset_path);

  fs::create_directories(out_dir);
  Json manifest_config;
  manifest_config["base"] = to_json(base);
  Json grid_copy = Json::array();
  for (const AblationPoint& p : grid) {
    grid_copy.push_back({{"name", p.name}, {"overrides", p.overrides}});
  }
  manifest_config["grid"] = std::move(grid_copy);
  RunManifest manifest = begin_manifest("ablate", manifest_config, base.seed);

  std::vector<AblationRow> rows = run_ablation(ds, base, grid);

  bool all_ok = true;
  for (const AblationRow& row : rows) {
    const fs::path point_dir = out_dir / "points" / row.name;
    fs::create_directories(point_dir);
    if (row.ok) {
      write_train_artifacts(point_dir, row.model, row.train_report);
      write_metrics_artifacts(point_dir, row.metrics);
      validate_train_artifacts(point_dir, row.config.epochs);
      validate_metrics_artifacts(point_dir);
    } else {
      all_ok = false;
      write_text_file(point_dir / "error.txt", row.error + "\n");
    }
  }
  write_text_file(out_dir / "comparison.csv", comparison_csv(rows));

  manifest.artifacts["comparison_csv"] = "comparison.csv";
  for (const AblationRow& row : rows) {
    manifest.artifacts["point_" + row.name] = "points/" + row.name;
  }
  manifest.status = all_ok ? "ok" : "partial_failure";
  finish_manifest(manifest, out_dir);

  for (const AblationRow& row : rows) {
    std::cout << row.name << ": ";
    if (row.ok) {
      std::cout << "rank-1 " << format_double(row.metrics.cmc.at(0)) << ", map "
                << format_double(row.metrics.map) << "\n";
    } else {
      std::cout << "FAILED (" << row.error << ")\n";
    }
  }
  if (!all_ok) {
    std::cerr << "error: some grid points failed; see error.txt files\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"selective tracklet learning experiments"};
  app.require_subcommand(1);

  std::string config_path, dataset_path, out_dir, checkpoint_path, grid_path;
  std::optional<std::uint64_t> seed_override;

  CLI::App* generate = app.add_subcommand("generate", "synthesize a tracklet dataset");
  generate->add_option("--config", config_path, "generator config (JSON)")->required();
  generate->add_option("--out", out_dir, "output dataset directory")->required();
  generate->add_option("--seed", seed_override, "override the config seed");

  CLI::App* train = app.add_subcommand("train", "train an embedding on a dataset");
  train->add_option("--dataset", dataset_path, "dataset directory")->required();
  train->add_option("--config", config_path, "training config (JSON)")->required();
  train->add_option("--out", out_dir, "output run directory")->required();
  train->add_option("--seed", seed_override, "override the config seed");

  CLI::App* evaluate = app.add_subcommand("evaluate", "score a checkpoint on a dataset");
  evaluate->add_option("--dataset", dataset_path, "dataset directory")->required();
  evaluate->add_option("--checkpoint", checkpoint_path, "model checkpoint")->required();
  evaluate->add_option("--out", out_dir, "output directory")->required();

  CLI::App* ablate = app.add_subcommand("ablate", "train + evaluate a grid of configs");
  ablate->add_option("--dataset", dataset_path, "dataset directory")->required();
  ablate->add_option("--config", config_path, "base training config (JSON)")->required();
  ablate->add_option("--grid", grid_path, "grid file (JSON)")->required();
  ablate->add_option("--out", out_dir, "output directory")->required();
  ablate->add_option("--seed", seed_override, "override the base config seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return cmd_generate(config_path, out_dir, seed_override);
    if (train->parsed()) return cmd_train(dataset_path, config_path, out_dir, seed_override);
    if (evaluate->parsed()) return cmd_evaluate(dataset_path, checkpoint_path, out_dir);
    if (ablate->parsed()) {
      return cmd_ablate(dataset_path, config_path, grid_path, out_dir, seed_override);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
