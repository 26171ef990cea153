#pragma once

// Resolved run configuration for the CLI: parsed from an optional JSON config
// file, overridden by command-line flags, and echoed verbatim into every
// artifact the tools write.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "shiftcast/examples.hpp"
#include "shiftcast/forest.hpp"
#include "shiftcast/synth.hpp"

namespace shiftcast {

struct RunConfig {
  std::string data;              // corpus.json or corpus directory
  std::string out;               // output file or directory
  Task task = Task::ShiftToEnvironment;
  FeatureGroup group = FeatureGroup::Proposed;
  double feature_window = 1.0;   // seconds
  double target_window = 0.0;    // 0 => per-task default
  double stride = 0.5;           // seconds
  int n_trees = 100;
  std::string grid = "default";  // default | small | single
  std::vector<Hyperparams> explicit_grid;
  int inner_k = 3;
  std::uint64_t seed = 0;
  unsigned workers = 0;          // 0 => hardware concurrency
  SynthConfig synth;

  TaskConfig task_config() const {
    TaskConfig cfg = TaskConfig::for_task(task);
    cfg.feature_window = feature_window;
    cfg.stride = stride;
    if (target_window > 0.0) cfg.target_window = target_window;
    return cfg;
  }

  TaskConfig task_config_for(Task t) const {
    TaskConfig cfg = TaskConfig::for_task(t);
    cfg.feature_window = feature_window;
    cfg.stride = stride;
    if (target_window > 0.0) cfg.target_window = target_window;
    return cfg;
  }

  unsigned resolved_workers() const { return workers == 0 ? default_workers() : workers; }

  /// Grid for a concrete feature dimension. Presets: "default" is the full
  /// depth x leaf x features grid, "small" two depths at sqrt(d) features,
  /// "single" one point (no inner tuning).
  std::vector<Hyperparams> resolve_grid(std::size_t dimension) const {
    if (!explicit_grid.empty()) return explicit_grid;
    if (grid == "default") return default_grid(dimension, n_trees);
    if (grid == "small")
      return {Hyperparams{n_trees, 8, 5, 0}, Hyperparams{n_trees, 16, 5, 0}};
    if (grid == "single") return {Hyperparams{n_trees, 16, 5, 0}};
    throw ConfigError("unknown grid preset '" + grid + "'");
  }
};

inline json run_config_to_json(const RunConfig& cfg) {
  json grid = json::array();
  for (const auto& hp : cfg.explicit_grid) grid.push_back(hyperparams_to_json(hp));
  return json{{"data", cfg.data},
              {"out", cfg.out},
              {"task", to_string(cfg.task)},
              {"group", to_string(cfg.group)},
              {"feature_window", cfg.feature_window},
              {"target_window", cfg.target_window},
              {"stride", cfg.stride},
              {"n_trees", cfg.n_trees},
              {"grid", cfg.grid},
              {"explicit_grid", grid},
              {"inner_k", cfg.inner_k},
              {"seed", cfg.seed},
              {"workers", cfg.workers},
              {"synth", synth_config_to_json(cfg.synth)}};
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("config file: " + std::string(e.what()));
  }
  RunConfig cfg;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("data", cfg.data);
  get("out", cfg.out);
  if (j.contains("task")) cfg.task = task_from_string(j.at("task").get<std::string>());
  if (j.contains("group"))
    cfg.group = feature_group_from_string(j.at("group").get<std::string>());
  get("feature_window", cfg.feature_window);
  get("target_window", cfg.target_window);
  get("stride", cfg.stride);
  get("n_trees", cfg.n_trees);
  get("grid", cfg.grid);
  if (j.contains("explicit_grid"))
    for (const auto& hj : j.at("explicit_grid"))
      cfg.explicit_grid.push_back(hyperparams_from_json(hj));
  get("inner_k", cfg.inner_k);
  get("seed", cfg.seed);
  get("workers", cfg.workers);
  if (j.contains("synth")) synth_config_from_json(j.at("synth"), cfg.synth);
  return cfg;
}

}  // namespace shiftcast
