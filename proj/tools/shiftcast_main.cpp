// Command-line front door for the attention-forecasting pipeline:
//   synth     generate a synthetic corpus
//   stats     summary statistics over a corpus
//   features  windowed feature vectors as JSON lines
//   examples  labeled examples + LOPO fold index
//   train     fit one random forest from an examples file
//   eval      one LOPO experiment (task x feature group)
//   run       full report: all tasks x all feature groups
//
// Exit codes: 0 success, 1 usage error, 2 data/validation error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shiftcast/corpus.hpp"
#include "shiftcast/examples.hpp"
#include "shiftcast/experiment.hpp"
#include "shiftcast/forest.hpp"
#include "shiftcast/oracle.hpp"
#include "shiftcast/runconfig.hpp"
#include "shiftcast/timeline.hpp"

namespace {

namespace fs = std::filesystem;
using namespace shiftcast;

void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

void write_json_file(const fs::path& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

struct CliState {
  RunConfig cfg;
  std::string config_path;
};

ExperimentReport run_one_experiment(const std::vector<Recording>& recordings,
                                    const RunConfig& cfg, Task task, FeatureGroup group) {
  if (recordings.empty()) throw MissingStreamError("corpus holds no recordings");
  const TaskConfig tc = cfg.task_config_for(task);
  FeatureExtractor probe(recordings.front());
  const auto grid = cfg.resolve_grid(probe.schema(group)->size());
  return run_experiment(recordings, tc, group, grid, cfg.seed, cfg.resolved_workers(),
                        cfg.inner_k);
}

int cmd_synth(const RunConfig& cfg) {
  SynthConfig scfg = cfg.synth;
  scfg.seed = cfg.seed;
  const SynthCorpus corpus = generate_corpus(scfg);
  const auto index = write_corpus(corpus, scfg, cfg.out);
  std::cout << index.string() << "\n";
  return 0;
}

int cmd_stats(const RunConfig& cfg) {
  const auto recordings = load_corpus(cfg.data);
  const SummaryStats stats = summarize(recordings);
  json out{{"config", run_config_to_json(cfg)}, {"summary", summary_to_json(stats)}};
  if (cfg.out.empty() || cfg.out == "-") {
    std::cout << out.dump(2) << "\n";
  } else {
    write_json_file(cfg.out, out);
    std::cout << cfg.out << "\n";
  }
  return 0;
}

int cmd_features(const RunConfig& cfg) {
  const auto recordings = load_corpus(cfg.data);
  if (cfg.out.empty()) throw ConfigError("--out is required");
  std::ofstream out(cfg.out, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + cfg.out);

  bool header_written = false;
  for (const auto& rec : recordings) {
    FeatureExtractor extractor(rec);
    const SchemaPtr schema = extractor.schema(cfg.group);
    if (!header_written) {
      json header{{"kind", "header"},
                  {"format", "shiftcast-features/1"},
                  {"group", to_string(cfg.group)},
                  {"feature_names", schema->names},
                  {"provenance", run_config_to_json(cfg)}};
      out << header.dump() << '\n';
      header_written = true;
    }
    const double fw = cfg.feature_window;
    const double first = rec.annotations.start() + fw;
    const double last = rec.annotations.end();
    auto k = static_cast<long long>(std::ceil(first / cfg.stride - 1e-9));
    for (;; ++k) {
      const double t_ref = static_cast<double>(k) * cfg.stride;
      if (t_ref > last) break;
      const FeatureVector fv = extractor.extract(t_ref - fw, t_ref, cfg.group);
      out << json{{"participant", rec.participant_id},
                  {"t0", t_ref - fw},
                  {"t1", t_ref},
                  {"values", fv.values}}
                 .dump()
          << '\n';
    }
  }
  std::cout << cfg.out << "\n";
  return 0;
}

int cmd_examples(const RunConfig& cfg) {
  const auto recordings = load_corpus(cfg.data);
  if (cfg.out.empty()) throw ConfigError("--out is required");
  const TaskConfig tc = cfg.task_config();

  std::vector<Example> all;
  SchemaPtr schema;
  for (const auto& rec : recordings) {
    FeatureExtractor extractor(rec);
    if (!schema) schema = extractor.schema(cfg.group);
    auto chunk = generate_examples(extractor, tc, cfg.group);
    all.insert(all.end(), std::make_move_iterator(chunk.begin()),
               std::make_move_iterator(chunk.end()));
  }
  write_examples_jsonl(cfg.out, all, tc.task, schema, run_config_to_json(cfg));
  const auto folds = lopo_folds(all);
  json index = fold_index_json(folds);
  index["provenance"] = run_config_to_json(cfg);
  write_json_file(fs::path(cfg.out).string() + ".folds.json", index);
  std::cout << cfg.out << "\n";
  return 0;
}

int cmd_train(const RunConfig& cfg, const std::string& examples_path) {
  const ExamplesFile file = read_examples_jsonl(examples_path);
  if (file.examples.empty()) throw DegenerateDataError("examples file holds no examples");
  const auto balanced = balance(file.examples, mix_seed(cfg.seed, 1));
  const auto grid = cfg.resolve_grid(file.schema->size());
  const Hyperparams hp =
      grid.size() == 1 ? grid.front() : tune(balanced, grid, cfg.inner_k, mix_seed(cfg.seed, 3));
  const Forest forest =
      train_forest(balanced, hp, mix_seed(cfg.seed, 4), cfg.resolved_workers());
  json model = forest_to_json(forest);
  model["provenance"] = run_config_to_json(cfg);
  write_json_file(cfg.out.empty() ? "model.json" : cfg.out, model);
  std::cout << (cfg.out.empty() ? "model.json" : cfg.out) << "\n";
  return 0;
}

int cmd_eval(const RunConfig& cfg, const std::string& cm_csv) {
  const auto recordings = load_corpus(cfg.data);
  const ExperimentReport report = run_one_experiment(recordings, cfg, cfg.task, cfg.group);
  json j = report_to_json(report);
  j["config"] = run_config_to_json(cfg);
  const fs::path out = cfg.out.empty() ? fs::path("report.json") : fs::path(cfg.out);
  write_json_file(out, j);
  fs::path txt = out;
  txt.replace_extension(".txt");
  write_text_file(txt, report_to_text(report));
  if (!cm_csv.empty()) write_text_file(cm_csv, report_cm_csv(report));
  std::cout << out.string() << "\n";
  return 0;
}

int cmd_run(const RunConfig& cfg) {
  const auto recordings = load_corpus(cfg.data);
  const fs::path out_dir = cfg.out.empty() ? fs::path("reports") : fs::path(cfg.out);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create directory " + out_dir.string() + ": " + ec.message());

  json summary_cells = json::array();
  std::ostringstream table;
  table << std::fixed << std::setprecision(4);
  table << std::left << std::setw(24) << "task" << std::setw(16) << "group" << std::right
        << std::setw(8) << "wF1" << std::setw(10) << "working" << std::setw(10) << "waiting"
        << "\n";
  for (Task task : {Task::ShiftToEnvironment, Task::ShiftToDevice, Task::PrimaryFocus}) {
    for (FeatureGroup group : all_feature_groups()) {
      const ExperimentReport report = run_one_experiment(recordings, cfg, task, group);
      json j = report_to_json(report);
      j["config"] = run_config_to_json(cfg);
      const std::string stem =
          std::string("report_") + to_string(task) + "_" + to_string(group);
      write_json_file(out_dir / (stem + ".json"), j);
      write_text_file(out_dir / (stem + ".txt"), report_to_text(report));

      auto breakdown_mean = [&](const char* key) {
        auto it = report.segment_breakdown.find(key);
        return it == report.segment_breakdown.end() ? 0.0 : it->second.mean_weighted_f1;
      };
      summary_cells.push_back(json{{"task", to_string(task)},
                                   {"group", to_string(group)},
                                   {"target_window", report.config.target_window},
                                   {"mean_weighted_f1", report.mean_weighted_f1},
                                   {"std_weighted_f1", report.std_weighted_f1},
                                   {"working_weighted_f1", breakdown_mean("working")},
                                   {"waiting_weighted_f1", breakdown_mean("waiting")},
                                   {"folds", report.folds.size()},
                                   {"skipped", report.skipped.size()}});
      table << std::left << std::setw(24) << to_string(task) << std::setw(16)
            << to_string(group) << std::right << std::setw(8) << report.mean_weighted_f1
            << std::setw(10) << breakdown_mean("working") << std::setw(10)
            << breakdown_mean("waiting") << "\n";
    }
  }
  write_json_file(out_dir / "summary.json",
                  json{{"config", run_config_to_json(cfg)}, {"cells", summary_cells}});
  write_text_file(out_dir / "summary.txt", table.str());
  std::cout << (out_dir / "summary.json").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"attention-forecasting pipeline (synthetic corpora, feature extraction, "
               "random-forest training, leave-one-person-out evaluation)"};
  app.require_subcommand(1);

  CliState state;
  std::string task_name, group_name, examples_path, cm_csv;
  double minutes = 0.0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", state.config_path, "JSON config file (flags override)");
    cmd->add_option("--seed", state.cfg.seed, "master seed");
    cmd->add_option("--workers", state.cfg.workers, "worker threads (0 = hardware)");
    cmd->add_option("--out", state.cfg.out, "output path");
  };
  auto add_data = [&](CLI::App* cmd) {
    cmd->add_option("--data", state.cfg.data, "corpus.json or corpus directory");
  };
  auto add_task_opts = [&](CLI::App* cmd) {
    cmd->add_option("--task", task_name,
                    "shift_to_environment | shift_to_device | primary_focus");
    cmd->add_option("--group", group_name,
                    "egocentric | phone | proposed | proposed_gaze");
    cmd->add_option("--target-window", state.cfg.target_window,
                    "target window seconds (0 = per-task default)");
    cmd->add_option("--feature-window", state.cfg.feature_window, "feature window seconds");
    cmd->add_option("--stride", state.cfg.stride, "stride seconds");
    cmd->add_option("--n-trees", state.cfg.n_trees, "trees per forest");
    cmd->add_option("--grid", state.cfg.grid, "default | small | single");
    cmd->add_option("--inner-k", state.cfg.inner_k, "inner CV folds for tuning");
  };

  CLI::App* c_synth = app.add_subcommand("synth", "generate a synthetic corpus");
  add_common(c_synth);
  c_synth->add_option("--participants", state.cfg.synth.n_participants, "participant count");
  c_synth->add_option("--minutes", minutes, "session length per participant, minutes");
  c_synth->add_option("--cue-prob", state.cfg.synth.cue_probability,
                      "probability a shift is preceded by its planted cue");
  c_synth->add_option("--lead-min", state.cfg.synth.cue_lead_min_s, "minimum cue lead, s");
  c_synth->add_option("--lead-max", state.cfg.synth.cue_lead_max_s, "maximum cue lead, s");
  c_synth->add_flag("--emit-maps", state.cfg.synth.emit_map_grids,
                    "attach at-gaze map grids to frames");

  CLI::App* c_stats = app.add_subcommand("stats", "summary statistics for a corpus");
  add_common(c_stats);
  add_data(c_stats);

  CLI::App* c_features = app.add_subcommand("features", "windowed feature vectors");
  add_common(c_features);
  add_data(c_features);
  add_task_opts(c_features);

  CLI::App* c_examples = app.add_subcommand("examples", "labeled prediction examples");
  add_common(c_examples);
  add_data(c_examples);
  add_task_opts(c_examples);

  CLI::App* c_train = app.add_subcommand("train", "train one forest from an examples file");
  add_common(c_train);
  add_task_opts(c_train);
  c_train->add_option("--examples", examples_path, "examples JSONL file")->required();

  CLI::App* c_eval = app.add_subcommand("eval", "one LOPO experiment (task x group)");
  add_common(c_eval);
  add_data(c_eval);
  add_task_opts(c_eval);
  c_eval->add_option("--cm-csv", cm_csv, "write normalized confusion cells as CSV");

  CLI::App* c_run = app.add_subcommand("run", "all tasks x all feature groups");
  add_common(c_run);
  add_data(c_run);
  add_task_opts(c_run);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    auto passed = [&](const char* flag) {
      const CLI::Option* o = cmd->get_option_no_throw(flag);
      return o != nullptr && o->count() > 0;
    };
    // Config file first, then explicit flags on top of it.
    if (!state.config_path.empty()) {
      RunConfig file_cfg = load_run_config(state.config_path);
      RunConfig flag_cfg = state.cfg;
      state.cfg = std::move(file_cfg);
      auto keep = [&](const char* flag, auto member) {
        if (passed(flag)) state.cfg.*member = flag_cfg.*member;
      };
      keep("--seed", &RunConfig::seed);
      keep("--workers", &RunConfig::workers);
      keep("--out", &RunConfig::out);
      keep("--data", &RunConfig::data);
      keep("--target-window", &RunConfig::target_window);
      keep("--feature-window", &RunConfig::feature_window);
      keep("--stride", &RunConfig::stride);
      keep("--n-trees", &RunConfig::n_trees);
      keep("--grid", &RunConfig::grid);
      keep("--inner-k", &RunConfig::inner_k);
      auto keep_synth = [&](const char* flag, auto member) {
        if (passed(flag)) state.cfg.synth.*member = flag_cfg.synth.*member;
      };
      keep_synth("--participants", &SynthConfig::n_participants);
      keep_synth("--cue-prob", &SynthConfig::cue_probability);
      keep_synth("--lead-min", &SynthConfig::cue_lead_min_s);
      keep_synth("--lead-max", &SynthConfig::cue_lead_max_s);
      keep_synth("--emit-maps", &SynthConfig::emit_map_grids);
    }
    if (passed("--task")) state.cfg.task = task_from_string(task_name);
    if (passed("--group")) state.cfg.group = feature_group_from_string(group_name);
    if (passed("--minutes")) state.cfg.synth.session_length_s = minutes * 60.0;

    if (cmd == c_synth) return cmd_synth(state.cfg);
    if (cmd == c_stats) return cmd_stats(state.cfg);
    if (cmd == c_features) return cmd_features(state.cfg);
    if (cmd == c_examples) return cmd_examples(state.cfg);
    if (cmd == c_train) return cmd_train(state.cfg, examples_path);
    if (cmd == c_eval) return cmd_eval(state.cfg, cm_csv);
    if (cmd == c_run) return cmd_run(state.cfg);
    std::cerr << "error: no subcommand selected\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
