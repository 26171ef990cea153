#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "shiftcast/experiment.hpp"
#include "shiftcast/synth.hpp"

using namespace shiftcast;

namespace {

std::vector<Recording> tiny_corpus(int participants, std::uint64_t seed) {
  SynthConfig cfg;
  cfg.n_participants = participants;
  cfg.session_length_s = 240.0;
  cfg.cue_probability = 0.9;
  cfg.environment_dwell = {2.5, 0.8, 0.05, 40.0, 0.4};
  cfg.device_dwell = {10.0, 0.6, 0.0, 60.0, 0.4};
  cfg.seed = seed;
  return generate_corpus(cfg).recordings;
}

}  // namespace

TEST_CASE("two participants yield two folds with a recomputable mean") {
  const auto recordings = tiny_corpus(2, 3);
  const TaskConfig tc = TaskConfig::for_task(Task::PrimaryFocus);
  const std::vector<Hyperparams> grid{{10, 4, 2, 0}};
  const auto report = run_experiment(recordings, tc, FeatureGroup::Phone, grid, 5);
  REQUIRE(report.folds.size() + report.skipped.size() == 2);
  REQUIRE_FALSE(report.folds.empty());
  double sum = 0.0;
  for (const auto& f : report.folds) sum += f.weighted_f1;
  CHECK(report.mean_weighted_f1 ==
        Catch::Approx(sum / report.folds.size()).margin(1e-12));
  for (const auto& f : report.folds) {
    CHECK(f.cm.total() == f.n_test);
    CHECK(f.n_train > 0);
  }
}

TEST_CASE("reports are deterministic and independent of the worker count") {
  const auto recordings = tiny_corpus(3, 11);
  const TaskConfig tc = TaskConfig::for_task(Task::ShiftToDevice);
  const std::vector<Hyperparams> grid{{8, 4, 2, 0}, {8, 6, 2, 0}};
  const auto a = run_experiment(recordings, tc, FeatureGroup::Phone, grid, 7, 1);
  const auto b = run_experiment(recordings, tc, FeatureGroup::Phone, grid, 7, 4);
  CHECK(report_to_json(a).dump() == report_to_json(b).dump());
  const auto c = run_experiment(recordings, tc, FeatureGroup::Phone, grid, 8, 2);
  CHECK(report_to_json(a).dump() != report_to_json(c).dump());
}

TEST_CASE("folds that cannot be balanced are skipped and excluded from the mean") {
  // Hand-built corpus: participants p000/p001 have both classes, p002 sees
  // only positive primary-focus windows (device attention throughout).
  auto make_rec = [](const std::string& pid, bool mixed) {
    Recording rec;
    rec.participant_id = pid;
    const std::string env = rec.constants.scene_classes.front();
    if (mixed) {
      rec.annotations.intervals = {
          {0.0, 20.0, Attention::Device, env, true, Locomotion::Sit},
          {20.0, 40.0, Attention::Environment, env, true, Locomotion::Sit},
          {40.0, 60.0, Attention::Device, env, true, Locomotion::Sit},
      };
    } else {
      rec.annotations.intervals = {
          {0.0, 60.0, Attention::Device, env, true, Locomotion::Sit},
      };
    }
    rec.segments.segments = {{0.0, 60.0, SegmentKind::Working, 0}};
    // A small deterministic gaze stream so features vary across windows.
    for (int k = 0; k < 600; ++k) {
      GazeSample s;
      s.t = k * 0.1;
      s.valid = true;
      s.x = (k % 7) * 0.1;
      s.y = (k % 5) * 0.1;
      rec.gaze.push_back(s);
    }
    return rec;
  };
  const std::vector<Recording> recordings = {make_rec("p000", true), make_rec("p001", true),
                                             make_rec("p002", false)};
  const TaskConfig tc = TaskConfig::for_task(Task::PrimaryFocus);
  const std::vector<Hyperparams> grid{{5, 3, 1, 0}};
  const auto report =
      run_experiment(recordings, tc, FeatureGroup::ProposedPlusGaze, grid, 1);
  REQUIRE(report.skipped.size() == 1);
  CHECK(report.skipped.front().participant_id == "p002");
  CHECK(report.folds.size() == 2);
}

TEST_CASE("breakdown rows aggregate only folds with data in the subgroup") {
  const auto recordings = tiny_corpus(3, 21);
  const TaskConfig tc = TaskConfig::for_task(Task::PrimaryFocus);
  const std::vector<Hyperparams> grid{{10, 4, 2, 0}};
  const auto report = run_experiment(recordings, tc, FeatureGroup::Phone, grid, 2);
  for (const auto& [key, row] : report.segment_breakdown) {
    INFO(key);
    CHECK(row.folds_counted <= report.folds.size());
    CHECK(row.folds_counted >= 1);
  }
  // Confusion totals across folds match the report-level matrix.
  ConfusionMatrix sum;
  for (const auto& f : report.folds) sum += f.cm;
  CHECK(sum == report.total_cm);
}

TEST_CASE("report serializations are complete and dump deterministically") {
  const auto recordings = tiny_corpus(2, 31);
  const TaskConfig tc = TaskConfig::for_task(Task::ShiftToEnvironment);
  const std::vector<Hyperparams> grid{{6, 4, 2, 0}};
  const auto report = run_experiment(recordings, tc, FeatureGroup::Egocentric, grid, 3);
  const json j = report_to_json(report);
  for (const char* key : {"task", "group", "target_window", "seed", "mean_weighted_f1",
                          "std_weighted_f1", "confusion", "confusion_normalized", "folds",
                          "skipped", "by_segment", "by_environment"})
    CHECK(j.contains(key));
  CHECK(j.dump() == report_to_json(report).dump());
  const std::string text = report_to_text(report);
  CHECK(text.find("mean weighted F1") != std::string::npos);
  const std::string csv = report_cm_csv(report);
  CHECK(csv.rfind("scope,tp,fp,fn,tn", 0) == 0);
}
