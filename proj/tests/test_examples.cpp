#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <random>
#include <set>

#include "helpers.hpp"
#include "shiftcast/examples.hpp"
#include "shiftcast/oracle.hpp"
#include "shiftcast/synth.hpp"

using namespace shiftcast;

namespace {

// Annotation-only recording over one contiguous span with a single segment.
Recording make_timeline_recording(
    std::initializer_list<std::tuple<double, double, Attention>> intervals,
    const std::string& pid = "p000") {
  Recording rec;
  rec.participant_id = pid;
  const std::string env = rec.constants.scene_classes.front();
  double lo = 1e300, hi = -1e300;
  for (const auto& [start, end, att] : intervals) {
    rec.annotations.intervals.push_back({start, end, att, env, true, Locomotion::Sit});
    lo = std::min(lo, start);
    hi = std::max(hi, end);
  }
  rec.segments.segments = {{lo, hi, SegmentKind::Working, 0}};
  return rec;
}

}  // namespace

TEST_CASE("a shift inside the target window labels the example true") {
  // Device until 3.4, then environment; shift to environment at t=3.4.
  const auto rec = make_timeline_recording(
      {{0.0, 3.4, Attention::Device}, {3.4, 10.0, Attention::Environment}});
  TaskConfig cfg = TaskConfig::for_task(Task::ShiftToEnvironment);
  REQUIRE(cfg.target_window == 1.0);
  const auto examples = generate_examples(rec, cfg, FeatureGroup::Phone);
  REQUIRE_FALSE(examples.empty());
  bool found = false;
  for (const auto& ex : examples) {
    if (ex.t_ref == 3.0) {
      found = true;
      CHECK(ex.label);
    } else {
      // Every other emitted reference time is on the device side of the shift.
      CHECK(attention_at(rec.annotations, ex.t_ref) == Attention::Device);
    }
  }
  CHECK(found);
}

TEST_CASE("reference times with environment attention emit no shift-to-environment example") {
  const auto rec = make_timeline_recording(
      {{0.0, 3.4, Attention::Device}, {3.4, 10.0, Attention::Environment}});
  const auto examples =
      generate_examples(rec, TaskConfig::for_task(Task::ShiftToEnvironment), FeatureGroup::Phone);
  for (const auto& ex : examples)
    CHECK(attention_at(rec.annotations, ex.t_ref) == Attention::Device);
  // t_ref = 4.0 lies in the environment interval and must be absent.
  for (const auto& ex : examples) CHECK(ex.t_ref != 4.0);
}

TEST_CASE("primary focus with exactly half on-device time labels false") {
  // Window (1, 6]: device time is (1, 3.5) = 2.5 s of 5 s.
  const auto rec = make_timeline_recording(
      {{0.0, 3.5, Attention::Device}, {3.5, 11.0, Attention::Environment}});
  TaskConfig cfg = TaskConfig::for_task(Task::PrimaryFocus);
  REQUIRE(cfg.target_window == 5.0);
  const auto examples = generate_examples(rec, cfg, FeatureGroup::Phone);
  bool found = false;
  for (const auto& ex : examples) {
    if (ex.t_ref == 1.0) {
      found = true;
      CHECK_FALSE(ex.label);  // exact tie counts as off-device
    }
  }
  REQUIRE(found);
  // The independent oracle encodes the same tie rule.
  const auto o = oracle_label(rec, Task::PrimaryFocus, 1.0, 5.0);
  CHECK(o.eligible);
  CHECK_FALSE(o.label);
}

TEST_CASE("windows never cross annotation gaps or segment boundaries") {
  Recording rec = make_timeline_recording({{0.0, 20.0, Attention::Device},
                                           {20.0, 24.0, Attention::Environment},
                                           {30.0, 50.0, Attention::Device}});
  rec.segments.segments = {{0.0, 12.0, SegmentKind::Working, 0},
                           {12.0, 24.0, SegmentKind::Waiting, 0},
                           {30.0, 50.0, SegmentKind::Working, 1}};
  TaskConfig cfg = TaskConfig::for_task(Task::ShiftToEnvironment);
  cfg.target_window = 5.0;
  const auto examples = generate_examples(rec, cfg, FeatureGroup::Phone);
  REQUIRE_FALSE(examples.empty());
  for (const auto& ex : examples) {
    const double lo = ex.t_ref - cfg.feature_window;
    const double hi = ex.t_ref + cfg.target_window;
    // Inside one contiguous annotated span.
    const bool in_first_span = lo >= 0.0 && hi <= 24.0;
    const bool in_second_span = lo >= 30.0 && hi <= 50.0;
    CHECK((in_first_span || in_second_span));
    // Inside one segment.
    bool in_one_segment = false;
    for (const auto& seg : rec.segments.segments)
      if (lo >= seg.start && hi <= seg.end) in_one_segment = true;
    CHECK(in_one_segment);
    CHECK(ex.segment_kind == (ex.t_ref < 12.0 ? SegmentKind::Working
                              : ex.t_ref < 24.0 ? SegmentKind::Waiting
                                                : SegmentKind::Working));
  }
}

TEST_CASE("metadata carries the annotation context at the reference time") {
  Recording rec = make_timeline_recording({{0.0, 30.0, Attention::Device}});
  rec.annotations.intervals[0].environment = "library";
  const auto examples =
      generate_examples(rec, TaskConfig::for_task(Task::PrimaryFocus), FeatureGroup::Phone);
  REQUIRE_FALSE(examples.empty());
  for (const auto& ex : examples) {
    CHECK(ex.environment == "library");
    CHECK(ex.participant_id == "p000");
    CHECK(ex.task == Task::PrimaryFocus);
  }
}

TEST_CASE("balance undersamples the majority class deterministically") {
  std::vector<Example> examples;
  for (int i = 0; i < 100; ++i) {
    Example ex;
    ex.participant_id = "p000";
    ex.t_ref = i;
    ex.label = true;
    examples.push_back(ex);
  }
  for (int i = 0; i < 10; ++i) {
    Example ex;
    ex.participant_id = "p000";
    ex.t_ref = 1000 + i;
    ex.label = false;
    examples.push_back(ex);
  }

  const auto balanced = balance(examples, 17);
  std::size_t pos = 0, neg = 0;
  for (const auto& ex : balanced) (ex.label ? pos : neg) += 1;
  CHECK(pos == 10);
  CHECK(neg == 10);

  // Deterministic for a fixed seed; a subset of the input.
  const auto balanced2 = balance(examples, 17);
  REQUIRE(balanced.size() == balanced2.size());
  std::set<double> input_refs;
  for (const auto& ex : examples) input_refs.insert(ex.t_ref);
  for (std::size_t i = 0; i < balanced.size(); ++i) {
    CHECK(balanced[i].t_ref == balanced2[i].t_ref);
    CHECK(input_refs.count(balanced[i].t_ref) == 1);
  }

  // Different seed, different selection (overwhelmingly likely).
  const auto balanced3 = balance(examples, 18);
  bool any_difference = false;
  for (std::size_t i = 0; i < balanced.size(); ++i)
    if (balanced[i].t_ref != balanced3[i].t_ref) any_difference = true;
  CHECK(any_difference);
}

TEST_CASE("already balanced input passes through unchanged") {
  std::vector<Example> examples;
  for (int i = 0; i < 20; ++i) {
    Example ex;
    ex.t_ref = i;
    ex.label = i % 2 == 0;
    examples.push_back(ex);
  }
  const auto balanced = balance(examples, 1);
  REQUIRE(balanced.size() == 20);
  for (std::size_t i = 0; i < balanced.size(); ++i) CHECK(balanced[i].t_ref == examples[i].t_ref);
}

TEST_CASE("single-class input cannot be balanced") {
  std::vector<Example> examples(4);
  for (auto& ex : examples) ex.label = true;
  CHECK_THROWS_AS(balance(examples, 0), SingleClassError);
  CHECK_THROWS_AS(balance({}, 0), SingleClassError);
}

TEST_CASE("lopo_folds builds one fold per participant, ordered by id") {
  std::vector<Example> examples;
  for (int p = 19; p >= 0; --p) {
    for (int i = 0; i < 3; ++i) {
      Example ex;
      char buf[8];
      std::snprintf(buf, sizeof(buf), "p%03d", p);
      ex.participant_id = buf;
      ex.t_ref = i;
      examples.push_back(ex);
    }
  }
  const auto folds = lopo_folds(examples);
  REQUIRE(folds.size() == 20);
  for (std::size_t i = 0; i < folds.size(); ++i) {
    CHECK(folds[i].test.size() == 3);
    CHECK(folds[i].train.size() == 57);
    for (const auto& ex : folds[i].test) CHECK(ex.participant_id == folds[i].participant_id);
    for (const auto& ex : folds[i].train) CHECK(ex.participant_id != folds[i].participant_id);
    if (i > 0) CHECK(folds[i - 1].participant_id < folds[i].participant_id);
  }
}

TEST_CASE("a single participant cannot form LOPO folds") {
  std::vector<Example> examples(3);
  for (auto& ex : examples) ex.participant_id = "p000";
  CHECK_THROWS_AS(lopo_folds(examples), TooFewParticipantsError);
}

TEST_CASE("examples round-trip through the JSON-lines file format") {
  SynthConfig cfg;
  cfg.n_participants = 2;
  cfg.session_length_s = 120.0;
  cfg.seed = 5;
  const auto corpus = generate_corpus(cfg);
  const TaskConfig tc = TaskConfig::for_task(Task::PrimaryFocus);
  std::vector<Example> all;
  SchemaPtr schema;
  for (const auto& rec : corpus.recordings) {
    FeatureExtractor extractor(rec);
    schema = extractor.schema(FeatureGroup::Phone);
    auto chunk = generate_examples(extractor, tc, FeatureGroup::Phone);
    all.insert(all.end(), chunk.begin(), chunk.end());
  }
  REQUIRE_FALSE(all.empty());
  const auto path = std::filesystem::temp_directory_path() / "shiftcast_test_examples.jsonl";
  write_examples_jsonl(path, all, tc.task, schema, json{{"note", "test"}});
  const ExamplesFile file = read_examples_jsonl(path);
  CHECK(file.task == tc.task);
  REQUIRE(file.examples.size() == all.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    CHECK(file.examples[i].participant_id == all[i].participant_id);
    CHECK(file.examples[i].t_ref == all[i].t_ref);
    CHECK(file.examples[i].label == all[i].label);
    CHECK(file.examples[i].features.values == all[i].features.values);
  }
  const json index = fold_index_json(lopo_folds(all));
  CHECK(index.at("folds").size() == 2);
}

TEST_CASE("emitted labels agree with the independent oracle on synthetic data") {
  SynthConfig cfg;
  cfg.n_participants = 2;
  cfg.session_length_s = 300.0;
  cfg.cue_probability = 0.5;
  cfg.environment_dwell = {3.0, 0.8, 0.05, 40.0, 0.4};
  cfg.seed = 21;
  const auto corpus = generate_corpus(cfg);
  std::size_t checked = 0;
  for (const auto& rec : corpus.recordings) {
    FeatureExtractor extractor(rec);
    for (Task task : {Task::ShiftToEnvironment, Task::ShiftToDevice, Task::PrimaryFocus}) {
      TaskConfig tc = TaskConfig::for_task(task);
      for (const auto& ex : generate_examples(extractor, tc, FeatureGroup::Phone)) {
        const auto o = oracle_label(rec, task, ex.t_ref, tc.target_window);
        CHECK(o.eligible);
        CHECK(o.label == ex.label);
        ++checked;
      }
    }
  }
  CHECK(checked > 100);
}
