#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "shiftcast/synth.hpp"
#include "shiftcast/timeline.hpp"

using namespace shiftcast;

namespace {

AnnotationTrack make_track(std::initializer_list<std::tuple<double, double, Attention>> intervals) {
  AnnotationTrack track;
  for (const auto& [start, end, att] : intervals)
    track.intervals.push_back({start, end, att, "office", true, Locomotion::Sit});
  return track;
}

}  // namespace

TEST_CASE("attention_at uses half-open intervals") {
  const auto track = make_track({{0.0, 5.0, Attention::Device}, {5.0, 8.0, Attention::Environment}});
  CHECK(attention_at(track, 2.0) == Attention::Device);
  CHECK(attention_at(track, 5.0) == Attention::Environment);  // boundary -> new interval
  CHECK(attention_at(track, 8.0) == std::nullopt);
  CHECK(attention_at(track, 9.0) == std::nullopt);
  CHECK(attention_at(track, -1.0) == std::nullopt);
}

TEST_CASE("shift_events marks every attention change between contiguous intervals") {
  const auto track = make_track({{0.0, 5.0, Attention::Device},
                                 {5.0, 8.0, Attention::Environment},
                                 {8.0, 10.0, Attention::Device}});
  const auto events = shift_events(track);
  REQUIRE(events.size() == 2);
  CHECK(events[0] == ShiftEvent{5.0, ShiftDirection::ToEnvironment});
  CHECK(events[1] == ShiftEvent{8.0, ShiftDirection::ToDevice});
}

TEST_CASE("a single interval produces no events") {
  CHECK(shift_events(make_track({{0.0, 5.0, Attention::Device}})).empty());
}

TEST_CASE("annotation gaps break spans: no shift across a gap") {
  const auto track = make_track({{0.0, 5.0, Attention::Device},
                                 {6.0, 8.0, Attention::Environment},
                                 {8.0, 9.0, Attention::Device}});
  const auto events = shift_events(track);
  REQUIRE(events.size() == 1);
  CHECK(events[0].t == 8.0);
}

TEST_CASE("shift event count equals an independent linear scan") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> len(0.5, 5.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    AnnotationTrack track;
    double t = 0.0;
    Attention att = Attention::Device;
    for (int i = 0; i < 30; ++i) {
      const double end = t + len(rng);
      track.intervals.push_back({t, end, att, "office", true, Locomotion::Sit});
      t = end;
      const bool flip = unit(rng) < 0.8;
      if (flip)
        att = att == Attention::Device ? Attention::Environment : Attention::Device;
      else
        t += len(rng);  // equal attention only after a gap, as validation requires
    }

    std::size_t changes = 0;
    std::size_t to_env = 0, to_dev = 0;
    for (std::size_t i = 1; i < track.intervals.size(); ++i) {
      if (track.intervals[i].start != track.intervals[i - 1].end) continue;
      if (track.intervals[i].attention == track.intervals[i - 1].attention) continue;
      ++changes;
      (track.intervals[i].attention == Attention::Environment ? to_env : to_dev) += 1;
    }
    const auto events = shift_events(track);
    CHECK(events.size() == changes);

    // Per contiguous span, directions alternate, so counts differ by at most 1.
    // Globally we just confirm the totals match the scan.
    std::size_t got_env = 0, got_dev = 0;
    for (const auto& ev : events)
      (ev.direction == ShiftDirection::ToEnvironment ? got_env : got_dev) += 1;
    CHECK(got_env == to_env);
    CHECK(got_dev == to_dev);

    // attention_at changes exactly at event timestamps within the track.
    for (const auto& ev : events) {
      const auto before = attention_at(track, ev.t - 1e-9);
      const auto after = attention_at(track, ev.t);
      REQUIRE(before.has_value());
      REQUIRE(after.has_value());
      CHECK(before != after);
    }
  }
}

TEST_CASE("per-span shift direction counts differ by at most one") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> len(0.5, 5.0);
  for (int trial = 0; trial < 30; ++trial) {
    AnnotationTrack track;
    double t = 0.0;
    Attention att = Attention::Device;
    std::vector<std::pair<std::size_t, std::size_t>> span_counts{{0, 0}};
    for (int i = 0; i < 40; ++i) {
      if (i > 0 && (trial + i) % 7 == 0) {
        t += 1.0;  // gap starts a new span
        span_counts.emplace_back(0, 0);
      } else if (i > 0) {
        auto& [env_count, dev_count] = span_counts.back();
        (att == Attention::Environment ? env_count : dev_count) += 1;
      }
      const double end = t + len(rng);
      track.intervals.push_back({t, end, att, "office", true, Locomotion::Sit});
      t = end;
      att = att == Attention::Device ? Attention::Environment : Attention::Device;
    }
    for (const auto& [env_count, dev_count] : span_counts) {
      const auto diff = env_count > dev_count ? env_count - dev_count : dev_count - env_count;
      CHECK(diff <= 1);
    }
  }
}

TEST_CASE("summarize: one interval of 60 device-seconds, zero shifts") {
  Recording rec = testutil::make_tiny_recording();
  rec.annotations.intervals = {{0.0, 60.0, Attention::Device, "office", true, Locomotion::Sit}};
  const auto stats = summarize({rec});
  CHECK(stats.rows.at("attention_time.on_device").total == 60.0);
  CHECK(stats.rows.at("attention_time.off_device").total == 0.0);
  CHECK(stats.rows.at("shifts.to_environment").total == 0.0);
  CHECK(stats.rows.at("shifts.to_device").total == 0.0);
  CHECK(stats.rows.at("environment.office").total == 60.0);
  CHECK(stats.rows.at("locomotion.sit").total == 60.0);
  CHECK(stats.rows.at("indoor_outdoor.indoor").total == 60.0);
  CHECK(stats.rows.at("segments.working_time").total == 60.0);
  CHECK(stats.rows.at("segments.working_device_time").total == 60.0);
}

TEST_CASE("summarize: identical recordings have zero std on every row") {
  Recording a = testutil::make_tiny_recording("p000");
  Recording b = testutil::make_tiny_recording("p001");
  const auto stats = summarize({a, b});
  for (const auto& [name, row] : stats.rows) {
    INFO(name);
    CHECK(row.std == 0.0);
    CHECK(row.total == Catch::Approx(2.0 * row.mean));
  }
}

TEST_CASE("summarize intersects fixation time with attention intervals") {
  Recording rec = testutil::make_tiny_recording();
  rec.gaze.clear();
  // One fixation [39.5, 40.5] straddling the device/environment boundary at 40.
  for (int i = 0; i <= 30; ++i) {
    GazeSample s;
    s.t = 39.5 + i / 30.0;
    s.valid = true;
    s.x = 0.0;
    s.y = 0.0;
    rec.gaze.push_back(s);
  }
  const auto stats = summarize({rec});
  CHECK(stats.rows.at("fixation_time.on_device").total == Catch::Approx(0.5));
  CHECK(stats.rows.at("fixation_time.off_device").total == Catch::Approx(0.5));
}

TEST_CASE("per-category times partition the annotated total") {
  SynthConfig cfg;
  cfg.n_participants = 2;
  cfg.session_length_s = 400.0;
  cfg.cue_probability = 0.4;
  cfg.seed = 99;
  const auto corpus = generate_corpus(cfg);
  const auto stats = summarize(corpus.recordings);
  for (const auto& p : stats.per_participant) {
    const double annotated = p.device_time + p.environment_time;
    double env_sum = 0.0;
    for (const auto& [env, t] : p.environment_times) env_sum += t;
    double loco_sum = 0.0;
    for (const auto& [loco, t] : p.locomotion_times) loco_sum += t;
    CHECK(env_sum == Catch::Approx(annotated).margin(1e-9));
    CHECK(p.indoor_time + p.outdoor_time == Catch::Approx(annotated).margin(1e-9));
    CHECK(loco_sum == Catch::Approx(annotated).margin(1e-9));
  }
}

TEST_CASE("summary serializes with the expected row families") {
  const auto stats = summarize({testutil::make_tiny_recording()});
  const json j = summary_to_json(stats);
  CHECK(j.at("participants") == 1);
  for (const char* row : {"shifts.to_environment", "shifts.to_device",
                          "attention_time.on_device", "attention_time.off_device",
                          "fixation_time.on_device", "fixation_time.off_device",
                          "indoor_outdoor.indoor", "indoor_outdoor.outdoor",
                          "segments.working_time", "segments.waiting_time",
                          "locomotion.sit", "locomotion.stand", "locomotion.walk"})
    CHECK(j.at("rows").contains(row));
  for (const auto& env : default_scene_classes())
    CHECK(j.at("rows").contains("environment." + env));
}
