#pragma once

// Canonical data model for one recorded session: timestamped sensor streams,
// the attention annotation track and the working/waiting segment schedule,
// plus validated load/save in a JSON-lines + manifest layout.

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "shiftcast/common.hpp"

namespace shiftcast {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Sample types
// ---------------------------------------------------------------------------

struct GazeSample {
  double t = 0.0;  // seconds
  double x = std::numeric_limits<double>::quiet_NaN();  // degrees, +x right
  double y = std::numeric_limits<double>::quiet_NaN();  // degrees, +y up
  bool valid = false;

  bool operator==(const GazeSample& o) const {
    auto same = [](double a, double b) {
      return (std::isnan(a) && std::isnan(b)) || a == b;
    };
    return t == o.t && valid == o.valid && same(x, o.x) && same(y, o.y);
  }
};

struct ImuSample {
  double t = 0.0;
  std::array<double, 3> accel{};  // m/s^2
  std::array<double, 3> gyro{};   // rad/s
  std::optional<std::array<double, 3>> orientation;  // degrees, phone only

  bool operator==(const ImuSample&) const = default;
};

enum class PhoneEventKind { Touch, ScreenOn, ScreenOff, AppStart, AppStop };

struct PhoneEvent {
  double t = 0.0;
  PhoneEventKind kind = PhoneEventKind::Touch;
  std::string app_id;  // AppStart/AppStop only

  bool operator==(const PhoneEvent&) const = default;
};

/// Per-map summary statistics of a dense scene map (saliency, objectness,
/// depth), as produced by the upstream vision models.
struct MapStats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double std = 0.0;
  double entropy = 0.0;

  bool operator==(const MapStats&) const = default;
};

/// Coarse grid of map values in scene-camera angular coordinates, used for
/// at-gaze lookups. Row 0 is the top of the field of view.
struct MapGrid {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;  // row-major, rows*cols

  double at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
  bool operator==(const MapGrid&) const = default;
};

struct FrameFeatures {
  double t = 0.0;
  int face_count = 0;
  std::vector<std::uint8_t> class_presence;        // length C, 0/1
  std::vector<std::uint32_t> class_pixel_counts;   // length C
  std::vector<std::uint32_t> class_instance_counts;  // length C
  std::vector<std::uint8_t> scene_onehot;          // length S, exactly one 1
  MapStats saliency;
  MapStats objectness;
  MapStats depth;
  std::optional<MapGrid> saliency_map;
  std::optional<MapGrid> objectness_map;
  std::optional<MapGrid> depth_map;

  bool operator==(const FrameFeatures&) const = default;
};

// ---------------------------------------------------------------------------
// Annotations and segments
// ---------------------------------------------------------------------------

enum class Attention { Device, Environment };
enum class Locomotion { Sit, Stand, Walk };
enum class SegmentKind { Working, Waiting };

inline const char* to_string(Attention a) {
  return a == Attention::Device ? "device" : "environment";
}
inline const char* to_string(Locomotion l) {
  switch (l) {
    case Locomotion::Sit: return "sit";
    case Locomotion::Stand: return "stand";
    default: return "walk";
  }
}
inline const char* to_string(SegmentKind k) {
  return k == SegmentKind::Working ? "working" : "waiting";
}

/// One annotated interval. Intervals are half-open [start, end).
struct AnnotationInterval {
  double start = 0.0;
  double end = 0.0;
  Attention attention = Attention::Device;
  std::string environment;  // one of the manifest scene classes
  bool indoor = true;
  Locomotion locomotion = Locomotion::Sit;

  bool operator==(const AnnotationInterval&) const = default;
};

struct AnnotationTrack {
  std::vector<AnnotationInterval> intervals;

  bool empty() const { return intervals.empty(); }
  double start() const { return intervals.front().start; }
  double end() const { return intervals.back().end; }
  bool operator==(const AnnotationTrack&) const = default;
};

struct Segment {
  double start = 0.0;
  double end = 0.0;
  SegmentKind kind = SegmentKind::Working;
  int block_index = 0;

  bool operator==(const Segment&) const = default;
};

struct SegmentSchedule {
  std::vector<Segment> segments;

  bool operator==(const SegmentSchedule&) const = default;
};

// ---------------------------------------------------------------------------
// Manifest constants
// ---------------------------------------------------------------------------

inline std::vector<std::string> default_object_classes() {
  return {"aeroplane", "bicycle", "bird",   "boat",   "bottle",
          "bus",       "car",     "cat",    "chair",  "cow",
          "diningtable", "dog",   "horse",  "motorbike", "person",
          "pottedplant", "sheep", "sofa",   "train",  "tvmonitor"};
}

inline std::vector<std::string> default_scene_classes() {
  return {"cafe", "corridor", "library", "canteen", "office", "street"};
}

/// Per-recording constants carried by the manifest.
struct RecordingConstants {
  std::uint64_t frame_pixel_total = 1280ull * 720ull;
  std::vector<std::string> object_classes = default_object_classes();
  std::vector<std::string> scene_classes = default_scene_classes();
  std::vector<std::string> apps = {"chat", "browser", "game"};
  int map_grid_rows = 32;
  int map_grid_cols = 32;
  double fov_degrees = 175.0;

  bool operator==(const RecordingConstants&) const = default;
};

struct Recording {
  std::string participant_id;
  RecordingConstants constants;
  std::vector<GazeSample> gaze;
  std::vector<ImuSample> head_imu;
  std::vector<ImuSample> phone_imu;
  std::vector<PhoneEvent> phone_events;
  std::vector<FrameFeatures> frames;
  AnnotationTrack annotations;
  SegmentSchedule segments;

  bool operator==(const Recording&) const = default;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace detail {

inline std::string at_t(double t) {
  std::ostringstream os;
  os.precision(17);
  os << " at t=" << t;
  return os.str();
}

inline bool finite3(const std::array<double, 3>& v) {
  return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
}

}  // namespace detail

inline void validate_gaze(const std::vector<GazeSample>& gaze) {
  double prev = -std::numeric_limits<double>::infinity();
  for (const auto& s : gaze) {
    if (!std::isfinite(s.t) || s.t <= prev)
      throw ValidationError("gaze: timestamps not strictly increasing" + detail::at_t(s.t));
    if (s.valid && (!std::isfinite(s.x) || !std::isfinite(s.y)))
      throw ValidationError("gaze: valid sample with non-finite position" + detail::at_t(s.t));
    prev = s.t;
  }
}

inline void validate_imu(const std::vector<ImuSample>& imu, const std::string& name) {
  double prev = -std::numeric_limits<double>::infinity();
  for (const auto& s : imu) {
    if (!std::isfinite(s.t) || s.t <= prev)
      throw ValidationError(name + ": timestamps not strictly increasing" + detail::at_t(s.t));
    if (!detail::finite3(s.accel) || !detail::finite3(s.gyro) ||
        (s.orientation && !detail::finite3(*s.orientation)))
      throw ValidationError(name + ": non-finite sensor vector" + detail::at_t(s.t));
    prev = s.t;
  }
}

inline void validate_phone_events(const std::vector<PhoneEvent>& events) {
  double prev = -std::numeric_limits<double>::infinity();
  std::optional<bool> screen_on;
  std::vector<std::string> active_apps;
  for (const auto& e : events) {
    if (!std::isfinite(e.t) || e.t < prev)
      throw ValidationError("phone_events: timestamps decrease" + detail::at_t(e.t));
    prev = e.t;
    switch (e.kind) {
      case PhoneEventKind::ScreenOn:
        if (screen_on && *screen_on)
          throw ValidationError("phone_events: screen_on without intervening screen_off" +
                                detail::at_t(e.t));
        screen_on = true;
        break;
      case PhoneEventKind::ScreenOff:
        if (screen_on && !*screen_on)
          throw ValidationError("phone_events: screen_off without intervening screen_on" +
                                detail::at_t(e.t));
        screen_on = false;
        break;
      case PhoneEventKind::AppStart: {
        if (std::find(active_apps.begin(), active_apps.end(), e.app_id) != active_apps.end())
          throw ValidationError("phone_events: app_start for already-active app '" + e.app_id +
                                "'" + detail::at_t(e.t));
        active_apps.push_back(e.app_id);
        break;
      }
      case PhoneEventKind::AppStop: {
        auto it = std::find(active_apps.begin(), active_apps.end(), e.app_id);
        if (it == active_apps.end())
          throw ValidationError("phone_events: app_stop without matching app_start for '" +
                                e.app_id + "'" + detail::at_t(e.t));
        active_apps.erase(it);
        break;
      }
      case PhoneEventKind::Touch:
        break;
    }
  }
  // Apps left open at end of stream are fine: the session was simply cut.
}

inline void validate_map_stats(const MapStats& m, const std::string& what, double t,
                               bool unit_range) {
  if (!(std::isfinite(m.mean) && std::isfinite(m.min) && std::isfinite(m.max) &&
        std::isfinite(m.std) && std::isfinite(m.entropy)))
    throw ValidationError("frames: non-finite " + what + " stats" + detail::at_t(t));
  if (m.min > m.mean || m.mean > m.max)
    throw ValidationError("frames: " + what + " violates min<=mean<=max" + detail::at_t(t));
  if (m.std < 0.0)
    throw ValidationError("frames: negative " + what + " std" + detail::at_t(t));
  if (m.entropy < 0.0)
    throw ValidationError("frames: negative " + what + " entropy" + detail::at_t(t));
  if (unit_range && (m.min < 0.0 || m.max > 1.0))
    throw ValidationError("frames: " + what + " outside [0,1]" + detail::at_t(t));
}

inline void validate_frames(const std::vector<FrameFeatures>& frames,
                            const RecordingConstants& constants) {
  const std::size_t c = constants.object_classes.size();
  const std::size_t s = constants.scene_classes.size();
  double prev = -std::numeric_limits<double>::infinity();
  for (const auto& f : frames) {
    if (!std::isfinite(f.t) || f.t <= prev)
      throw ValidationError("frames: timestamps not strictly increasing" + detail::at_t(f.t));
    prev = f.t;
    if (f.face_count < 0)
      throw ValidationError("frames: negative face count" + detail::at_t(f.t));
    if (f.class_presence.size() != c || f.class_pixel_counts.size() != c ||
        f.class_instance_counts.size() != c)
      throw ValidationError("frames: class vector length != " + std::to_string(c) +
                            detail::at_t(f.t));
    for (std::uint32_t px : f.class_pixel_counts)
      if (px > constants.frame_pixel_total)
        throw ValidationError("frames: pixel count exceeds frame total" + detail::at_t(f.t));
    if (f.scene_onehot.size() != s)
      throw ValidationError("frames: scene vector length != " + std::to_string(s) +
                            detail::at_t(f.t));
    int ones = 0;
    for (std::uint8_t v : f.scene_onehot) {
      if (v > 1) throw ValidationError("frames: scene one-hot entry > 1" + detail::at_t(f.t));
      ones += v;
    }
    if (ones != 1)
      throw ValidationError("frames: scene one-hot must have exactly one 1" + detail::at_t(f.t));
    validate_map_stats(f.saliency, "saliency", f.t, true);
    validate_map_stats(f.objectness, "objectness", f.t, true);
    validate_map_stats(f.depth, "depth", f.t, false);
    for (const auto* grid : {&f.saliency_map, &f.objectness_map, &f.depth_map}) {
      if (!grid->has_value()) continue;
      const MapGrid& g = **grid;
      if (g.rows != constants.map_grid_rows || g.cols != constants.map_grid_cols ||
          g.values.size() != static_cast<std::size_t>(g.rows) * g.cols)
        throw ValidationError("frames: map grid shape mismatch" + detail::at_t(f.t));
    }
  }
}

inline void validate_annotations(const AnnotationTrack& track,
                                 const RecordingConstants& constants) {
  const AnnotationInterval* prev = nullptr;
  for (const auto& iv : track.intervals) {
    if (!(std::isfinite(iv.start) && std::isfinite(iv.end)) || iv.end <= iv.start)
      throw ValidationError("annotations: interval end <= start" + detail::at_t(iv.start));
    if (std::find(constants.scene_classes.begin(), constants.scene_classes.end(),
                  iv.environment) == constants.scene_classes.end())
      throw ValidationError("annotations: unknown environment '" + iv.environment + "'" +
                            detail::at_t(iv.start));
    if (prev) {
      if (iv.start < prev->end)
        throw ValidationError("annotations: intervals overlap or out of order" +
                              detail::at_t(iv.start));
      const bool contiguous = iv.start == prev->end;
      const bool same_context = iv.environment == prev->environment &&
                                iv.indoor == prev->indoor &&
                                iv.locomotion == prev->locomotion;
      if (contiguous && iv.attention == prev->attention && same_context)
        throw ValidationError(
            "annotations: consecutive intervals with equal attention and context" +
            detail::at_t(iv.start));
    }
    prev = &iv;
  }
}

inline void validate_segments(const SegmentSchedule& schedule) {
  const Segment* prev = nullptr;
  for (const auto& seg : schedule.segments) {
    if (!(std::isfinite(seg.start) && std::isfinite(seg.end)) || seg.end <= seg.start)
      throw ValidationError("segments: segment end <= start" + detail::at_t(seg.start));
    if (prev) {
      if (seg.start < prev->end)
        throw ValidationError("segments: segments overlap or out of order" +
                              detail::at_t(seg.start));
      if (seg.block_index < prev->block_index)
        throw ValidationError("segments: block indices decrease" + detail::at_t(seg.start));
      if (seg.block_index == prev->block_index && seg.kind == prev->kind)
        throw ValidationError("segments: kinds do not alternate within block" +
                              detail::at_t(seg.start));
    }
    prev = &seg;
  }
}

/// Validates every type invariant plus the cross-stream requirement that each
/// populated stream overlaps the annotated time range.
inline void validate_recording(const Recording& rec) {
  if (rec.participant_id.empty())
    throw ValidationError("recording: empty participant_id");
  validate_gaze(rec.gaze);
  validate_imu(rec.head_imu, "head_imu");
  validate_imu(rec.phone_imu, "phone_imu");
  for (const auto& s : rec.head_imu)
    if (s.orientation)
      throw ValidationError("head_imu: unexpected orientation field" + detail::at_t(s.t));
  validate_phone_events(rec.phone_events);
  validate_frames(rec.frames, rec.constants);
  validate_annotations(rec.annotations, rec.constants);
  validate_segments(rec.segments);
  if (rec.annotations.empty())
    throw ValidationError("recording: annotation track is empty");

  const double a0 = rec.annotations.start();
  const double a1 = rec.annotations.end();
  auto check_overlap = [&](double lo, double hi, const std::string& name) {
    if (hi < a0 || lo > a1)
      throw ValidationError("recording: stream '" + name +
                            "' does not overlap the annotation range" + detail::at_t(lo));
  };
  if (!rec.gaze.empty()) check_overlap(rec.gaze.front().t, rec.gaze.back().t, "gaze");
  if (!rec.head_imu.empty())
    check_overlap(rec.head_imu.front().t, rec.head_imu.back().t, "head_imu");
  if (!rec.phone_imu.empty())
    check_overlap(rec.phone_imu.front().t, rec.phone_imu.back().t, "phone_imu");
  if (!rec.phone_events.empty())
    check_overlap(rec.phone_events.front().t, rec.phone_events.back().t, "phone_events");
  if (!rec.frames.empty()) check_overlap(rec.frames.front().t, rec.frames.back().t, "frames");
}

// ---------------------------------------------------------------------------
// JSON-lines serialization
// ---------------------------------------------------------------------------
//
// Stream files hold one record per line with a mandatory "t" field (seconds,
// decimal). The manifest is a single JSON document listing participant_id,
// stream paths and the recording constants. See docs/formats.md.

namespace detail {

inline json map_stats_to_json(const MapStats& m) {
  return json{{"mean", m.mean}, {"min", m.min}, {"max", m.max},
              {"std", m.std},   {"ent", m.entropy}};
}

inline MapStats map_stats_from_json(const json& j) {
  MapStats m;
  m.mean = j.at("mean").get<double>();
  m.min = j.at("min").get<double>();
  m.max = j.at("max").get<double>();
  m.std = j.at("std").get<double>();
  m.entropy = j.at("ent").get<double>();
  return m;
}

inline json grid_to_json(const MapGrid& g) {
  return json{{"rows", g.rows}, {"cols", g.cols}, {"values", g.values}};
}

inline MapGrid grid_from_json(const json& j) {
  MapGrid g;
  g.rows = j.at("rows").get<int>();
  g.cols = j.at("cols").get<int>();
  g.values = j.at("values").get<std::vector<double>>();
  return g;
}

}  // namespace detail

inline json to_json(const GazeSample& s) {
  json j{{"t", s.t}, {"valid", s.valid}};
  if (s.valid) {
    j["x"] = s.x;
    j["y"] = s.y;
  }
  return j;
}

inline json to_json(const ImuSample& s) {
  json j{{"t", s.t}, {"accel", s.accel}, {"gyro", s.gyro}};
  if (s.orientation) j["orient"] = *s.orientation;
  return j;
}

inline json to_json(const PhoneEvent& e) {
  json j{{"t", e.t}};
  switch (e.kind) {
    case PhoneEventKind::Touch: j["kind"] = "touch"; break;
    case PhoneEventKind::ScreenOn: j["kind"] = "screen_on"; break;
    case PhoneEventKind::ScreenOff: j["kind"] = "screen_off"; break;
    case PhoneEventKind::AppStart: j["kind"] = "app_start"; j["app"] = e.app_id; break;
    case PhoneEventKind::AppStop: j["kind"] = "app_stop"; j["app"] = e.app_id; break;
  }
  return j;
}

inline json to_json(const FrameFeatures& f) {
  json j{{"t", f.t},
         {"faces", f.face_count},
         {"present", f.class_presence},
         {"pixels", f.class_pixel_counts},
         {"instances", f.class_instance_counts},
         {"scene", f.scene_onehot},
         {"sal", detail::map_stats_to_json(f.saliency)},
         {"obj", detail::map_stats_to_json(f.objectness)},
         {"depth", detail::map_stats_to_json(f.depth)}};
  if (f.saliency_map) j["sal_map"] = detail::grid_to_json(*f.saliency_map);
  if (f.objectness_map) j["obj_map"] = detail::grid_to_json(*f.objectness_map);
  if (f.depth_map) j["depth_map"] = detail::grid_to_json(*f.depth_map);
  return j;
}

inline json to_json(const AnnotationInterval& iv) {
  return json{{"start", iv.start},
              {"end", iv.end},
              {"attention", to_string(iv.attention)},
              {"environment", iv.environment},
              {"indoor", iv.indoor},
              {"locomotion", to_string(iv.locomotion)}};
}

inline json to_json(const Segment& seg) {
  return json{{"start", seg.start},
              {"end", seg.end},
              {"kind", to_string(seg.kind)},
              {"block", seg.block_index}};
}

inline GazeSample gaze_from_json(const json& j) {
  GazeSample s;
  s.t = j.at("t").get<double>();
  s.valid = j.at("valid").get<bool>();
  if (s.valid) {
    s.x = j.at("x").get<double>();
    s.y = j.at("y").get<double>();
  }
  return s;
}

inline ImuSample imu_from_json(const json& j) {
  ImuSample s;
  s.t = j.at("t").get<double>();
  s.accel = j.at("accel").get<std::array<double, 3>>();
  s.gyro = j.at("gyro").get<std::array<double, 3>>();
  if (j.contains("orient")) s.orientation = j.at("orient").get<std::array<double, 3>>();
  return s;
}

inline PhoneEvent phone_event_from_json(const json& j) {
  PhoneEvent e;
  e.t = j.at("t").get<double>();
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "touch") e.kind = PhoneEventKind::Touch;
  else if (kind == "screen_on") e.kind = PhoneEventKind::ScreenOn;
  else if (kind == "screen_off") e.kind = PhoneEventKind::ScreenOff;
  else if (kind == "app_start") e.kind = PhoneEventKind::AppStart;
  else if (kind == "app_stop") e.kind = PhoneEventKind::AppStop;
  else throw FormatError("phone_events: unknown kind '" + kind + "'");
  if (e.kind == PhoneEventKind::AppStart || e.kind == PhoneEventKind::AppStop)
    e.app_id = j.at("app").get<std::string>();
  return e;
}

inline FrameFeatures frame_from_json(const json& j) {
  FrameFeatures f;
  f.t = j.at("t").get<double>();
  f.face_count = j.at("faces").get<int>();
  f.class_presence = j.at("present").get<std::vector<std::uint8_t>>();
  f.class_pixel_counts = j.at("pixels").get<std::vector<std::uint32_t>>();
  f.class_instance_counts = j.at("instances").get<std::vector<std::uint32_t>>();
  f.scene_onehot = j.at("scene").get<std::vector<std::uint8_t>>();
  f.saliency = detail::map_stats_from_json(j.at("sal"));
  f.objectness = detail::map_stats_from_json(j.at("obj"));
  f.depth = detail::map_stats_from_json(j.at("depth"));
  if (j.contains("sal_map")) f.saliency_map = detail::grid_from_json(j.at("sal_map"));
  if (j.contains("obj_map")) f.objectness_map = detail::grid_from_json(j.at("obj_map"));
  if (j.contains("depth_map")) f.depth_map = detail::grid_from_json(j.at("depth_map"));
  return f;
}

inline AnnotationInterval annotation_from_json(const json& j) {
  AnnotationInterval iv;
  iv.start = j.at("start").get<double>();
  iv.end = j.at("end").get<double>();
  const std::string att = j.at("attention").get<std::string>();
  if (att == "device") iv.attention = Attention::Device;
  else if (att == "environment") iv.attention = Attention::Environment;
  else throw FormatError("annotations: unknown attention '" + att + "'");
  iv.environment = j.at("environment").get<std::string>();
  iv.indoor = j.at("indoor").get<bool>();
  const std::string loc = j.at("locomotion").get<std::string>();
  if (loc == "sit") iv.locomotion = Locomotion::Sit;
  else if (loc == "stand") iv.locomotion = Locomotion::Stand;
  else if (loc == "walk") iv.locomotion = Locomotion::Walk;
  else throw FormatError("annotations: unknown locomotion '" + loc + "'");
  return iv;
}

inline Segment segment_from_json(const json& j) {
  Segment seg;
  seg.start = j.at("start").get<double>();
  seg.end = j.at("end").get<double>();
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "working") seg.kind = SegmentKind::Working;
  else if (kind == "waiting") seg.kind = SegmentKind::Waiting;
  else throw FormatError("segments: unknown kind '" + kind + "'");
  seg.block_index = j.at("block").get<int>();
  return seg;
}

// ---------------------------------------------------------------------------
// Manifest + directory I/O
// ---------------------------------------------------------------------------

namespace detail {

inline json constants_to_json(const RecordingConstants& c) {
  return json{{"frame_pixel_total", c.frame_pixel_total},
              {"object_classes", c.object_classes},
              {"scene_classes", c.scene_classes},
              {"apps", c.apps},
              {"map_grid", json{{"rows", c.map_grid_rows},
                                {"cols", c.map_grid_cols},
                                {"fov_degrees", c.fov_degrees}}}};
}

inline RecordingConstants constants_from_json(const json& j) {
  RecordingConstants c;
  c.frame_pixel_total = j.at("frame_pixel_total").get<std::uint64_t>();
  c.object_classes = j.at("object_classes").get<std::vector<std::string>>();
  c.scene_classes = j.at("scene_classes").get<std::vector<std::string>>();
  if (j.contains("apps")) c.apps = j.at("apps").get<std::vector<std::string>>();
  const json& g = j.at("map_grid");
  c.map_grid_rows = g.at("rows").get<int>();
  c.map_grid_cols = g.at("cols").get<int>();
  c.fov_degrees = g.at("fov_degrees").get<double>();
  return c;
}

template <typename Record, typename FromJson>
std::vector<Record> read_jsonl(const std::filesystem::path& path, FromJson from_json,
                               double clock_offset, const std::string& stream_name) {
  std::ifstream in(path);
  if (!in) throw MissingStreamError("missing stream file: " + path.string());
  std::vector<Record> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(stream_name + ":" + std::to_string(line_no) +
                        ": malformed record: " + e.what());
    }
    try {
      Record r = from_json(j);
      r.t += clock_offset;
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(stream_name + ":" + std::to_string(line_no) +
                        ": missing or mistyped field: " + e.what());
    }
  }
  return out;
}

template <typename Record, typename ToJson>
void write_jsonl(const std::filesystem::path& path, const std::vector<Record>& records,
                 ToJson to_json_fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  for (const auto& r : records) out << to_json_fn(r).dump() << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace detail

/// Loads a Recording from a manifest file, applies per-stream clock offsets,
/// and validates every invariant. Fails with MissingStream / FormatError /
/// ValidationError as appropriate.
inline Recording load_recording(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw MissingStreamError("missing manifest: " + manifest_path.string());
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("manifest: " + std::string(e.what()));
  }

  Recording rec;
  try {
    rec.participant_id = manifest.at("participant_id").get<std::string>();
    rec.constants = detail::constants_from_json(manifest.at("constants"));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("manifest: " + std::string(e.what()));
  }

  const auto dir = manifest_path.parent_path();
  const json& streams = manifest.at("streams");
  auto stream_entry = [&](const char* name) -> std::pair<std::filesystem::path, double> {
    const json& s = streams.at(name);
    const double offset = s.contains("clock_offset") ? s.at("clock_offset").get<double>() : 0.0;
    return {dir / s.at("path").get<std::string>(), offset};
  };

  if (streams.contains("gaze")) {
    auto [path, off] = stream_entry("gaze");
    rec.gaze = detail::read_jsonl<GazeSample>(path, gaze_from_json, off, "gaze");
  }
  if (streams.contains("head_imu")) {
    auto [path, off] = stream_entry("head_imu");
    rec.head_imu = detail::read_jsonl<ImuSample>(path, imu_from_json, off, "head_imu");
  }
  if (streams.contains("phone_imu")) {
    auto [path, off] = stream_entry("phone_imu");
    rec.phone_imu = detail::read_jsonl<ImuSample>(path, imu_from_json, off, "phone_imu");
  }
  if (streams.contains("phone_events")) {
    auto [path, off] = stream_entry("phone_events");
    rec.phone_events =
        detail::read_jsonl<PhoneEvent>(path, phone_event_from_json, off, "phone_events");
  }
  if (streams.contains("frames")) {
    auto [path, off] = stream_entry("frames");
    rec.frames = detail::read_jsonl<FrameFeatures>(path, frame_from_json, off, "frames");
  }
  {
    if (!streams.contains("annotations"))
      throw MissingStreamError("manifest lists no annotations stream");
    auto [path, off] = stream_entry("annotations");
    std::ifstream ain(path);
    if (!ain) throw MissingStreamError("missing stream file: " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(ain, line)) {
      ++line_no;
      if (line.empty()) continue;
      try {
        AnnotationInterval iv = annotation_from_json(json::parse(line));
        iv.start += off;
        iv.end += off;
        rec.annotations.intervals.push_back(iv);
      } catch (const nlohmann::json::exception& e) {
        throw FormatError("annotations:" + std::to_string(line_no) + ": " + e.what());
      }
    }
  }
  if (streams.contains("segments")) {
    auto [path, off] = stream_entry("segments");
    std::ifstream sin(path);
    if (!sin) throw MissingStreamError("missing stream file: " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(sin, line)) {
      ++line_no;
      if (line.empty()) continue;
      try {
        Segment seg = segment_from_json(json::parse(line));
        seg.start += off;
        seg.end += off;
        rec.segments.segments.push_back(seg);
      } catch (const nlohmann::json::exception& e) {
        throw FormatError("segments:" + std::to_string(line_no) + ": " + e.what());
      }
    }
  }

  validate_recording(rec);
  return rec;
}

/// Writes manifest + one JSON-lines file per populated stream into dir.
/// Output is byte-stable for a fixed Recording. Returns the manifest path.
inline std::filesystem::path save_recording(const Recording& rec,
                                            const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());

  json streams = json::object();
  if (!rec.gaze.empty()) {
    detail::write_jsonl(dir / "gaze.jsonl", rec.gaze,
                        [](const GazeSample& s) { return to_json(s); });
    streams["gaze"] = json{{"path", "gaze.jsonl"}};
  }
  if (!rec.head_imu.empty()) {
    detail::write_jsonl(dir / "head_imu.jsonl", rec.head_imu,
                        [](const ImuSample& s) { return to_json(s); });
    streams["head_imu"] = json{{"path", "head_imu.jsonl"}};
  }
  if (!rec.phone_imu.empty()) {
    detail::write_jsonl(dir / "phone_imu.jsonl", rec.phone_imu,
                        [](const ImuSample& s) { return to_json(s); });
    streams["phone_imu"] = json{{"path", "phone_imu.jsonl"}};
  }
  if (!rec.phone_events.empty()) {
    detail::write_jsonl(dir / "phone_events.jsonl", rec.phone_events,
                        [](const PhoneEvent& e) { return to_json(e); });
    streams["phone_events"] = json{{"path", "phone_events.jsonl"}};
  }
  if (!rec.frames.empty()) {
    detail::write_jsonl(dir / "frames.jsonl", rec.frames,
                        [](const FrameFeatures& f) { return to_json(f); });
    streams["frames"] = json{{"path", "frames.jsonl"}};
  }
  detail::write_jsonl(dir / "annotations.jsonl", rec.annotations.intervals,
                      [](const AnnotationInterval& iv) { return to_json(iv); });
  streams["annotations"] = json{{"path", "annotations.jsonl"}};
  if (!rec.segments.segments.empty()) {
    detail::write_jsonl(dir / "segments.jsonl", rec.segments.segments,
                        [](const Segment& s) { return to_json(s); });
    streams["segments"] = json{{"path", "segments.jsonl"}};
  }

  json manifest{{"format", "shiftcast-recording/1"},
                {"participant_id", rec.participant_id},
                {"constants", detail::constants_to_json(rec.constants)},
                {"streams", streams}};
  const auto manifest_path = dir / "manifest.json";
  std::ofstream out(manifest_path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + manifest_path.string());
  out << manifest.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + manifest_path.string());
  return manifest_path;
}

}  // namespace shiftcast
