#pragma once

// Attention timeline derived from the annotation track: point queries, shift
// events, and per-corpus summary statistics.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shiftcast/gaze.hpp"
#include "shiftcast/recording.hpp"

namespace shiftcast {

enum class ShiftDirection { ToEnvironment, ToDevice };

inline const char* to_string(ShiftDirection d) {
  return d == ShiftDirection::ToEnvironment ? "to_environment" : "to_device";
}

struct ShiftEvent {
  double t = 0.0;
  ShiftDirection direction = ShiftDirection::ToEnvironment;

  bool operator==(const ShiftEvent&) const = default;
};

/// Attention value of the half-open interval [start, end) containing t;
/// nullopt when t falls in no annotated interval.
inline std::optional<Attention> attention_at(const AnnotationTrack& annotations, double t) {
  const auto& ivs = annotations.intervals;
  auto it = std::upper_bound(ivs.begin(), ivs.end(), t,
                             [](double v, const AnnotationInterval& iv) { return v < iv.start; });
  if (it == ivs.begin()) return std::nullopt;
  --it;
  if (t >= it->start && t < it->end) return it->attention;
  return std::nullopt;
}

/// The full interval containing t, when annotated.
inline const AnnotationInterval* interval_at(const AnnotationTrack& annotations, double t) {
  const auto& ivs = annotations.intervals;
  auto it = std::upper_bound(ivs.begin(), ivs.end(), t,
                             [](double v, const AnnotationInterval& iv) { return v < iv.start; });
  if (it == ivs.begin()) return nullptr;
  --it;
  return (t >= it->start && t < it->end) ? &*it : nullptr;
}

/// One event per boundary where attention changes between consecutive
/// contiguous intervals. Gaps in annotation break the span: no event is
/// inferred across a gap.
inline std::vector<ShiftEvent> shift_events(const AnnotationTrack& annotations) {
  std::vector<ShiftEvent> out;
  const auto& ivs = annotations.intervals;
  for (std::size_t i = 1; i < ivs.size(); ++i) {
    const bool contiguous = ivs[i].start == ivs[i - 1].end;
    if (!contiguous || ivs[i].attention == ivs[i - 1].attention) continue;
    out.push_back({ivs[i].start, ivs[i].attention == Attention::Environment
                                     ? ShiftDirection::ToEnvironment
                                     : ShiftDirection::ToDevice});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Summary statistics
// ---------------------------------------------------------------------------

/// Per-participant values for each summary row.
struct ParticipantStats {
  std::string participant_id;
  double shifts_to_environment = 0.0;
  double shifts_to_device = 0.0;
  double device_time = 0.0;       // seconds of annotated on-device attention
  double environment_time = 0.0;  // seconds of annotated off-device attention
  double fixation_on_device = 0.0;   // fixation time intersected with device intervals
  double fixation_off_device = 0.0;  // fixation time intersected with environment intervals
  std::map<std::string, double> environment_times;  // per scene class, seconds
  double indoor_time = 0.0;
  double outdoor_time = 0.0;
  std::map<std::string, double> locomotion_times;  // sit / stand / walk, seconds
  double working_time = 0.0;
  double waiting_time = 0.0;
  double device_time_working = 0.0;  // on-device attention within working segments
  double device_time_waiting = 0.0;
};

struct StatRow {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation across participants
  double total = 0.0;
};

struct SummaryStats {
  std::vector<ParticipantStats> per_participant;
  std::map<std::string, StatRow> rows;  // keyed by row name, see summarize()
};

namespace detail {

inline double overlap(double a0, double a1, double b0, double b1) {
  const double lo = std::max(a0, b0);
  const double hi = std::min(a1, b1);
  return hi > lo ? hi - lo : 0.0;
}

inline StatRow make_row(const std::vector<double>& values) {
  StatRow row;
  if (values.empty()) return row;
  for (double v : values) row.total += v;
  row.mean = row.total / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - row.mean) * (v - row.mean);
  row.std = std::sqrt(ss / static_cast<double>(values.size()));
  return row;
}

}  // namespace detail

/// Mean / population-std / total across participants for every summary row
/// family: shift counts, attention time on/off device, fixation time on/off
/// device, per-environment, indoor/outdoor, locomotion, and working/waiting
/// segment time. Fixation rows intersect detected fixations (default
/// parameters) with the annotation intervals.
inline SummaryStats summarize(const std::vector<Recording>& recordings) {
  SummaryStats stats;
  for (const auto& rec : recordings) {
    ParticipantStats p;
    p.participant_id = rec.participant_id;
    for (const auto& name : rec.constants.scene_classes) p.environment_times[name] = 0.0;
    p.locomotion_times = {{"sit", 0.0}, {"stand", 0.0}, {"walk", 0.0}};

    for (const auto& ev : shift_events(rec.annotations)) {
      if (ev.direction == ShiftDirection::ToEnvironment)
        p.shifts_to_environment += 1.0;
      else
        p.shifts_to_device += 1.0;
    }

    for (const auto& iv : rec.annotations.intervals) {
      const double len = iv.end - iv.start;
      if (iv.attention == Attention::Device)
        p.device_time += len;
      else
        p.environment_time += len;
      p.environment_times[iv.environment] += len;
      (iv.indoor ? p.indoor_time : p.outdoor_time) += len;
      p.locomotion_times[to_string(iv.locomotion)] += len;
      if (iv.attention == Attention::Device) {
        for (const auto& seg : rec.segments.segments) {
          const double o = detail::overlap(iv.start, iv.end, seg.start, seg.end);
          if (o <= 0.0) continue;
          (seg.kind == SegmentKind::Working ? p.device_time_working : p.device_time_waiting) += o;
        }
      }
    }

    for (const auto& seg : rec.segments.segments) {
      (seg.kind == SegmentKind::Working ? p.working_time : p.waiting_time) +=
          seg.end - seg.start;
    }

    const auto fixations = detect_fixations(rec.gaze);
    for (const auto& f : fixations) {
      for (const auto& iv : rec.annotations.intervals) {
        const double o = detail::overlap(f.t_start, f.t_end, iv.start, iv.end);
        if (o <= 0.0) continue;
        (iv.attention == Attention::Device ? p.fixation_on_device : p.fixation_off_device) += o;
      }
    }

    stats.per_participant.push_back(std::move(p));
  }

  auto collect = [&](const std::string& name, auto getter) {
    std::vector<double> values;
    values.reserve(stats.per_participant.size());
    for (const auto& p : stats.per_participant) values.push_back(getter(p));
    stats.rows[name] = detail::make_row(values);
  };
  collect("shifts.to_environment", [](const ParticipantStats& p) { return p.shifts_to_environment; });
  collect("shifts.to_device", [](const ParticipantStats& p) { return p.shifts_to_device; });
  collect("attention_time.on_device", [](const ParticipantStats& p) { return p.device_time; });
  collect("attention_time.off_device",
          [](const ParticipantStats& p) { return p.environment_time; });
  collect("fixation_time.on_device", [](const ParticipantStats& p) { return p.fixation_on_device; });
  collect("fixation_time.off_device",
          [](const ParticipantStats& p) { return p.fixation_off_device; });
  collect("indoor_outdoor.indoor", [](const ParticipantStats& p) { return p.indoor_time; });
  collect("indoor_outdoor.outdoor", [](const ParticipantStats& p) { return p.outdoor_time; });
  collect("segments.working_time", [](const ParticipantStats& p) { return p.working_time; });
  collect("segments.waiting_time", [](const ParticipantStats& p) { return p.waiting_time; });
  collect("segments.working_device_time",
          [](const ParticipantStats& p) { return p.device_time_working; });
  collect("segments.waiting_device_time",
          [](const ParticipantStats& p) { return p.device_time_waiting; });
  if (!stats.per_participant.empty()) {
    for (const auto& [env, unused] : stats.per_participant.front().environment_times) {
      (void)unused;
      collect("environment." + env, [&env](const ParticipantStats& p) {
        auto it = p.environment_times.find(env);
        return it == p.environment_times.end() ? 0.0 : it->second;
      });
    }
    for (const std::string loco : {"sit", "stand", "walk"}) {
      collect("locomotion." + loco, [&loco](const ParticipantStats& p) {
        auto it = p.locomotion_times.find(loco);
        return it == p.locomotion_times.end() ? 0.0 : it->second;
      });
    }
  }
  return stats;
}

/// JSON report mirroring the summary row families.
inline json summary_to_json(const SummaryStats& stats) {
  json rows = json::object();
  for (const auto& [name, row] : stats.rows)
    rows[name] = json{{"mean", row.mean}, {"std", row.std}, {"total", row.total}};
  json per = json::array();
  for (const auto& p : stats.per_participant) {
    json envs = json::object();
    for (const auto& [k, v] : p.environment_times) envs[k] = v;
    json locos = json::object();
    for (const auto& [k, v] : p.locomotion_times) locos[k] = v;
    per.push_back(json{{"participant", p.participant_id},
                       {"shifts_to_environment", p.shifts_to_environment},
                       {"shifts_to_device", p.shifts_to_device},
                       {"attention_time_on_device", p.device_time},
                       {"attention_time_off_device", p.environment_time},
                       {"fixation_time_on_device", p.fixation_on_device},
                       {"fixation_time_off_device", p.fixation_off_device},
                       {"environment_times", envs},
                       {"indoor_time", p.indoor_time},
                       {"outdoor_time", p.outdoor_time},
                       {"locomotion_times", locos},
                       {"working_time", p.working_time},
                       {"waiting_time", p.waiting_time},
                       {"working_device_time", p.device_time_working},
                       {"waiting_device_time", p.device_time_waiting}});
  }
  return json{{"participants", stats.per_participant.size()}, {"rows", rows}, {"per_participant", per}};
}

}  // namespace shiftcast
