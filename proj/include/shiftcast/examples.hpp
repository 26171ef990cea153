#pragma once

// Labeled (feature window -> target window) example generation for the three
// prediction tasks, class balancing, and leave-one-person-out folds.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "shiftcast/features.hpp"
#include "shiftcast/timeline.hpp"

namespace shiftcast {

enum class Task { ShiftToEnvironment, ShiftToDevice, PrimaryFocus };

inline const char* to_string(Task t) {
  switch (t) {
    case Task::ShiftToEnvironment: return "shift_to_environment";
    case Task::ShiftToDevice: return "shift_to_device";
    default: return "primary_focus";
  }
}

inline Task task_from_string(const std::string& s) {
  if (s == "shift_to_environment") return Task::ShiftToEnvironment;
  if (s == "shift_to_device") return Task::ShiftToDevice;
  if (s == "primary_focus") return Task::PrimaryFocus;
  throw ConfigError("unknown task '" + s + "'");
}

inline double default_target_window(Task t) {
  switch (t) {
    case Task::ShiftToEnvironment: return 1.0;
    case Task::ShiftToDevice: return 10.0;
    default: return 5.0;
  }
}

struct TaskConfig {
  Task task = Task::ShiftToEnvironment;
  double feature_window = 1.0;  // seconds
  double target_window = 1.0;   // seconds; usually 1, 5 or 10
  double stride = 0.5;          // seconds between candidate reference times

  static TaskConfig for_task(Task t) {
    TaskConfig cfg;
    cfg.task = t;
    cfg.target_window = default_target_window(t);
    return cfg;
  }

  void validate() const {
    if (feature_window <= 0.0 || target_window <= 0.0 || stride <= 0.0)
      throw ConfigError("task config windows and stride must be positive");
  }
};

/// One prediction instance. The feature window is [t_ref - feature_window,
/// t_ref) and the target window is (t_ref, t_ref + target_window].
struct Example {
  std::string participant_id;
  double t_ref = 0.0;
  FeatureVector features;
  bool label = false;
  SegmentKind segment_kind = SegmentKind::Working;
  std::string environment;
  Task task = Task::ShiftToEnvironment;
};

namespace detail {

// Maximal runs of contiguous annotation intervals.
struct Span {
  double start = 0.0;
  double end = 0.0;
};

inline std::vector<Span> contiguous_spans(const AnnotationTrack& track) {
  std::vector<Span> spans;
  for (const auto& iv : track.intervals) {
    if (!spans.empty() && iv.start == spans.back().end) {
      spans.back().end = iv.end;
    } else {
      spans.push_back({iv.start, iv.end});
    }
  }
  return spans;
}

inline const Span* span_containing(const std::vector<Span>& spans, double lo, double hi) {
  auto it = std::upper_bound(spans.begin(), spans.end(), lo,
                             [](double v, const Span& s) { return v < s.start; });
  if (it == spans.begin()) return nullptr;
  --it;
  return (lo >= it->start && hi <= it->end) ? &*it : nullptr;
}

inline const Segment* segment_containing(const SegmentSchedule& schedule, double lo,
                                         double hi) {
  const auto& segs = schedule.segments;
  auto it = std::upper_bound(segs.begin(), segs.end(), lo,
                             [](double v, const Segment& s) { return v < s.start; });
  if (it == segs.begin()) return nullptr;
  --it;
  return (lo >= it->start && hi <= it->end) ? &*it : nullptr;
}

inline double device_time_in(const AnnotationTrack& track, double lo, double hi) {
  double total = 0.0;
  for (const auto& iv : track.intervals) {
    if (iv.end <= lo) continue;
    if (iv.start >= hi) break;
    if (iv.attention != Attention::Device) continue;
    total += std::min(iv.end, hi) - std::max(iv.start, lo);
  }
  return total;
}

}  // namespace detail

/// Generates examples over the stride grid of one recording. A reference time
/// t_ref qualifies when [t_ref - feature_window, t_ref + target_window] lies
/// inside one contiguous annotated span and one segment. Shift tasks are
/// additionally gated on the current attention value at t_ref (the interface
/// is assumed to know it), and labeled by whether a matching shift occurs in
/// the target window; the focus task is labeled by the on-device fraction of
/// the target window exceeding one half.
inline std::vector<Example> generate_examples(const FeatureExtractor& extractor,
                                              const TaskConfig& cfg, FeatureGroup group) {
  cfg.validate();
  const Recording& rec = extractor.recording();
  std::vector<Example> out;
  if (rec.annotations.empty()) return out;

  const auto spans = detail::contiguous_spans(rec.annotations);
  const auto events = shift_events(rec.annotations);
  const double fw = cfg.feature_window;
  const double tw = cfg.target_window;

  const double first = rec.annotations.start() + fw;
  const double last = rec.annotations.end() - tw;
  auto k0 = static_cast<long long>(std::ceil(first / cfg.stride - 1e-9));
  for (long long k = k0;; ++k) {
    const double t_ref = static_cast<double>(k) * cfg.stride;
    if (t_ref > last) break;
    const double lo = t_ref - fw;
    const double hi = t_ref + tw;
    if (!detail::span_containing(spans, lo, hi)) continue;
    const Segment* seg = detail::segment_containing(rec.segments, lo, hi);
    if (!seg) continue;
    const AnnotationInterval* iv = interval_at(rec.annotations, t_ref);
    if (!iv) continue;  // t_ref == span end; the window check already failed

    bool label = false;
    switch (cfg.task) {
      case Task::ShiftToEnvironment: {
        if (iv->attention != Attention::Device) continue;
        for (const auto& ev : events) {
          if (ev.t > t_ref && ev.t <= t_ref + tw &&
              ev.direction == ShiftDirection::ToEnvironment) {
            label = true;
            break;
          }
        }
        break;
      }
      case Task::ShiftToDevice: {
        if (iv->attention != Attention::Environment) continue;
        for (const auto& ev : events) {
          if (ev.t > t_ref && ev.t <= t_ref + tw &&
              ev.direction == ShiftDirection::ToDevice) {
            label = true;
            break;
          }
        }
        break;
      }
      case Task::PrimaryFocus: {
        const double device = detail::device_time_in(rec.annotations, t_ref, t_ref + tw);
        label = device / tw > 0.5;  // exact half counts as off-device
        break;
      }
    }

    Example ex;
    ex.participant_id = rec.participant_id;
    ex.t_ref = t_ref;
    ex.features = extractor.extract(lo, t_ref, group);
    ex.label = label;
    ex.segment_kind = seg->kind;
    ex.environment = iv->environment;
    ex.task = cfg.task;
    out.push_back(std::move(ex));
  }
  return out;
}

inline std::vector<Example> generate_examples(const Recording& rec, const TaskConfig& cfg,
                                              FeatureGroup group) {
  return generate_examples(FeatureExtractor(rec), cfg, group);
}

/// Uniformly undersamples the majority class (without replacement) to the
/// minority count. Output preserves input order and is deterministic for a
/// fixed seed. Throws SingleClass when only one class is present.
inline std::vector<Example> balance(const std::vector<Example>& examples,
                                    std::uint64_t seed) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < examples.size(); ++i)
    (examples[i].label ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty())
    throw SingleClassError("both classes must be present to balance");
  if (pos.size() == neg.size()) return examples;

  auto& majority = pos.size() > neg.size() ? pos : neg;
  const std::size_t keep = std::min(pos.size(), neg.size());
  std::mt19937_64 rng(seed);
  std::shuffle(majority.begin(), majority.end(), rng);
  majority.resize(keep);

  std::vector<bool> selected(examples.size(), false);
  for (std::size_t i : pos) selected[i] = true;
  for (std::size_t i : neg) selected[i] = true;
  std::vector<Example> out;
  out.reserve(2 * keep);
  for (std::size_t i = 0; i < examples.size(); ++i)
    if (selected[i]) out.push_back(examples[i]);
  return out;
}

struct Fold {
  std::string participant_id;  // the held-out participant
  std::vector<Example> train;
  std::vector<Example> test;
};

/// One fold per participant, ordered by participant id; the fold's test set
/// is exactly that participant's examples.
inline std::vector<Fold> lopo_folds(const std::vector<Example>& examples) {
  std::vector<std::string> participants;
  for (const auto& ex : examples) participants.push_back(ex.participant_id);
  std::sort(participants.begin(), participants.end());
  participants.erase(std::unique(participants.begin(), participants.end()),
                     participants.end());
  if (participants.size() < 2)
    throw TooFewParticipantsError("leave-one-person-out needs at least 2 participants");

  std::vector<Fold> folds;
  folds.reserve(participants.size());
  for (const auto& p : participants) {
    Fold fold;
    fold.participant_id = p;
    for (const auto& ex : examples)
      (ex.participant_id == p ? fold.test : fold.train).push_back(ex);
    folds.push_back(std::move(fold));
  }
  return folds;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline json example_to_json(const Example& ex) {
  return json{{"participant", ex.participant_id},
              {"t_ref", ex.t_ref},
              {"label", ex.label},
              {"segment", to_string(ex.segment_kind)},
              {"environment", ex.environment},
              {"values", ex.features.values}};
}

inline Example example_from_json(const json& j, const SchemaPtr& schema, Task task) {
  Example ex;
  ex.participant_id = j.at("participant").get<std::string>();
  ex.t_ref = j.at("t_ref").get<double>();
  ex.label = j.at("label").get<bool>();
  ex.segment_kind = j.at("segment").get<std::string>() == "working" ? SegmentKind::Working
                                                                    : SegmentKind::Waiting;
  ex.environment = j.at("environment").get<std::string>();
  ex.features.schema = schema;
  ex.features.values = j.at("values").get<std::vector<double>>();
  ex.task = task;
  if (ex.features.values.size() != schema->size())
    throw SchemaMismatchError("example value count does not match schema");
  return ex;
}

/// JSON-lines example file: one header line (task, group, feature names,
/// provenance) followed by one example per line.
inline void write_examples_jsonl(const std::filesystem::path& path,
                                 const std::vector<Example>& examples, Task task,
                                 const SchemaPtr& schema, const json& provenance) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  json header{{"kind", "header"},
              {"format", "shiftcast-examples/1"},
              {"task", to_string(task)},
              {"group", to_string(schema->group)},
              {"feature_names", schema->names},
              {"provenance", provenance}};
  out << header.dump() << '\n';
  for (const auto& ex : examples) out << example_to_json(ex).dump() << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

struct ExamplesFile {
  Task task = Task::ShiftToEnvironment;
  SchemaPtr schema;
  std::vector<Example> examples;
};

inline ExamplesFile read_examples_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingStreamError("missing examples file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty examples file: " + path.string());
  ExamplesFile file;
  try {
    const json header = json::parse(line);
    file.task = task_from_string(header.at("task").get<std::string>());
    auto schema = std::make_shared<FeatureSchema>();
    schema->group = feature_group_from_string(header.at("group").get<std::string>());
    schema->names = header.at("feature_names").get<std::vector<std::string>>();
    file.schema = std::move(schema);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("examples header: " + std::string(e.what()));
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      file.examples.push_back(example_from_json(json::parse(line), file.schema, file.task));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("examples:" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return file;
}

/// Fold-assignment index: leave-one-person-out is fully described by the
/// ordered participant list.
inline json fold_index_json(const std::vector<Fold>& folds) {
  json arr = json::array();
  for (const auto& fold : folds)
    arr.push_back(json{{"test_participant", fold.participant_id},
                       {"n_train", fold.train.size()},
                       {"n_test", fold.test.size()}});
  return json{{"scheme", "leave-one-person-out"}, {"folds", arr}};
}

}  // namespace shiftcast
