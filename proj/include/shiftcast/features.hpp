#pragma once

// Windowed feature extraction for the four feature groups. Numeric series
// aggregate to mean/min/max/std/slope, binary series to mean/slope. Feature
// names are stable for a fixed manifest configuration; missing substreams
// impute zeros and set a companion presence flag.

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "shiftcast/common.hpp"
#include "shiftcast/gaze.hpp"
#include "shiftcast/recording.hpp"

namespace shiftcast {

enum class FeatureGroup { Egocentric, Phone, Proposed, ProposedPlusGaze };

inline const char* to_string(FeatureGroup g) {
  switch (g) {
    case FeatureGroup::Egocentric: return "egocentric";
    case FeatureGroup::Phone: return "phone";
    case FeatureGroup::Proposed: return "proposed";
    default: return "proposed_gaze";
  }
}

inline FeatureGroup feature_group_from_string(const std::string& s) {
  if (s == "egocentric") return FeatureGroup::Egocentric;
  if (s == "phone") return FeatureGroup::Phone;
  if (s == "proposed") return FeatureGroup::Proposed;
  if (s == "proposed_gaze") return FeatureGroup::ProposedPlusGaze;
  throw ConfigError("unknown feature group '" + s + "'");
}

inline std::vector<FeatureGroup> all_feature_groups() {
  return {FeatureGroup::Egocentric, FeatureGroup::Phone, FeatureGroup::Proposed,
          FeatureGroup::ProposedPlusGaze};
}

// ---------------------------------------------------------------------------
// Aggregation primitives
// ---------------------------------------------------------------------------

struct NumericAggregate {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double std = 0.0;    // population standard deviation
  double slope = 0.0;  // least-squares linear coefficient, per second
};

struct BinaryAggregate {
  double mean = 0.0;
  double slope = 0.0;
};

namespace detail {

// Two-pass aggregation; times are centered on the window start before the
// slope fit so large absolute timestamps do not lose precision.
inline NumericAggregate aggregate_values(std::span<const double> ts,
                                         std::span<const double> vs, double t_origin) {
  const std::size_t n = vs.size();
  NumericAggregate a;
  a.min = vs[0];
  a.max = vs[0];
  double sum_v = 0.0, sum_t = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    a.min = std::min(a.min, vs[i]);
    a.max = std::max(a.max, vs[i]);
    sum_v += vs[i];
    sum_t += ts[i] - t_origin;
  }
  a.mean = sum_v / static_cast<double>(n);
  const double mean_t = sum_t / static_cast<double>(n);
  double ss_v = 0.0, s_tt = 0.0, s_tv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dv = vs[i] - a.mean;
    const double dt = (ts[i] - t_origin) - mean_t;
    ss_v += dv * dv;
    s_tt += dt * dt;
    s_tv += dt * dv;
  }
  a.std = std::sqrt(ss_v / static_cast<double>(n));
  a.slope = s_tt > 0.0 ? s_tv / s_tt : 0.0;
  return a;
}

}  // namespace detail

/// Aggregates samples with t0 <= t < t1. Throws MissingData when the window
/// holds no samples.
inline NumericAggregate aggregate_numeric(
    std::span<const std::pair<double, double>> series, double t0, double t1) {
  if (!(t1 > t0)) throw ConfigError("window length must be positive");
  std::vector<double> ts, vs;
  for (const auto& [t, v] : series) {
    if (t >= t0 && t < t1) {
      ts.push_back(t);
      vs.push_back(v);
    }
  }
  if (vs.empty()) throw MissingDataError("no samples in window");
  return detail::aggregate_values(ts, vs, t0);
}

/// Mean (fraction of ones) and least-squares slope of a 0/1 series.
inline BinaryAggregate aggregate_binary(std::span<const std::pair<double, double>> series,
                                        double t0, double t1) {
  const NumericAggregate a = aggregate_numeric(series, t0, t1);
  return BinaryAggregate{a.mean, a.slope};
}

// ---------------------------------------------------------------------------
// Feature schema and vectors
// ---------------------------------------------------------------------------

struct FeatureSchema {
  FeatureGroup group = FeatureGroup::Proposed;
  std::vector<std::string> names;

  std::size_t size() const { return names.size(); }
  /// Index of a named feature; throws SchemaMismatch when absent.
  std::size_t index_of(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return i;
    throw SchemaMismatchError("no feature named '" + std::string(name) + "'");
  }
  bool operator==(const FeatureSchema& o) const {
    return group == o.group && names == o.names;
  }
};

using SchemaPtr = std::shared_ptr<const FeatureSchema>;

struct FeatureVector {
  SchemaPtr schema;
  std::vector<double> values;

  double at(std::string_view name) const { return values[schema->index_of(name)]; }
  bool operator==(const FeatureVector& o) const {
    return values == o.values &&
           (schema == o.schema || (schema && o.schema && *schema == *o.schema));
  }
};

// ---------------------------------------------------------------------------
// Extraction
// ---------------------------------------------------------------------------

namespace detail {

constexpr double kBinarizeRateHz = 30.0;  // matches the scene camera rate

constexpr const char* kNumericSuffixes[5] = {"mean", "min", "max", "std", "slope"};
constexpr const char* kBinarySuffixes[2] = {"mean", "slope"};
constexpr const char* kMapStatNames[5] = {"mean", "min", "max", "std", "entropy"};

// State-holding event stream reduced to (time, state-after) toggles. The
// state before the first toggle is the complement of that toggle, so a
// stream opening with "off" implies an initially lit screen.
struct StateToggles {
  bool initial = false;
  std::vector<std::pair<double, bool>> changes;
};

// Per-window working state: stream index ranges plus reusable scratch
// buffers. One instance lives on the stack of each extract() call, so a
// shared extractor stays safe for concurrent use.
struct WindowCtx {
  double t0 = 0.0;
  double t1 = 0.0;
  std::size_t frame_lo = 0, frame_hi = 0;
  std::size_t head_lo = 0, head_hi = 0;
  std::size_t phone_lo = 0, phone_hi = 0;
  std::vector<const Fixation*> fixations;
  std::vector<double> ts;  // scratch
  std::vector<double> vs;  // scratch
};

// Either collects names (value pass off) or values; the emitting code path
// is shared, so names and values can never drift apart.
struct FeatureEmitter {
  std::vector<std::string>* names = nullptr;
  std::vector<double>* values = nullptr;

  template <class Compute>
  void numeric(const std::string& prefix, Compute&& compute) {
    if (names)
      for (const char* s : kNumericSuffixes) names->push_back(prefix + "." + s);
    if (values) {
      const NumericAggregate a = compute();
      values->insert(values->end(), {a.mean, a.min, a.max, a.std, a.slope});
    }
  }

  template <class Compute>
  void binary(const std::string& prefix, Compute&& compute) {
    if (names)
      for (const char* s : kBinarySuffixes) names->push_back(prefix + "." + s);
    if (values) {
      const BinaryAggregate a = compute();
      values->insert(values->end(), {a.mean, a.slope});
    }
  }

  template <class Compute>
  void flag(const std::string& name, Compute&& compute) {
    if (names) names->push_back(name);
    if (values) values->push_back(compute() ? 1.0 : 0.0);
  }
};

}  // namespace detail

/// Extracts feature vectors over [t0, t1) windows of one Recording. Fixations
/// and per-group schemas are computed once in the constructor; extract() is
/// const and safe to call concurrently.
class FeatureExtractor {
 public:
  explicit FeatureExtractor(const Recording& rec, FixationParams fixation_params = {})
      : rec_(rec), fixations_(detect_fixations(rec.gaze, fixation_params)) {
    range_lo_ = rec.annotations.empty() ? 0.0 : rec.annotations.start();
    range_hi_ = rec.annotations.empty() ? 0.0 : rec.annotations.end();
    auto widen = [&](double lo, double hi) {
      range_lo_ = std::min(range_lo_, lo);
      range_hi_ = std::max(range_hi_, hi);
    };
    if (!rec.gaze.empty()) widen(rec.gaze.front().t, rec.gaze.back().t);
    if (!rec.head_imu.empty()) widen(rec.head_imu.front().t, rec.head_imu.back().t);
    if (!rec.phone_imu.empty()) widen(rec.phone_imu.front().t, rec.phone_imu.back().t);
    if (!rec.frames.empty()) widen(rec.frames.front().t, rec.frames.back().t);
    index_phone_events();
    for (auto g : all_feature_groups()) {
      auto schema = std::make_shared<FeatureSchema>();
      schema->group = g;
      detail::FeatureEmitter emitter;
      emitter.names = &schema->names;
      emit(emitter, g, nullptr);
      schemas_[static_cast<std::size_t>(g)] = std::move(schema);
    }
  }

  const Recording& recording() const { return rec_; }
  const std::vector<Fixation>& fixations() const { return fixations_; }
  SchemaPtr schema(FeatureGroup group) const {
    return schemas_[static_cast<std::size_t>(group)];
  }

  FeatureVector extract(double t0, double t1, FeatureGroup group) const {
    if (!(t1 > t0)) throw ConfigError("window length must be positive");
    if (t0 < range_lo_ - 1e-9 || t1 > range_hi_ + 1e-9)
      throw WindowOutOfRangeError("window outside the recording time range");

    detail::WindowCtx ctx;
    ctx.t0 = t0;
    ctx.t1 = t1;
    auto in_range = [&](const auto& stream, auto time_of) {
      auto lo = std::lower_bound(stream.begin(), stream.end(), t0,
                                 [&](const auto& s, double v) { return time_of(s) < v; });
      auto hi = std::lower_bound(lo, stream.end(), t1,
                                 [&](const auto& s, double v) { return time_of(s) < v; });
      return std::pair<std::size_t, std::size_t>(lo - stream.begin(), hi - stream.begin());
    };
    std::tie(ctx.frame_lo, ctx.frame_hi) =
        in_range(rec_.frames, [](const FrameFeatures& f) { return f.t; });
    std::tie(ctx.head_lo, ctx.head_hi) =
        in_range(rec_.head_imu, [](const ImuSample& s) { return s.t; });
    std::tie(ctx.phone_lo, ctx.phone_hi) =
        in_range(rec_.phone_imu, [](const ImuSample& s) { return s.t; });
    for (const auto& f : fixations_) {
      if (f.t_end <= t0) continue;
      if (f.t_start >= t1) break;
      ctx.fixations.push_back(&f);
    }

    FeatureVector fv;
    fv.schema = schema(group);
    fv.values.reserve(fv.schema->size());
    detail::FeatureEmitter emitter;
    emitter.values = &fv.values;
    emit(emitter, group, &ctx);
    return fv;
  }

 private:
  void index_phone_events() {
    auto add_toggle = [](detail::StateToggles& toggles, double t, bool state) {
      if (toggles.changes.empty()) toggles.initial = !state;
      toggles.changes.emplace_back(t, state);
    };
    app_toggles_.resize(rec_.constants.apps.size());
    for (const auto& e : rec_.phone_events) {
      switch (e.kind) {
        case PhoneEventKind::Touch:
          touch_times_.push_back(e.t);
          break;
        case PhoneEventKind::ScreenOn:
          add_toggle(screen_toggles_, e.t, true);
          break;
        case PhoneEventKind::ScreenOff:
          add_toggle(screen_toggles_, e.t, false);
          break;
        case PhoneEventKind::AppStart:
        case PhoneEventKind::AppStop: {
          const auto& apps = rec_.constants.apps;
          const auto it = std::find(apps.begin(), apps.end(), e.app_id);
          if (it == apps.end()) break;  // unlisted app: no feature channel
          add_toggle(app_toggles_[static_cast<std::size_t>(it - apps.begin())], e.t,
                     e.kind == PhoneEventKind::AppStart);
          break;
        }
      }
    }
  }

  // --- series helpers -------------------------------------------------------

  // Fills ctx scratch via fill(ts, vs); zeros when the window has no samples.
  template <class Fill>
  NumericAggregate numeric_over(detail::WindowCtx& ctx, Fill&& fill) const {
    ctx.ts.clear();
    ctx.vs.clear();
    fill(ctx.ts, ctx.vs);
    if (ctx.vs.empty()) return NumericAggregate{};
    return detail::aggregate_values(ctx.ts, ctx.vs, ctx.t0);
  }

  template <class Fill>
  BinaryAggregate binary_over(detail::WindowCtx& ctx, Fill&& fill) const {
    const NumericAggregate a = numeric_over(ctx, fill);
    return BinaryAggregate{a.mean, a.slope};
  }

  template <class ValueOf>
  void fill_frames(const detail::WindowCtx& ctx, std::vector<double>& ts,
                   std::vector<double>& vs, ValueOf&& value_of) const {
    for (std::size_t i = ctx.frame_lo; i < ctx.frame_hi; ++i) {
      ts.push_back(rec_.frames[i].t);
      vs.push_back(value_of(rec_.frames[i]));
    }
  }

  template <class ValueOf>
  void fill_imu(const std::vector<ImuSample>& stream, std::size_t lo, std::size_t hi,
                std::vector<double>& ts, std::vector<double>& vs, ValueOf&& value_of) const {
    for (std::size_t i = lo; i < hi; ++i) {
      ts.push_back(stream[i].t);
      vs.push_back(value_of(stream[i]));
    }
  }

  std::size_t binarize_ticks(const detail::WindowCtx& ctx) const {
    const double len = ctx.t1 - ctx.t0;
    const auto n = static_cast<std::size_t>(std::lround(len * detail::kBinarizeRateHz));
    return std::max<std::size_t>(n, 1);
  }

  // Touch bins: 1 when at least one touch event falls into the 1/30 s bin.
  void fill_touch(const detail::WindowCtx& ctx, std::vector<double>& ts,
                  std::vector<double>& vs) const {
    const std::size_t n = binarize_ticks(ctx);
    for (std::size_t k = 0; k < n; ++k) {
      const double lo = ctx.t0 + static_cast<double>(k) / detail::kBinarizeRateHz;
      const double hi = ctx.t0 + static_cast<double>(k + 1) / detail::kBinarizeRateHz;
      const auto it = std::lower_bound(touch_times_.begin(), touch_times_.end(), lo);
      ts.push_back(lo);
      vs.push_back(it != touch_times_.end() && *it < hi ? 1.0 : 0.0);
    }
  }

  // Held 0/1 state sampled at bin starts, from a precomputed toggle index.
  // A toggle at exactly the sample time already counts.
  void fill_state(const detail::WindowCtx& ctx, std::vector<double>& ts,
                  std::vector<double>& vs, const detail::StateToggles& toggles) const {
    const std::size_t n = binarize_ticks(ctx);
    for (std::size_t k = 0; k < n; ++k) {
      const double at = ctx.t0 + static_cast<double>(k) / detail::kBinarizeRateHz;
      auto it = std::upper_bound(
          toggles.changes.begin(), toggles.changes.end(), at,
          [](double v, const std::pair<double, bool>& c) { return v < c.first; });
      const bool state = it == toggles.changes.begin() ? toggles.initial : (it - 1)->second;
      ts.push_back(at);
      vs.push_back(state ? 1.0 : 0.0);
    }
  }

  struct AtGazeSample {
    double t = 0.0;
    AtGazeValues v;
  };

  std::vector<AtGazeSample> at_gaze_samples(const detail::WindowCtx& ctx) const {
    std::vector<AtGazeSample> out;
    for (const Fixation* f : ctx.fixations) {
      const double tm =
          0.5 * (std::max(f->t_start, ctx.t0) + std::min(f->t_end, ctx.t1));
      const FrameFeatures* best = nullptr;
      double best_dt = std::numeric_limits<double>::infinity();
      for (std::size_t i = ctx.frame_lo; i < ctx.frame_hi; ++i) {
        const FrameFeatures& fr = rec_.frames[i];
        if (!fr.saliency_map || !fr.objectness_map || !fr.depth_map) continue;
        const double dt = std::abs(fr.t - tm);
        if (dt < best_dt) {
          best_dt = dt;
          best = &fr;
        }
      }
      if (!best) continue;
      try {
        out.push_back({tm, at_gaze(*best, rec_.constants, f->cx, f->cy)});
      } catch (const OutOfFieldError&) {
        // Fixation centroid outside the camera field of view: no sample.
      }
    }
    return out;
  }

  // --- emission --------------------------------------------------------------

  void emit(detail::FeatureEmitter& em, FeatureGroup group, detail::WindowCtx* ctx) const {
    const bool ego = group != FeatureGroup::Phone;
    const bool phone = group != FeatureGroup::Egocentric;
    const bool gaze = group == FeatureGroup::ProposedPlusGaze;
    if (ego) emit_egocentric(em, ctx);
    if (phone) emit_phone(em, ctx);
    if (gaze) emit_gaze(em, ctx);
  }

  void emit_egocentric(detail::FeatureEmitter& em, detail::WindowCtx* ctx) const {
    em.flag("ego.frames.present", [&] { return ctx->frame_hi > ctx->frame_lo; });
    em.numeric("ego.face_count", [&] {
      return numeric_over(*ctx, [&](auto& ts, auto& vs) {
        fill_frames(*ctx, ts, vs,
                    [](const FrameFeatures& f) { return static_cast<double>(f.face_count); });
      });
    });
    const auto& classes = rec_.constants.object_classes;
    for (std::size_t c = 0; c < classes.size(); ++c) {
      em.binary("ego.class." + classes[c] + ".present", [&] {
        return binary_over(*ctx, [&](auto& ts, auto& vs) {
          fill_frames(*ctx, ts, vs, [c](const FrameFeatures& f) {
            return static_cast<double>(f.class_presence[c]);
          });
        });
      });
    }
    for (std::size_t c = 0; c < classes.size(); ++c) {
      em.numeric("ego.class." + classes[c] + ".pixels", [&] {
        return numeric_over(*ctx, [&](auto& ts, auto& vs) {
          fill_frames(*ctx, ts, vs, [c](const FrameFeatures& f) {
            return static_cast<double>(f.class_pixel_counts[c]);
          });
        });
      });
    }
    for (std::size_t c = 0; c < classes.size(); ++c) {
      em.numeric("ego.class." + classes[c] + ".instances", [&] {
        return numeric_over(*ctx, [&](auto& ts, auto& vs) {
          fill_frames(*ctx, ts, vs, [c](const FrameFeatures& f) {
            return static_cast<double>(f.class_instance_counts[c]);
          });
        });
      });
    }
    const auto& scenes = rec_.constants.scene_classes;
    for (std::size_t s = 0; s < scenes.size(); ++s) {
      em.binary("ego.scene." + scenes[s], [&] {
        return binary_over(*ctx, [&](auto& ts, auto& vs) {
          fill_frames(*ctx, ts, vs, [s](const FrameFeatures& f) {
            return static_cast<double>(f.scene_onehot[s]);
          });
        });
      });
    }
    auto map_block = [&](const std::string& prefix, auto member) {
      for (std::size_t k = 0; k < 5; ++k) {
        em.numeric(prefix + "." + detail::kMapStatNames[k], [&] {
          return numeric_over(*ctx, [&](auto& ts, auto& vs) {
            fill_frames(*ctx, ts, vs, [&](const FrameFeatures& f) {
              const MapStats& m = f.*member;
              const double stat[5] = {m.mean, m.min, m.max, m.std, m.entropy};
              return stat[k];
            });
          });
        });
      }
    };
    map_block("ego.saliency", &FrameFeatures::saliency);
    map_block("ego.objectness", &FrameFeatures::objectness);
    map_block("ego.depth", &FrameFeatures::depth);

    em.flag("ego.head_imu.present", [&] { return ctx->head_hi > ctx->head_lo; });
    emit_imu_block(em, ctx, "ego.head", rec_.head_imu,
                   [](detail::WindowCtx& c) { return std::pair(c.head_lo, c.head_hi); },
                   /*with_orientation=*/false);
  }

  void emit_phone(detail::FeatureEmitter& em, detail::WindowCtx* ctx) const {
    em.flag("phone.imu.present", [&] { return ctx->phone_hi > ctx->phone_lo; });
    emit_imu_block(em, ctx, "phone", rec_.phone_imu,
                   [](detail::WindowCtx& c) { return std::pair(c.phone_lo, c.phone_hi); },
                   /*with_orientation=*/true);
    em.flag("phone.events.present", [&] { return !rec_.phone_events.empty(); });
    auto event_binary = [&](const std::string& name, auto fill) {
      em.binary(name, [&] {
        if (rec_.phone_events.empty()) return BinaryAggregate{};
        return binary_over(*ctx, fill);
      });
    };
    event_binary("phone.touch",
                 [&](auto& ts, auto& vs) { fill_touch(*ctx, ts, vs); });
    event_binary("phone.screen_on", [&](auto& ts, auto& vs) {
      fill_state(*ctx, ts, vs, screen_toggles_);
    });
    for (std::size_t a = 0; a < rec_.constants.apps.size(); ++a) {
      event_binary("phone.app." + rec_.constants.apps[a] + ".active",
                   [&](auto& ts, auto& vs) { fill_state(*ctx, ts, vs, app_toggles_[a]); });
    }
  }

  void emit_gaze(detail::FeatureEmitter& em, detail::WindowCtx* ctx) const {
    em.flag("gaze.fixations.present", [&] { return !ctx->fixations.empty(); });
    auto fixation_numeric = [&](const std::string& name, auto value_of) {
      em.numeric(name, [&] {
        return numeric_over(*ctx, [&](auto& ts, auto& vs) {
          for (const Fixation* f : ctx->fixations) {
            ts.push_back(0.5 * (std::max(f->t_start, ctx->t0) + std::min(f->t_end, ctx->t1)));
            vs.push_back(value_of(*f));
          }
        });
      });
    };
    fixation_numeric("gaze.fixation.x", [](const Fixation& f) { return f.cx; });
    fixation_numeric("gaze.fixation.y", [](const Fixation& f) { return f.cy; });
    fixation_numeric("gaze.fixation.norm",
                     [](const Fixation& f) { return std::hypot(f.cx, f.cy); });

    // At-gaze map samples share one lookup per window; compute lazily so the
    // schema pass stays free of data access.
    std::vector<AtGazeSample> samples;
    bool samples_ready = false;
    auto ensure_samples = [&] {
      if (!samples_ready) {
        samples = at_gaze_samples(*ctx);
        samples_ready = true;
      }
    };
    em.flag("gaze.atgaze.present", [&] {
      ensure_samples();
      return !samples.empty();
    });
    auto atgaze_numeric = [&](const std::string& name, auto value_of) {
      em.numeric(name, [&] {
        ensure_samples();
        return numeric_over(*ctx, [&](auto& ts, auto& vs) {
          for (const auto& s : samples) {
            ts.push_back(s.t);
            vs.push_back(value_of(s.v));
          }
        });
      });
    };
    atgaze_numeric("gaze.atgaze.saliency.value",
                   [](const AtGazeValues& v) { return v.saliency; });
    atgaze_numeric("gaze.atgaze.saliency.norm",
                   [](const AtGazeValues& v) { return std::abs(v.saliency); });
    atgaze_numeric("gaze.atgaze.objectness.value",
                   [](const AtGazeValues& v) { return v.objectness; });
    atgaze_numeric("gaze.atgaze.objectness.norm",
                   [](const AtGazeValues& v) { return std::abs(v.objectness); });
    atgaze_numeric("gaze.atgaze.depth.value", [](const AtGazeValues& v) { return v.depth; });
    atgaze_numeric("gaze.atgaze.depth.norm",
                   [](const AtGazeValues& v) { return std::abs(v.depth); });
  }

  template <class Range>
  void emit_imu_block(detail::FeatureEmitter& em, detail::WindowCtx* ctx,
                      const std::string& prefix, const std::vector<ImuSample>& stream,
                      Range&& range_of, bool with_orientation) const {
    static constexpr const char* kAxes[3] = {"x", "y", "z"};
    auto vector_block = [&](const std::string& sensor, auto component) {
      for (int axis = 0; axis < 3; ++axis) {
        em.numeric(prefix + "." + sensor + "." + kAxes[axis], [&] {
          return numeric_over(*ctx, [&](auto& ts, auto& vs) {
            auto [lo, hi] = range_of(*ctx);
            fill_imu(stream, lo, hi, ts, vs, [&](const ImuSample& s) {
              const auto* v = component(s);
              return v ? (*v)[axis] : 0.0;
            });
          });
        });
      }
      em.numeric(prefix + "." + sensor + ".norm", [&] {
        return numeric_over(*ctx, [&](auto& ts, auto& vs) {
          auto [lo, hi] = range_of(*ctx);
          fill_imu(stream, lo, hi, ts, vs, [&](const ImuSample& s) {
            const auto* v = component(s);
            return v ? std::sqrt((*v)[0] * (*v)[0] + (*v)[1] * (*v)[1] + (*v)[2] * (*v)[2])
                     : 0.0;
          });
        });
      });
    };
    vector_block("accel",
                 [](const ImuSample& s) { return &s.accel; });
    vector_block("gyro", [](const ImuSample& s) { return &s.gyro; });
    if (with_orientation) {
      em.flag(prefix + ".orient.present", [&] {
        auto [lo, hi] = range_of(*ctx);
        for (std::size_t i = lo; i < hi; ++i)
          if (stream[i].orientation) return true;
        return false;
      });
      // Orientation aggregates skip samples without the optional field.
      auto orient_numeric = [&](int axis, bool norm) {
        const std::string name =
            prefix + std::string(".orient.") + (norm ? "norm" : kAxes[axis]);
        em.numeric(name, [&] {
          return numeric_over(*ctx, [&](auto& ts, auto& vs) {
            auto [lo, hi] = range_of(*ctx);
            for (std::size_t i = lo; i < hi; ++i) {
              const auto& o = stream[i].orientation;
              if (!o) continue;
              ts.push_back(stream[i].t);
              vs.push_back(norm ? std::sqrt((*o)[0] * (*o)[0] + (*o)[1] * (*o)[1] +
                                            (*o)[2] * (*o)[2])
                                : (*o)[axis]);
            }
          });
        });
      };
      for (int axis = 0; axis < 3; ++axis) orient_numeric(axis, false);
      orient_numeric(0, true);
    }
  }

  const Recording& rec_;
  std::vector<Fixation> fixations_;
  std::vector<double> touch_times_;
  detail::StateToggles screen_toggles_;
  std::vector<detail::StateToggles> app_toggles_;  // aligned with constants.apps
  double range_lo_ = 0.0;
  double range_hi_ = 0.0;
  std::array<SchemaPtr, 4> schemas_;
};

/// One-shot convenience wrapper; pipelines should reuse a FeatureExtractor.
inline FeatureVector extract(const Recording& rec, double t0, double t1, FeatureGroup group) {
  return FeatureExtractor(rec).extract(t0, t1, group);
}

}  // namespace shiftcast
