#pragma once

// Synthetic multi-participant corpus generator. Sessions are built from chat
// blocks of alternating working/waiting segments; within each block the
// attention timeline alternates device/environment dwells. Sensor streams are
// noise that is independent of the timeline, except for planted cues gated by
// cue_probability: an upcoming shift to the device is preceded by a phone-IMU
// variance burst and a screen-on event (with the screen falling back off when
// that device dwell ends), and an upcoming shift to the environment by a
// transient face-count increase.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "shiftcast/recording.hpp"

namespace shiftcast {

/// Log-normal dwell-time model (median seconds + sigma), optionally mixed
/// with a second long-dwell component.
struct DwellConfig {
  double median_s = 20.0;
  double sigma = 0.6;
  double long_weight = 0.0;  // probability of drawing from the long component
  double long_median_s = 60.0;
  double long_sigma = 0.4;

  void validate() const {
    if (median_s <= 0.0 || sigma <= 0.0 || long_median_s <= 0.0 || long_sigma <= 0.0)
      throw ConfigError("dwell parameters must be positive");
    if (long_weight < 0.0 || long_weight > 1.0)
      throw ConfigError("dwell long_weight must be in [0,1]");
  }
};

struct NoiseConfig {
  double head_accel_std = 0.05;   // m/s^2 around gravity
  double head_gyro_std = 0.02;    // rad/s
  double phone_accel_std = 0.03;  // m/s^2
  double phone_gyro_std = 0.01;   // rad/s
  double phone_orient_std = 1.0;  // degrees
  double gaze_jitter_std = 0.15;  // degrees within a fixation cluster
  double burst_gain = 10.0;       // phone-IMU std multiplier during a cue burst
  double face_blip_prob = 0.02;   // baseline per-frame face probability
  double touch_rate_hz = 0.2;     // Poisson touch events
  double screen_toggle_rate_hz = 1.0 / 600.0;  // baseline screen flips
};

struct SynthConfig {
  int n_participants = 10;
  double session_length_s = 4380.0;  // fits ~12 chat blocks
  DwellConfig device_dwell{20.0, 0.6, 0.0, 60.0, 0.4};
  DwellConfig environment_dwell{6.0, 0.6, 0.0, 60.0, 0.4};
  double cue_probability = 0.0;
  double cue_lead_min_s = 0.5;
  double cue_lead_max_s = 2.0;
  NoiseConfig noise;
  std::uint64_t seed = 0;
  bool emit_map_grids = false;
  double gaze_rate_hz = 30.0;
  double imu_rate_hz = 100.0;
  double frame_rate_hz = 24.0;

  void validate() const {
    if (n_participants < 1) throw ConfigError("n_participants must be >= 1");
    if (session_length_s < 60.0) throw ConfigError("session_length_s must be >= 60");
    device_dwell.validate();
    environment_dwell.validate();
    if (cue_probability < 0.0 || cue_probability > 1.0)
      throw ConfigError("cue_probability must be in [0,1]");
    if (cue_lead_min_s <= 0.0 || cue_lead_max_s < cue_lead_min_s)
      throw ConfigError("cue lead range must satisfy 0 < min <= max");
    if (gaze_rate_hz <= 0.0 || imu_rate_hz <= 0.0 || frame_rate_hz <= 0.0)
      throw ConfigError("stream rates must be positive");
  }
};

/// Generator-side bookkeeping of what was planted, for cross-checking
/// downstream statistics against an independent implementation.
struct ParticipantTruth {
  std::string participant_id;
  double shifts_to_environment = 0.0;
  double shifts_to_device = 0.0;
  double device_time = 0.0;
  double environment_time = 0.0;
  std::map<std::string, double> environment_times;
  double indoor_time = 0.0;
  double outdoor_time = 0.0;
  std::map<std::string, double> locomotion_times;
  double working_time = 0.0;
  double waiting_time = 0.0;
  std::vector<double> cued_device_shift_times;
  std::vector<double> cued_environment_shift_times;
};

struct CorpusTruth {
  std::vector<ParticipantTruth> participants;
};

struct SynthCorpus {
  std::vector<Recording> recordings;
  CorpusTruth truth;
};

namespace detail {

constexpr double kQuantum = 1e-6;

inline double quantize(double v) { return std::round(v / kQuantum) * kQuantum; }

inline double tick_time(std::uint64_t k, double rate_hz) {
  return quantize(static_cast<double>(k) / rate_hz);
}

inline double draw_dwell(const DwellConfig& cfg, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mix(0.0, 1.0);
  const bool long_component = mix(rng) < cfg.long_weight;
  const double median = long_component ? cfg.long_median_s : cfg.median_s;
  const double sigma = long_component ? cfg.long_sigma : cfg.sigma;
  std::lognormal_distribution<double> dist(std::log(median), sigma);
  return std::max(0.2, dist(rng));
}

struct TimeInterval {
  double start = 0.0;
  double end = 0.0;
};

inline bool covered(const std::vector<TimeInterval>& intervals, double t) {
  auto it = std::upper_bound(intervals.begin(), intervals.end(), t,
                             [](double v, const TimeInterval& iv) { return v < iv.start; });
  if (it == intervals.begin()) return false;
  --it;
  return t >= it->start && t < it->end;
}

struct BlockContext {
  std::string environment;
  bool indoor = true;
  Locomotion locomotion = Locomotion::Sit;
};

inline BlockContext block_context(const std::vector<std::string>& scenes, int block_index) {
  BlockContext ctx;
  ctx.environment = scenes[static_cast<std::size_t>(block_index) % scenes.size()];
  ctx.indoor = ctx.environment != "street";
  if (ctx.environment == "street")
    ctx.locomotion = Locomotion::Walk;
  else if (ctx.environment == "corridor")
    ctx.locomotion = Locomotion::Stand;
  else
    ctx.locomotion = Locomotion::Sit;
  return ctx;
}

struct ScreenRequest {
  double t = 0.0;
  int op = 0;  // +1 set on, -1 set off, 0 flip
};

}  // namespace detail

struct ShiftCue {
  double shift_t = 0.0;
  double cue_start = 0.0;     // burst / face elevation begins here
  double dwell_end = 0.0;     // end of the dwell the shift opens (device cues)
  bool to_device = false;
};

/// Generates one corpus. Per-participant randomness derives from
/// (seed, participant index); each stream uses its own sub-generator so the
/// noise processes are reproducible and mutually independent.
inline SynthCorpus generate_corpus(const SynthConfig& cfg) {
  cfg.validate();
  SynthCorpus corpus;
  corpus.recordings.resize(static_cast<std::size_t>(cfg.n_participants));
  corpus.truth.participants.resize(static_cast<std::size_t>(cfg.n_participants));

  for (int pi = 0; pi < cfg.n_participants; ++pi) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "p%03d", pi);
    const std::string pid = buf;
    const std::uint64_t pseed = mix_seed(cfg.seed, static_cast<std::uint64_t>(pi));

    Recording rec;
    rec.participant_id = pid;
    ParticipantTruth truth;
    truth.participant_id = pid;

    // --- chat blocks: segments and annotation spans ------------------------
    std::mt19937_64 rng_schedule(mix_seed(pseed, std::string("schedule")));
    std::normal_distribution<double> working_len(40.0, 11.0);
    std::normal_distribution<double> waiting_len(25.0, 7.5);
    std::uniform_real_distribution<double> gap_len(5.0, 15.0);

    struct Block {
      double start, end;
      detail::BlockContext ctx;
    };
    std::vector<Block> blocks;
    double t = 0.0;
    int block_index = 0;
    while (true) {
      const double block_start = t;
      bool any_segment = false;
      for (int q = 0; q < 11; ++q) {  // 6 working + 5 waiting, interleaved
        const bool working = q % 2 == 0;
        double len = working ? std::clamp(working_len(rng_schedule), 20.0, 70.0)
                             : std::clamp(waiting_len(rng_schedule), 14.0, 45.0);
        len = detail::quantize(len);
        if (t + len > cfg.session_length_s) {
          len = detail::quantize(cfg.session_length_s - t);
          if (len < 12.0) break;
        }
        rec.segments.segments.push_back(
            {t, detail::quantize(t + len),
             working ? SegmentKind::Working : SegmentKind::Waiting, block_index});
        t = detail::quantize(t + len);
        any_segment = true;
        if (t >= cfg.session_length_s) break;
      }
      if (!any_segment) break;
      blocks.push_back({block_start, t, detail::block_context(rec.constants.scene_classes,
                                                              block_index)});
      ++block_index;
      const double gap = detail::quantize(gap_len(rng_schedule));
      if (t + gap + 40.0 > cfg.session_length_s) break;
      t += gap;
    }
    if (blocks.empty()) throw ConfigError("session too short to fit a chat block");

    // --- attention timeline and cue schedule --------------------------------
    std::mt19937_64 rng_timeline(mix_seed(pseed, std::string("timeline")));
    std::mt19937_64 rng_cues(mix_seed(pseed, std::string("cues")));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> lead_dist(cfg.cue_lead_min_s, cfg.cue_lead_max_s);
    std::vector<ShiftCue> cues;

    for (const auto& block : blocks) {
      Attention current = Attention::Device;
      double pos = block.start;
      while (pos < block.end) {
        const double dwell = detail::draw_dwell(
            current == Attention::Device ? cfg.device_dwell : cfg.environment_dwell,
            rng_timeline);
        double end = detail::quantize(pos + dwell);
        if (end > block.end) end = block.end;
        if (end <= pos) break;
        rec.annotations.intervals.push_back({pos, end, current, block.ctx.environment,
                                             block.ctx.indoor, block.ctx.locomotion});
        // A shift happens at `end` only if the next dwell starts there.
        if (end < block.end) {
          const bool to_device = current == Attention::Environment;
          const bool cued = unit(rng_cues) < cfg.cue_probability;
          if (cued) {
            const double lead = lead_dist(rng_cues);
            ShiftCue cue;
            cue.shift_t = end;
            cue.cue_start = std::max(end - lead, pos);  // stay inside this dwell
            cue.to_device = to_device;
            cue.dwell_end = block.end;  // patched below once the next dwell closes
            cues.push_back(cue);
            (to_device ? truth.cued_device_shift_times : truth.cued_environment_shift_times)
                .push_back(end);
          }
        }
        current = current == Attention::Device ? Attention::Environment : Attention::Device;
        pos = end;
      }
    }
    // Patch device-cue dwell ends: the screen stays on until the device dwell
    // that the cued shift opened comes to an end.
    for (auto& cue : cues) {
      if (!cue.to_device) continue;
      for (const auto& iv : rec.annotations.intervals) {
        if (iv.start == cue.shift_t) {
          cue.dwell_end = iv.end;
          break;
        }
      }
    }

    // --- phone events --------------------------------------------------------
    std::mt19937_64 rng_events(mix_seed(pseed, std::string("events")));
    std::vector<detail::ScreenRequest> screen_requests;
    for (const auto& cue : cues) {
      if (!cue.to_device) continue;
      screen_requests.push_back({detail::quantize(cue.cue_start), +1});
      screen_requests.push_back({detail::quantize(cue.dwell_end), -1});
    }
    {
      std::exponential_distribution<double> flip_gap(cfg.noise.screen_toggle_rate_hz);
      double ft = flip_gap(rng_events);
      while (ft < cfg.session_length_s) {
        screen_requests.push_back({detail::quantize(ft), 0});
        ft += flip_gap(rng_events);
      }
    }
    std::stable_sort(screen_requests.begin(), screen_requests.end(),
                     [](const auto& a, const auto& b) { return a.t < b.t; });

    std::vector<PhoneEvent> events;
    {
      bool on = false;
      for (const auto& req : screen_requests) {
        const bool want = req.op == 0 ? !on : req.op > 0;
        if (want == on) continue;
        events.push_back(
            {req.t, want ? PhoneEventKind::ScreenOn : PhoneEventKind::ScreenOff, {}});
        on = want;
      }
    }
    {
      std::exponential_distribution<double> touch_gap(cfg.noise.touch_rate_hz);
      double tt = touch_gap(rng_events);
      while (tt < cfg.session_length_s) {
        events.push_back({detail::quantize(tt), PhoneEventKind::Touch, {}});
        tt += touch_gap(rng_events);
      }
    }
    for (const auto& app : rec.constants.apps) {
      std::exponential_distribution<double> off_gap(1.0 / 180.0);
      std::exponential_distribution<double> on_gap(1.0 / 120.0);
      double at = off_gap(rng_events);
      while (at < cfg.session_length_s) {
        const double stop = at + std::max(1.0, on_gap(rng_events));
        events.push_back({detail::quantize(at), PhoneEventKind::AppStart, app});
        if (stop < cfg.session_length_s)
          events.push_back({detail::quantize(stop), PhoneEventKind::AppStop, app});
        else
          break;  // app left open at end of session
        at = stop + off_gap(rng_events);
      }
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const PhoneEvent& a, const PhoneEvent& b) { return a.t < b.t; });
    rec.phone_events = std::move(events);

    // --- IMU streams ---------------------------------------------------------
    std::vector<detail::TimeInterval> bursts;
    std::vector<detail::TimeInterval> face_windows;
    for (const auto& cue : cues) {
      if (cue.to_device)
        bursts.push_back({cue.cue_start, cue.shift_t});
      else
        face_windows.push_back({cue.cue_start, cue.shift_t});
    }
    std::sort(bursts.begin(), bursts.end(),
              [](const auto& a, const auto& b) { return a.start < b.start; });
    std::sort(face_windows.begin(), face_windows.end(),
              [](const auto& a, const auto& b) { return a.start < b.start; });

    {
      std::mt19937_64 rng_head(mix_seed(pseed, std::string("head_imu")));
      std::normal_distribution<double> na(0.0, cfg.noise.head_accel_std);
      std::normal_distribution<double> ng(0.0, cfg.noise.head_gyro_std);
      const auto n = static_cast<std::uint64_t>(cfg.session_length_s * cfg.imu_rate_hz);
      rec.head_imu.reserve(n);
      for (std::uint64_t k = 0; k < n; ++k) {
        ImuSample s;
        s.t = detail::tick_time(k, cfg.imu_rate_hz);
        s.accel = {detail::quantize(na(rng_head)), detail::quantize(na(rng_head)),
                   detail::quantize(9.81 + na(rng_head))};
        s.gyro = {detail::quantize(ng(rng_head)), detail::quantize(ng(rng_head)),
                  detail::quantize(ng(rng_head))};
        rec.head_imu.push_back(s);
      }
    }
    {
      std::mt19937_64 rng_phone(mix_seed(pseed, std::string("phone_imu")));
      std::normal_distribution<double> na(0.0, cfg.noise.phone_accel_std);
      std::normal_distribution<double> ng(0.0, cfg.noise.phone_gyro_std);
      std::normal_distribution<double> no(0.0, cfg.noise.phone_orient_std);
      std::uniform_real_distribution<double> base_orient(-90.0, 90.0);
      const std::array<double, 3> orient0 = {base_orient(rng_phone), base_orient(rng_phone),
                                             base_orient(rng_phone)};
      const auto n = static_cast<std::uint64_t>(cfg.session_length_s * cfg.imu_rate_hz);
      rec.phone_imu.reserve(n);
      for (std::uint64_t k = 0; k < n; ++k) {
        ImuSample s;
        s.t = detail::tick_time(k, cfg.imu_rate_hz);
        const double gain = detail::covered(bursts, s.t) ? cfg.noise.burst_gain : 1.0;
        s.accel = {detail::quantize(gain * na(rng_phone)),
                   detail::quantize(gain * na(rng_phone)),
                   detail::quantize(9.81 + gain * na(rng_phone))};
        s.gyro = {detail::quantize(gain * ng(rng_phone)),
                  detail::quantize(gain * ng(rng_phone)),
                  detail::quantize(gain * ng(rng_phone))};
        s.orientation = {{detail::quantize(orient0[0] + no(rng_phone)),
                          detail::quantize(orient0[1] + no(rng_phone)),
                          detail::quantize(orient0[2] + no(rng_phone))}};
        rec.phone_imu.push_back(s);
      }
    }

    // --- gaze ----------------------------------------------------------------
    {
      std::mt19937_64 rng_gaze(mix_seed(pseed, std::string("gaze")));
      std::uniform_real_distribution<double> center(-30.0, 30.0);
      std::uniform_real_distribution<double> cluster_len(0.2, 1.2);
      std::normal_distribution<double> jitter(0.0, cfg.noise.gaze_jitter_std);
      std::uniform_real_distribution<double> unit_g(0.0, 1.0);
      const auto n = static_cast<std::uint64_t>(cfg.session_length_s * cfg.gaze_rate_hz);
      rec.gaze.reserve(n);
      double cx = center(rng_gaze), cy = center(rng_gaze);
      double cluster_end = cluster_len(rng_gaze);
      int saccade_left = 0;
      double sx = 0.0, sy = 0.0;
      int blink_left = 0;
      for (std::uint64_t k = 0; k < n; ++k) {
        GazeSample s;
        s.t = detail::tick_time(k, cfg.gaze_rate_hz);
        if (blink_left > 0) {
          --blink_left;
          s.valid = false;
          rec.gaze.push_back(s);
          continue;
        }
        if (saccade_left > 0) {
          --saccade_left;
          cx += sx;
          cy += sy;
          s.valid = true;
          s.x = detail::quantize(cx);
          s.y = detail::quantize(cy);
          rec.gaze.push_back(s);
          continue;
        }
        if (s.t >= cluster_end) {
          const double nx = center(rng_gaze), ny = center(rng_gaze);
          saccade_left = 2 + static_cast<int>(unit_g(rng_gaze) * 3.0);
          sx = (nx - cx) / saccade_left;
          sy = (ny - cy) / saccade_left;
          cluster_end = s.t + saccade_left / cfg.gaze_rate_hz + cluster_len(rng_gaze);
          if (unit_g(rng_gaze) < 0.05) blink_left = 1 + (unit_g(rng_gaze) < 0.3 ? 1 : 0);
        }
        s.valid = true;
        s.x = detail::quantize(cx + jitter(rng_gaze));
        s.y = detail::quantize(cy + jitter(rng_gaze));
        rec.gaze.push_back(s);
      }
    }

    // --- frames --------------------------------------------------------------
    {
      std::mt19937_64 rng_frames(mix_seed(pseed, std::string("frames")));
      std::uniform_real_distribution<double> unit_f(0.0, 1.0);
      std::normal_distribution<double> stat_noise(0.0, 0.03);
      std::poisson_distribution<int> person_px(5000);
      std::poisson_distribution<int> other_px(400);
      std::poisson_distribution<int> instances(1);
      const std::size_t n_classes = rec.constants.object_classes.size();
      const std::size_t n_scenes = rec.constants.scene_classes.size();
      const auto n = static_cast<std::uint64_t>(cfg.session_length_s * cfg.frame_rate_hz);
      rec.frames.reserve(n);

      std::size_t block_at = 0;
      for (std::uint64_t k = 0; k < n; ++k) {
        FrameFeatures f;
        f.t = detail::tick_time(k, cfg.frame_rate_hz);
        while (block_at + 1 < blocks.size() && f.t >= blocks[block_at + 1].start) ++block_at;
        const auto& ctx = blocks[block_at].ctx;

        int faces = unit_f(rng_frames) < cfg.noise.face_blip_prob ? 1 : 0;
        if (detail::covered(face_windows, f.t)) faces += 2;
        f.face_count = faces;

        f.class_presence.resize(n_classes);
        f.class_pixel_counts.resize(n_classes);
        f.class_instance_counts.resize(n_classes);
        for (std::size_t c = 0; c < n_classes; ++c) {
          const bool person = rec.constants.object_classes[c] == "person";
          const int px = person ? person_px(rng_frames) : other_px(rng_frames);
          const int inst = instances(rng_frames);
          f.class_pixel_counts[c] = static_cast<std::uint32_t>(std::max(0, px));
          f.class_instance_counts[c] = static_cast<std::uint32_t>(std::max(0, inst));
          f.class_presence[c] = f.class_pixel_counts[c] > 0 ? 1 : 0;
        }

        f.scene_onehot.assign(n_scenes, 0);
        for (std::size_t si = 0; si < n_scenes; ++si)
          if (rec.constants.scene_classes[si] == ctx.environment) f.scene_onehot[si] = 1;

        auto make_stats = [&](double lo, double hi, double ent_base, bool unit_range) {
          MapStats m;
          double mean = lo + (hi - lo) * unit_f(rng_frames);
          double spread_lo = std::abs(stat_noise(rng_frames)) + 0.05 * (hi - lo);
          double spread_hi = std::abs(stat_noise(rng_frames)) + 0.05 * (hi - lo);
          m.mean = detail::quantize(mean);
          m.min = detail::quantize(std::max(unit_range ? 0.0 : 0.0, mean - spread_lo));
          m.max = detail::quantize(unit_range ? std::min(1.0, mean + spread_hi)
                                              : mean + spread_hi);
          if (m.min > m.mean) m.min = m.mean;
          if (m.max < m.mean) m.max = m.mean;
          m.std = detail::quantize(std::abs(stat_noise(rng_frames)) + 0.01);
          m.entropy = detail::quantize(ent_base + std::abs(stat_noise(rng_frames)));
          return m;
        };
        f.saliency = make_stats(0.2, 0.8, 3.0, true);
        f.objectness = make_stats(0.2, 0.8, 3.0, true);
        f.depth = make_stats(1.0, 5.0, 2.0, false);

        if (cfg.emit_map_grids) {
          auto make_grid = [&](double lo, double hi) {
            MapGrid g;
            g.rows = rec.constants.map_grid_rows;
            g.cols = rec.constants.map_grid_cols;
            g.values.resize(static_cast<std::size_t>(g.rows) * g.cols);
            for (auto& v : g.values)
              v = detail::quantize(lo + (hi - lo) * unit_f(rng_frames));
            return g;
          };
          f.saliency_map = make_grid(0.0, 1.0);
          f.objectness_map = make_grid(0.0, 1.0);
          f.depth_map = make_grid(0.5, 8.0);
        }
        rec.frames.push_back(std::move(f));
      }
    }

    // --- bookkeeping (plain loops, kept separate from the timeline module) ---
    for (const auto& name : rec.constants.scene_classes) truth.environment_times[name] = 0.0;
    truth.locomotion_times = {{"sit", 0.0}, {"stand", 0.0}, {"walk", 0.0}};
    {
      const auto& ivs = rec.annotations.intervals;
      for (std::size_t i = 0; i < ivs.size(); ++i) {
        const double len = ivs[i].end - ivs[i].start;
        if (ivs[i].attention == Attention::Device)
          truth.device_time += len;
        else
          truth.environment_time += len;
        truth.environment_times[ivs[i].environment] += len;
        if (ivs[i].indoor)
          truth.indoor_time += len;
        else
          truth.outdoor_time += len;
        truth.locomotion_times[to_string(ivs[i].locomotion)] += len;
        if (i > 0 && ivs[i].start == ivs[i - 1].end &&
            ivs[i].attention != ivs[i - 1].attention) {
          if (ivs[i].attention == Attention::Environment)
            truth.shifts_to_environment += 1.0;
          else
            truth.shifts_to_device += 1.0;
        }
      }
      for (const auto& seg : rec.segments.segments) {
        if (seg.kind == SegmentKind::Working)
          truth.working_time += seg.end - seg.start;
        else
          truth.waiting_time += seg.end - seg.start;
      }
    }

    corpus.recordings[static_cast<std::size_t>(pi)] = std::move(rec);
    corpus.truth.participants[static_cast<std::size_t>(pi)] = std::move(truth);
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline json synth_config_to_json(const SynthConfig& cfg) {
  auto dwell = [](const DwellConfig& d) {
    return json{{"median_s", d.median_s},
                {"sigma", d.sigma},
                {"long_weight", d.long_weight},
                {"long_median_s", d.long_median_s},
                {"long_sigma", d.long_sigma}};
  };
  return json{{"n_participants", cfg.n_participants},
              {"session_length_s", cfg.session_length_s},
              {"device_dwell", dwell(cfg.device_dwell)},
              {"environment_dwell", dwell(cfg.environment_dwell)},
              {"cue_probability", cfg.cue_probability},
              {"cue_lead_min_s", cfg.cue_lead_min_s},
              {"cue_lead_max_s", cfg.cue_lead_max_s},
              {"seed", cfg.seed},
              {"emit_map_grids", cfg.emit_map_grids},
              {"gaze_rate_hz", cfg.gaze_rate_hz},
              {"imu_rate_hz", cfg.imu_rate_hz},
              {"frame_rate_hz", cfg.frame_rate_hz},
              {"noise",
               json{{"head_accel_std", cfg.noise.head_accel_std},
                    {"head_gyro_std", cfg.noise.head_gyro_std},
                    {"phone_accel_std", cfg.noise.phone_accel_std},
                    {"phone_gyro_std", cfg.noise.phone_gyro_std},
                    {"phone_orient_std", cfg.noise.phone_orient_std},
                    {"gaze_jitter_std", cfg.noise.gaze_jitter_std},
                    {"burst_gain", cfg.noise.burst_gain},
                    {"face_blip_prob", cfg.noise.face_blip_prob},
                    {"touch_rate_hz", cfg.noise.touch_rate_hz},
                    {"screen_toggle_rate_hz", cfg.noise.screen_toggle_rate_hz}}}};
}

inline void synth_config_from_json(const json& j, SynthConfig& cfg) {
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("n_participants", cfg.n_participants);
  get("session_length_s", cfg.session_length_s);
  get("cue_probability", cfg.cue_probability);
  get("cue_lead_min_s", cfg.cue_lead_min_s);
  get("cue_lead_max_s", cfg.cue_lead_max_s);
  get("seed", cfg.seed);
  get("emit_map_grids", cfg.emit_map_grids);
  get("gaze_rate_hz", cfg.gaze_rate_hz);
  get("imu_rate_hz", cfg.imu_rate_hz);
  get("frame_rate_hz", cfg.frame_rate_hz);
  auto dwell = [&](const char* key, DwellConfig& d) {
    if (!j.contains(key)) return;
    const json& dj = j.at(key);
    if (dj.contains("median_s")) d.median_s = dj.at("median_s").get<double>();
    if (dj.contains("sigma")) d.sigma = dj.at("sigma").get<double>();
    if (dj.contains("long_weight")) d.long_weight = dj.at("long_weight").get<double>();
    if (dj.contains("long_median_s")) d.long_median_s = dj.at("long_median_s").get<double>();
    if (dj.contains("long_sigma")) d.long_sigma = dj.at("long_sigma").get<double>();
  };
  dwell("device_dwell", cfg.device_dwell);
  dwell("environment_dwell", cfg.environment_dwell);
  if (j.contains("noise")) {
    const json& nj = j.at("noise");
    auto getn = [&](const char* key, double& field) {
      if (nj.contains(key)) field = nj.at(key).get<double>();
    };
    getn("head_accel_std", cfg.noise.head_accel_std);
    getn("head_gyro_std", cfg.noise.head_gyro_std);
    getn("phone_accel_std", cfg.noise.phone_accel_std);
    getn("phone_gyro_std", cfg.noise.phone_gyro_std);
    getn("phone_orient_std", cfg.noise.phone_orient_std);
    getn("gaze_jitter_std", cfg.noise.gaze_jitter_std);
    getn("burst_gain", cfg.noise.burst_gain);
    getn("face_blip_prob", cfg.noise.face_blip_prob);
    getn("touch_rate_hz", cfg.noise.touch_rate_hz);
    getn("screen_toggle_rate_hz", cfg.noise.screen_toggle_rate_hz);
  }
}

inline json truth_to_json(const CorpusTruth& truth) {
  json participants = json::array();
  for (const auto& p : truth.participants) {
    json envs = json::object();
    for (const auto& [k, v] : p.environment_times) envs[k] = v;
    json locos = json::object();
    for (const auto& [k, v] : p.locomotion_times) locos[k] = v;
    participants.push_back(json{{"participant", p.participant_id},
                                {"shifts_to_environment", p.shifts_to_environment},
                                {"shifts_to_device", p.shifts_to_device},
                                {"device_time", p.device_time},
                                {"environment_time", p.environment_time},
                                {"environment_times", envs},
                                {"indoor_time", p.indoor_time},
                                {"outdoor_time", p.outdoor_time},
                                {"locomotion_times", locos},
                                {"working_time", p.working_time},
                                {"waiting_time", p.waiting_time},
                                {"cued_device_shifts", p.cued_device_shift_times},
                                {"cued_environment_shifts", p.cued_environment_shift_times}});
  }
  return json{{"participants", participants}};
}

}  // namespace shiftcast
