#pragma once

// Shared test fixtures: a tiny hand-built recording, a brute-force fixation
// oracle (kept independent of the library's detector), and random gaze
// sequence generators.

#include <random>
#include <vector>

#include "shiftcast/gaze.hpp"
#include "shiftcast/recording.hpp"

namespace testutil {

using namespace shiftcast;

// Minimal valid recording: one annotated block [0, 60) with a device dwell
// [0, 40) and an environment dwell [40, 60), one working segment covering it,
// and sparse streams.
inline Recording make_tiny_recording(const std::string& pid = "p000") {
  Recording rec;
  rec.participant_id = pid;
  const std::string env = rec.constants.scene_classes.front();
  rec.annotations.intervals = {
      {0.0, 40.0, Attention::Device, env, true, Locomotion::Sit},
      {40.0, 60.0, Attention::Environment, env, true, Locomotion::Sit},
  };
  rec.segments.segments = {{0.0, 60.0, SegmentKind::Working, 0}};
  for (int k = 0; k < 60; ++k) {
    GazeSample s;
    s.t = k * 1.0;
    s.valid = true;
    s.x = 1.0;
    s.y = -2.0;
    rec.gaze.push_back(s);
  }
  for (int k = 0; k < 60; ++k) {
    ImuSample s;
    s.t = k * 1.0 + 0.25;
    s.accel = {0.0, 0.0, 9.81};
    s.gyro = {0.01, 0.0, 0.0};
    rec.head_imu.push_back(s);
    ImuSample p = s;
    p.t = k * 1.0 + 0.5;
    p.orientation = {{10.0, 20.0, 30.0}};
    rec.phone_imu.push_back(p);
  }
  rec.phone_events = {
      {1.0, PhoneEventKind::ScreenOn, {}},
      {2.0, PhoneEventKind::Touch, {}},
      {3.0, PhoneEventKind::AppStart, "chat"},
      {30.0, PhoneEventKind::AppStop, "chat"},
      {35.0, PhoneEventKind::ScreenOff, {}},
  };
  const std::size_t n_classes = rec.constants.object_classes.size();
  const std::size_t n_scenes = rec.constants.scene_classes.size();
  for (int k = 0; k < 60; ++k) {
    FrameFeatures f;
    f.t = k * 1.0 + 0.75;
    f.face_count = 1;
    f.class_presence.assign(n_classes, 0);
    f.class_presence[0] = 1;
    f.class_pixel_counts.assign(n_classes, 0);
    f.class_pixel_counts[0] = 1000;
    f.class_instance_counts.assign(n_classes, 0);
    f.class_instance_counts[0] = 2;
    f.scene_onehot.assign(n_scenes, 0);
    f.scene_onehot[0] = 1;
    f.saliency = {0.5, 0.4, 0.6, 0.05, 3.0};
    f.objectness = {0.5, 0.4, 0.6, 0.05, 3.0};
    f.depth = {2.0, 1.5, 2.5, 0.2, 2.0};
    rec.frames.push_back(std::move(f));
  }
  return rec;
}

// --- brute-force fixation oracle -------------------------------------------
// Enumerates all maximal valid windows greedily from the left, recomputing
// dispersion from scratch over every candidate window.

inline bool oracle_bridge_ok(const std::vector<GazeSample>& gaze, std::size_t prev_valid,
                             std::size_t next_valid, double max_invalid_span) {
  if (next_valid == prev_valid + 1) return true;
  double first = 0.0, last = 0.0;
  bool any = false;
  for (std::size_t i = prev_valid + 1; i < next_valid; ++i) {
    if (!any) first = gaze[i].t;
    last = gaze[i].t;
    any = true;
  }
  return !any || (last - first) <= max_invalid_span;
}

inline std::vector<Fixation> brute_force_fixations(const std::vector<GazeSample>& gaze,
                                                   const FixationParams& params) {
  std::vector<std::size_t> valid;
  for (std::size_t i = 0; i < gaze.size(); ++i)
    if (gaze[i].valid) valid.push_back(i);

  std::vector<Fixation> out;
  std::size_t k = 0;
  while (k < valid.size()) {
    std::size_t best = k;
    for (std::size_t j = k; j < valid.size(); ++j) {
      if (j > k && !oracle_bridge_ok(gaze, valid[j - 1], valid[j], params.max_invalid_span))
        break;
      double min_x = gaze[valid[k]].x, max_x = min_x;
      double min_y = gaze[valid[k]].y, max_y = min_y;
      for (std::size_t i = k; i <= j; ++i) {
        min_x = std::min(min_x, gaze[valid[i]].x);
        max_x = std::max(max_x, gaze[valid[i]].x);
        min_y = std::min(min_y, gaze[valid[i]].y);
        max_y = std::max(max_y, gaze[valid[i]].y);
      }
      if ((max_x - min_x) + (max_y - min_y) > params.dispersion_threshold) break;
      best = j;
    }
    if (gaze[valid[best]].t - gaze[valid[k]].t >= params.min_duration) {
      Fixation f;
      f.t_start = gaze[valid[k]].t;
      f.t_end = gaze[valid[best]].t;
      double sx = 0.0, sy = 0.0;
      for (std::size_t i = k; i <= best; ++i) {
        sx += gaze[valid[i]].x;
        sy += gaze[valid[i]].y;
      }
      f.cx = sx / static_cast<double>(best - k + 1);
      f.cy = sy / static_cast<double>(best - k + 1);
      out.push_back(f);
      k = best + 1;
    } else {
      ++k;
    }
  }
  return out;
}

/// Random gaze sequence with clustered positions, occasional invalid runs and
/// irregular sampling.
inline std::vector<GazeSample> random_gaze_sequence(std::mt19937_64& rng,
                                                    std::size_t max_samples = 200) {
  std::uniform_int_distribution<std::size_t> len_dist(0, max_samples);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> step(0.0, 0.3);
  std::uniform_real_distribution<double> jump(-8.0, 8.0);
  std::uniform_real_distribution<double> dt(0.02, 0.05);

  const std::size_t n = len_dist(rng);
  std::vector<GazeSample> gaze;
  gaze.reserve(n);
  double t = 0.0, x = 0.0, y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    t += dt(rng);
    const double r = unit(rng);
    GazeSample s;
    s.t = t;
    if (r < 0.08) {
      s.valid = false;
    } else {
      if (r < 0.18) {
        x += jump(rng);
        y += jump(rng);
      } else {
        x += step(rng);
        y += step(rng);
      }
      s.valid = true;
      s.x = x;
      s.y = y;
    }
    gaze.push_back(s);
  }
  return gaze;
}

}  // namespace testutil
