#pragma once

// Dispersion-threshold (I-DT) fixation detection and at-gaze map sampling.

#include <cmath>
#include <vector>

#include "shiftcast/common.hpp"
#include "shiftcast/recording.hpp"

namespace shiftcast {

struct FixationParams {
  double dispersion_threshold = 1.0;  // degrees
  double min_duration = 0.150;        // seconds
  // Runs of invalid samples spanning at most this much time are bridged;
  // longer runs terminate a growing window. Blink-sized dropouts at the
  // nominal 30 Hz rate stay inside one fixation.
  double max_invalid_span = 0.05;  // seconds
};

struct Fixation {
  double t_start = 0.0;
  double t_end = 0.0;
  double cx = 0.0;  // centroid over valid member samples, degrees
  double cy = 0.0;

  double duration() const { return t_end - t_start; }
  double midpoint() const { return 0.5 * (t_start + t_end); }
  bool operator==(const Fixation&) const = default;
};

namespace detail {

// Dispersion of a set of points: x-range + y-range.
struct DispersionBox {
  double min_x = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();

  void add(double x, double y) {
    min_x = std::min(min_x, x);
    max_x = std::max(max_x, x);
    min_y = std::min(min_y, y);
    max_y = std::max(max_y, y);
  }
  double dispersion() const { return (max_x - min_x) + (max_y - min_y); }
};

// True if the run of invalid samples in gaze[(from, to)] (exclusive bounds,
// both valid indices) can be bridged: the run's own time span must not
// exceed max_invalid_span.
inline bool bridgeable(const std::vector<GazeSample>& gaze, std::size_t from, std::size_t to,
                       double max_invalid_span) {
  if (to == from + 1) return true;  // no invalid samples in between
  const double span = gaze[to - 1].t - gaze[from + 1].t;
  return span <= max_invalid_span;
}

}  // namespace detail

/// I-DT fixation detection. A window of consecutive valid samples is a
/// fixation when its dispersion (x-range + y-range) stays <= the threshold
/// over a span >= min_duration; windows grow greedily sample-by-sample and
/// the centroid is the arithmetic mean of the valid member positions.
/// Invalid samples are bridged when the run is short (see FixationParams).
inline std::vector<Fixation> detect_fixations(const std::vector<GazeSample>& gaze,
                                              const FixationParams& params = {}) {
  std::vector<Fixation> out;
  if (params.dispersion_threshold <= 0.0 || params.min_duration <= 0.0)
    throw ConfigError("fixation params must be strictly positive");

  // Indices of valid samples only; invalid samples never start or end a
  // fixation and contribute nothing to the centroid.
  std::vector<std::size_t> valid;
  valid.reserve(gaze.size());
  for (std::size_t i = 0; i < gaze.size(); ++i)
    if (gaze[i].valid) valid.push_back(i);

  std::size_t k = 0;
  while (k < valid.size()) {
    detail::DispersionBox box;
    double sum_x = 0.0, sum_y = 0.0;
    std::size_t members = 0;
    std::size_t last = k;
    // Grow the window from valid[k] as far as dispersion and bridging allow.
    for (std::size_t j = k; j < valid.size(); ++j) {
      if (j > k &&
          !detail::bridgeable(gaze, valid[j - 1], valid[j], params.max_invalid_span))
        break;
      const GazeSample& s = gaze[valid[j]];
      detail::DispersionBox grown = box;
      grown.add(s.x, s.y);
      if (grown.dispersion() > params.dispersion_threshold) break;
      box = grown;
      sum_x += s.x;
      sum_y += s.y;
      ++members;
      last = j;
    }
    const double span = gaze[valid[last]].t - gaze[valid[k]].t;
    if (members >= 1 && span >= params.min_duration) {
      Fixation f;
      f.t_start = gaze[valid[k]].t;
      f.t_end = gaze[valid[last]].t;
      f.cx = sum_x / static_cast<double>(members);
      f.cy = sum_y / static_cast<double>(members);
      out.push_back(f);
      k = last + 1;
    } else {
      ++k;
    }
  }
  return out;
}

struct AtGazeValues {
  double saliency = 0.0;
  double objectness = 0.0;
  double depth = 0.0;  // meters
};

namespace detail {

// Maps an angular coordinate in [-fov/2, +fov/2] to a grid index in
// [0, cells). The upper FOV boundary belongs to the last cell.
inline int grid_index(double angle, double fov, int cells) {
  const double half = fov / 2.0;
  const double rel = (angle + half) / fov;
  int idx = static_cast<int>(std::floor(rel * cells));
  if (idx == cells && angle <= half) idx = cells - 1;
  return idx;
}

}  // namespace detail

/// Value of the map grid cell containing gaze position (x, y), for each of
/// the saliency / objectness / depth grids attached to the frame.
/// x and y are degrees in the scene-camera frame; +y is up, so larger y maps
/// to smaller row indices.
inline AtGazeValues at_gaze(const FrameFeatures& frame, const RecordingConstants& constants,
                            double x, double y) {
  if (!frame.saliency_map || !frame.objectness_map || !frame.depth_map)
    throw MapsAbsentError("frame carries no map grids");
  const double half = constants.fov_degrees / 2.0;
  if (x < -half || x > half || y < -half || y > half) {
    throw OutOfFieldError("gaze position outside the camera field of view");
  }
  const int cols = constants.map_grid_cols;
  const int rows = constants.map_grid_rows;
  const int col = detail::grid_index(x, constants.fov_degrees, cols);
  const int row = rows - 1 - detail::grid_index(y, constants.fov_degrees, rows);
  AtGazeValues v;
  v.saliency = frame.saliency_map->at(row, col);
  v.objectness = frame.objectness_map->at(row, col);
  v.depth = frame.depth_map->at(row, col);
  return v;
}

}  // namespace shiftcast
