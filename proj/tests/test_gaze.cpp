#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "helpers.hpp"
#include "shiftcast/gaze.hpp"

using namespace shiftcast;

namespace {

std::vector<GazeSample> cluster(double t0, double dt, int n, double x, double y) {
  std::vector<GazeSample> out;
  for (int i = 0; i < n; ++i) {
    GazeSample s;
    s.t = t0 + i * dt;
    s.valid = true;
    s.x = x;
    s.y = y;
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_CASE("a stable 0.30 s cluster yields one fixation with its centroid") {
  const auto gaze = cluster(0.0, 0.30 / 9.0, 10, 0.0, 0.0);
  const auto fixations = detect_fixations(gaze, {});
  REQUIRE(fixations.size() == 1);
  CHECK(fixations[0].t_start == Catch::Approx(0.0));
  CHECK(fixations[0].t_end == Catch::Approx(0.30));
  CHECK(fixations[0].cx == Catch::Approx(0.0));
  CHECK(fixations[0].cy == Catch::Approx(0.0));
}

TEST_CASE("two well-separated clusters yield exactly two fixations") {
  auto gaze = cluster(0.0, 0.02, 11, 0.0, 0.0);  // spans 0.20 s
  const auto second = cluster(0.5, 0.02, 11, 10.0, 0.0);
  gaze.insert(gaze.end(), second.begin(), second.end());
  const auto fixations = detect_fixations(gaze, {});
  REQUIRE(fixations.size() == 2);
  CHECK(fixations[0].cx == Catch::Approx(0.0));
  CHECK(fixations[1].cx == Catch::Approx(10.0));
  CHECK(fixations[0].t_end < fixations[1].t_start);
}

TEST_CASE("empty input yields empty output") {
  CHECK(detect_fixations({}, {}).empty());
}

TEST_CASE("short invalid runs are bridged, long ones split the fixation") {
  // 30 Hz cluster with a 2-sample blink in the middle (invalid span 1/30 s).
  auto gaze = cluster(0.0, 1.0 / 30.0, 20, 0.0, 0.0);
  gaze[9].valid = false;
  gaze[10].valid = false;
  auto fixations = detect_fixations(gaze, {});
  REQUIRE(fixations.size() == 1);

  // A 4-sample invalid run spans 0.1 s > 0.05 s and terminates the window.
  auto gaze2 = cluster(0.0, 1.0 / 30.0, 30, 0.0, 0.0);
  for (int i = 12; i < 16; ++i) gaze2[i].valid = false;
  auto fixations2 = detect_fixations(gaze2, {});
  REQUIRE(fixations2.size() == 2);
}

TEST_CASE("random sequences match the brute-force greedy oracle exactly") {
  std::mt19937_64 rng(2024);
  const std::vector<FixationParams> param_sets = {
      {1.0, 0.150, 0.05}, {2.5, 0.100, 0.05}, {0.5, 0.200, 0.05}};
  for (int trial = 0; trial < 200; ++trial) {
    const auto gaze = testutil::random_gaze_sequence(rng);
    for (const auto& params : param_sets) {
      const auto got = detect_fixations(gaze, params);
      const auto expected = testutil::brute_force_fixations(gaze, params);
      INFO("trial " << trial << " n=" << gaze.size());
      REQUIRE(got.size() == expected.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].t_start == expected[i].t_start);
        CHECK(got[i].t_end == expected[i].t_end);
        CHECK(got[i].cx == Catch::Approx(expected[i].cx).margin(1e-12));
        CHECK(got[i].cy == Catch::Approx(expected[i].cy).margin(1e-12));
      }
    }
  }
}

TEST_CASE("fixation properties hold on random inputs") {
  std::mt19937_64 rng(77);
  const FixationParams params;
  for (int trial = 0; trial < 100; ++trial) {
    const auto gaze = testutil::random_gaze_sequence(rng);
    const auto fixations = detect_fixations(gaze, params);

    // Disjoint, ordered, and re-checked against the thresholds.
    for (std::size_t i = 0; i < fixations.size(); ++i) {
      const auto& f = fixations[i];
      CHECK(f.duration() >= params.min_duration);
      if (i > 0) CHECK(fixations[i - 1].t_end < f.t_start);
      double min_x = 1e9, max_x = -1e9, min_y = 1e9, max_y = -1e9;
      for (const auto& s : gaze) {
        if (!s.valid || s.t < f.t_start || s.t > f.t_end) continue;
        min_x = std::min(min_x, s.x);
        max_x = std::max(max_x, s.x);
        min_y = std::min(min_y, s.y);
        max_y = std::max(max_y, s.y);
      }
      CHECK((max_x - min_x) + (max_y - min_y) <= params.dispersion_threshold + 1e-12);
    }
  }
}

TEST_CASE("shrinking min_duration never decreases the fixation count") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto gaze = testutil::random_gaze_sequence(rng);
    std::size_t prev = 0;
    bool first = true;
    for (double dur : {0.30, 0.20, 0.15, 0.10, 0.05}) {
      FixationParams params;
      params.min_duration = dur;
      const auto n = detect_fixations(gaze, params).size();
      if (!first) CHECK(n >= prev);
      prev = n;
      first = false;
    }
  }
}

TEST_CASE("splitting at a non-fixation boundary and concatenating is invariant") {
  std::mt19937_64 rng(55);
  const FixationParams params;
  for (int trial = 0; trial < 50; ++trial) {
    const auto gaze = testutil::random_gaze_sequence(rng);
    const auto whole = detect_fixations(gaze, params);
    if (gaze.size() < 4) continue;
    // Pick a split index that falls strictly between fixations.
    for (std::size_t cut = 1; cut < gaze.size(); ++cut) {
      const double t = gaze[cut].t;
      bool inside = false;
      for (const auto& f : whole)
        if (t > f.t_start - 1e-12 && t <= f.t_end + 1e-12) inside = true;
      if (inside) continue;
      std::vector<GazeSample> a(gaze.begin(), gaze.begin() + cut);
      std::vector<GazeSample> b(gaze.begin() + cut, gaze.end());
      auto fa = detect_fixations(a, params);
      const auto fb = detect_fixations(b, params);
      fa.insert(fa.end(), fb.begin(), fb.end());
      CHECK(fa == whole);
      break;
    }
  }
}

TEST_CASE("at_gaze reads the grid cell containing the gaze position") {
  Recording rec = testutil::make_tiny_recording();
  FrameFeatures& frame = rec.frames[0];
  const int rows = rec.constants.map_grid_rows;
  const int cols = rec.constants.map_grid_cols;

  SECTION("uniform grid returns the constant") {
    MapGrid uniform{rows, cols, std::vector<double>(static_cast<std::size_t>(rows) * cols, 0.5)};
    frame.saliency_map = uniform;
    frame.objectness_map = uniform;
    frame.depth_map = uniform;
    for (double x : {-80.0, 0.0, 42.0})
      CHECK(at_gaze(frame, rec.constants, x, -x / 2.0).saliency == 0.5);
  }

  SECTION("a single hot cell is hit exactly at its center") {
    MapGrid grid{rows, cols, std::vector<double>(static_cast<std::size_t>(rows) * cols, 0.0)};
    const int row = 5, col = 20;
    grid.values[static_cast<std::size_t>(row) * cols + col] = 0.9;
    frame.saliency_map = grid;
    frame.objectness_map = grid;
    frame.depth_map = grid;
    const double fov = rec.constants.fov_degrees;
    const double cell_w = fov / cols;
    const double cell_h = fov / rows;
    const double x = -fov / 2.0 + (col + 0.5) * cell_w;
    // Row 0 is the top of the FOV; +y is up.
    const double y = fov / 2.0 - (row + 0.5) * cell_h;
    CHECK(at_gaze(frame, rec.constants, x, y).saliency == 0.9);
    CHECK(at_gaze(frame, rec.constants, x + cell_w, y).saliency == 0.0);
  }

  SECTION("gaze just outside the field of view raises OutOfField") {
    MapGrid uniform{rows, cols, std::vector<double>(static_cast<std::size_t>(rows) * cols, 0.5)};
    frame.saliency_map = uniform;
    frame.objectness_map = uniform;
    frame.depth_map = uniform;
    const double half = rec.constants.fov_degrees / 2.0;
    CHECK_THROWS_AS(at_gaze(frame, rec.constants, half + 0.1, 0.0), OutOfFieldError);
    CHECK(at_gaze(frame, rec.constants, half, 0.0).saliency == 0.5);  // boundary included
  }

  SECTION("absent maps raise MapsAbsent") {
    CHECK_THROWS_AS(at_gaze(rec.frames[1], rec.constants, 0.0, 0.0), MapsAbsentError);
  }
}
