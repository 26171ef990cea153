#pragma once

// Independent brute-force labeling oracle. Everything here is computed by
// direct linear scans over the annotation track — deliberately sharing no
// code with the examples module, since the two implementations are checked
// against each other.

#include <string>

#include "shiftcast/examples.hpp"
#include "shiftcast/recording.hpp"

namespace shiftcast {

struct OracleResult {
  bool eligible = false;
  bool label = false;
};

/// Labels one (task, t_ref, target_window) query by scanning the annotation
/// track. Eligibility follows the attention value at t_ref (half-open
/// intervals); shift labels scan every consecutive-interval boundary in
/// (t_ref, t_ref + target]; the focus label accumulates exact on-device
/// interval overlap. Throws OutOfRange when the query leaves the annotated
/// time range.
inline OracleResult oracle_label(const Recording& rec, Task task, double t_ref,
                                 double target_window) {
  const auto& ivs = rec.annotations.intervals;
  if (ivs.empty()) throw OutOfRangeError("recording has no annotations");
  if (t_ref < ivs.front().start || t_ref + target_window > ivs.back().end)
    throw OutOfRangeError("query outside the annotated time range");

  OracleResult result;

  // Attention at t_ref by linear scan.
  bool annotated = false;
  Attention at_ref = Attention::Device;
  for (const auto& iv : ivs) {
    if (t_ref >= iv.start && t_ref < iv.end) {
      annotated = true;
      at_ref = iv.attention;
      break;
    }
  }

  const double lo = t_ref;
  const double hi = t_ref + target_window;
  switch (task) {
    case Task::ShiftToEnvironment:
    case Task::ShiftToDevice: {
      const Attention required =
          task == Task::ShiftToEnvironment ? Attention::Device : Attention::Environment;
      result.eligible = annotated && at_ref == required;
      const Attention wanted =
          task == Task::ShiftToEnvironment ? Attention::Environment : Attention::Device;
      for (std::size_t i = 1; i < ivs.size(); ++i) {
        const bool boundary = ivs[i].start == ivs[i - 1].end &&
                              ivs[i].attention != ivs[i - 1].attention;
        if (!boundary) continue;
        const double b = ivs[i].start;
        if (b > lo && b <= hi && ivs[i].attention == wanted) {
          result.label = true;
          break;
        }
      }
      break;
    }
    case Task::PrimaryFocus: {
      result.eligible = true;
      double device_seconds = 0.0;
      for (const auto& iv : ivs) {
        if (iv.attention != Attention::Device) continue;
        const double a = iv.start > lo ? iv.start : lo;
        const double b = iv.end < hi ? iv.end : hi;
        if (b > a) device_seconds += b - a;
      }
      result.label = device_seconds / target_window > 0.5;
      break;
    }
  }
  return result;
}

}  // namespace shiftcast
