#pragma once

// Confusion-matrix metrics: F1 and support-weighted F1 over both classes.

#include <cstdint>
#include <vector>

#include "shiftcast/common.hpp"

namespace shiftcast {

struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const { return tp + fp + fn + tn; }
  ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  bool operator==(const ConfusionMatrix&) const = default;
};

inline ConfusionMatrix confusion(const std::vector<bool>& preds,
                                 const std::vector<bool>& labels) {
  if (preds.size() != labels.size())
    throw LengthMismatchError("predictions and labels differ in length");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (labels[i])
      (preds[i] ? cm.tp : cm.fn) += 1;
    else
      (preds[i] ? cm.fp : cm.tn) += 1;
  }
  return cm;
}

/// F1 = 2PR/(P+R) with P = tp/(tp+fp), R = tp/(tp+fn); 0 whenever a
/// denominator vanishes.
inline double f1(const ConfusionMatrix& cm) {
  const double p = cm.tp + cm.fp == 0 ? 0.0
                                      : static_cast<double>(cm.tp) /
                                            static_cast<double>(cm.tp + cm.fp);
  const double r = cm.tp + cm.fn == 0 ? 0.0
                                      : static_cast<double>(cm.tp) /
                                            static_cast<double>(cm.tp + cm.fn);
  if (p + r == 0.0) return 0.0;
  return 2.0 * p * r / (p + r);
}

/// Support-weighted mean of the per-class F1 scores, treating each class as
/// the positive one in turn.
inline double weighted_f1(const std::vector<bool>& preds, const std::vector<bool>& labels) {
  if (preds.size() != labels.size())
    throw LengthMismatchError("predictions and labels differ in length");
  if (labels.empty()) throw LengthMismatchError("cannot score an empty set");
  const ConfusionMatrix cm_true = confusion(preds, labels);
  // Swap the positive class: true<->false flips tp<->tn and fp<->fn.
  const ConfusionMatrix cm_false{cm_true.tn, cm_true.fn, cm_true.fp, cm_true.tp};
  const auto n = static_cast<double>(labels.size());
  const double support_true = static_cast<double>(cm_true.tp + cm_true.fn);
  const double support_false = n - support_true;
  return (support_true * f1(cm_true) + support_false * f1(cm_false)) / n;
}

}  // namespace shiftcast
