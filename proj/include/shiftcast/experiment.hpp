#pragma once

// Leave-one-person-out experiment driver: generate -> fold -> balance ->
// tune -> train -> predict -> score, with working/waiting and environment
// breakdowns in the report.

#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "shiftcast/examples.hpp"
#include "shiftcast/forest.hpp"
#include "shiftcast/metrics.hpp"

namespace shiftcast {

struct SubgroupScore {
  ConfusionMatrix cm;
  double weighted_f1 = 0.0;
  std::size_t count = 0;
};

struct FoldResult {
  std::string participant_id;
  ConfusionMatrix cm;
  double weighted_f1 = 0.0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  Hyperparams hyperparams;
  std::map<std::string, SubgroupScore> by_segment;      // working / waiting
  std::map<std::string, SubgroupScore> by_environment;  // scene classes
};

struct SkippedFold {
  std::string participant_id;
  std::string reason;
};

struct BreakdownRow {
  double mean_weighted_f1 = 0.0;
  std::size_t folds_counted = 0;
  ConfusionMatrix cm;
};

struct ExperimentReport {
  Task task = Task::ShiftToEnvironment;
  FeatureGroup group = FeatureGroup::Proposed;
  TaskConfig config;
  std::uint64_t seed = 0;
  std::vector<FoldResult> folds;
  std::vector<SkippedFold> skipped;
  double mean_weighted_f1 = 0.0;
  double std_weighted_f1 = 0.0;
  ConfusionMatrix total_cm;
  std::map<std::string, BreakdownRow> segment_breakdown;
  std::map<std::string, BreakdownRow> environment_breakdown;
};

namespace detail {

inline SubgroupScore score_subset(const std::vector<bool>& preds,
                                  const std::vector<bool>& labels,
                                  const std::vector<bool>& mask) {
  SubgroupScore s;
  std::vector<bool> p, l;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    p.push_back(preds[i]);
    l.push_back(labels[i]);
  }
  s.count = p.size();
  if (!p.empty()) {
    s.cm = confusion(p, l);
    s.weighted_f1 = weighted_f1(p, l);
  }
  return s;
}

}  // namespace detail

/// Runs the full pipeline over a corpus. Per fold: the training and test
/// sides are independently balanced to 50/50, hyperparameters come from
/// inner cross-validation on the balanced training set (skipped for a
/// one-point grid), and the held-out participant is scored with weighted F1.
/// Folds whose data cannot be balanced (a single class on either side) are
/// recorded as skipped and excluded from the mean.
inline ExperimentReport run_experiment(const std::vector<Recording>& recordings,
                                       const TaskConfig& cfg, FeatureGroup group,
                                       const std::vector<Hyperparams>& grid,
                                       std::uint64_t seed, unsigned workers = 1,
                                       int inner_k = 3) {
  if (grid.empty()) throw ConfigError("hyperparameter grid is empty");
  ExperimentReport report;
  report.task = cfg.task;
  report.group = group;
  report.config = cfg;
  report.seed = seed;

  // Examples per recording, evaluated in parallel slots for determinism.
  std::vector<std::vector<Example>> per_recording(recordings.size());
  parallel_for(recordings.size(), workers, [&](std::size_t i) {
    per_recording[i] = generate_examples(recordings[i], cfg, group);
  });
  std::vector<Example> all;
  for (auto& chunk : per_recording) {
    all.insert(all.end(), std::make_move_iterator(chunk.begin()),
               std::make_move_iterator(chunk.end()));
    chunk.clear();
    chunk.shrink_to_fit();
  }

  auto folds = lopo_folds(all);
  all.clear();
  all.shrink_to_fit();

  struct Slot {
    bool ok = false;
    FoldResult result;
    std::string skip_reason;
  };
  std::vector<Slot> slots(folds.size());

  parallel_for(folds.size(), workers, [&](std::size_t fi) {
    Fold& fold = folds[fi];
    Slot& slot = slots[fi];
    const std::uint64_t fold_seed = mix_seed(seed, fold.participant_id);
    try {
      const auto train_set = balance(fold.train, mix_seed(fold_seed, 1));
      const auto test_set = balance(fold.test, mix_seed(fold_seed, 2));
      const Hyperparams hp = grid.size() == 1
                                 ? grid.front()
                                 : tune(train_set, grid, inner_k, mix_seed(fold_seed, 3));
      const Forest forest = train_forest(train_set, hp, mix_seed(fold_seed, 4));

      std::vector<bool> preds, labels;
      preds.reserve(test_set.size());
      labels.reserve(test_set.size());
      for (const auto& ex : test_set) {
        preds.push_back(predict(forest, ex.features).label);
        labels.push_back(ex.label);
      }

      FoldResult r;
      r.participant_id = fold.participant_id;
      r.cm = confusion(preds, labels);
      r.weighted_f1 = weighted_f1(preds, labels);
      r.n_train = train_set.size();
      r.n_test = test_set.size();
      r.hyperparams = hp;
      for (const char* kind : {"working", "waiting"}) {
        std::vector<bool> mask;
        mask.reserve(test_set.size());
        for (const auto& ex : test_set)
          mask.push_back(std::string_view(to_string(ex.segment_kind)) == kind);
        r.by_segment[kind] = detail::score_subset(preds, labels, mask);
      }
      {
        std::vector<std::string> envs;
        for (const auto& ex : test_set) envs.push_back(ex.environment);
        std::sort(envs.begin(), envs.end());
        envs.erase(std::unique(envs.begin(), envs.end()), envs.end());
        for (const auto& env : envs) {
          std::vector<bool> mask;
          mask.reserve(test_set.size());
          for (const auto& ex : test_set) mask.push_back(ex.environment == env);
          r.by_environment[env] = detail::score_subset(preds, labels, mask);
        }
      }
      slot.result = std::move(r);
      slot.ok = true;
    } catch (const SingleClassError& e) {
      slot.skip_reason = e.what();
    } catch (const DegenerateDataError& e) {
      slot.skip_reason = e.what();
    }
  });

  std::vector<double> scores;
  for (std::size_t fi = 0; fi < slots.size(); ++fi) {
    if (slots[fi].ok) {
      report.folds.push_back(std::move(slots[fi].result));
      scores.push_back(report.folds.back().weighted_f1);
      report.total_cm += report.folds.back().cm;
    } else {
      report.skipped.push_back({folds[fi].participant_id, slots[fi].skip_reason});
    }
  }
  if (!scores.empty()) {
    double sum = 0.0;
    for (double s : scores) sum += s;
    report.mean_weighted_f1 = sum / static_cast<double>(scores.size());
    double ss = 0.0;
    for (double s : scores) {
      const double d = s - report.mean_weighted_f1;
      ss += d * d;
    }
    report.std_weighted_f1 = std::sqrt(ss / static_cast<double>(scores.size()));
  }

  auto aggregate = [&](auto member, std::map<std::string, BreakdownRow>& out) {
    for (const auto& fold : report.folds) {
      for (const auto& [key, sub] : fold.*member) {
        if (sub.count == 0) continue;
        BreakdownRow& row = out[key];
        row.mean_weighted_f1 += sub.weighted_f1;
        row.folds_counted += 1;
        row.cm += sub.cm;
      }
    }
    for (auto& [key, row] : out) {
      (void)key;
      if (row.folds_counted > 0)
        row.mean_weighted_f1 /= static_cast<double>(row.folds_counted);
    }
  };
  aggregate(&FoldResult::by_segment, report.segment_breakdown);
  aggregate(&FoldResult::by_environment, report.environment_breakdown);
  return report;
}

// ---------------------------------------------------------------------------
// Report rendering
// ---------------------------------------------------------------------------

namespace detail {

inline json cm_to_json(const ConfusionMatrix& cm) {
  return json{{"tp", cm.tp}, {"fp", cm.fp}, {"fn", cm.fn}, {"tn", cm.tn}};
}

inline json cm_normalized_to_json(const ConfusionMatrix& cm) {
  const double n = cm.total() > 0 ? static_cast<double>(cm.total()) : 1.0;
  return json{{"tp", static_cast<double>(cm.tp) / n},
              {"fp", static_cast<double>(cm.fp) / n},
              {"fn", static_cast<double>(cm.fn) / n},
              {"tn", static_cast<double>(cm.tn) / n}};
}

inline json breakdown_to_json(const std::map<std::string, BreakdownRow>& rows) {
  json out = json::object();
  for (const auto& [key, row] : rows)
    out[key] = json{{"mean_weighted_f1", row.mean_weighted_f1},
                    {"folds", row.folds_counted},
                    {"confusion", cm_to_json(row.cm)},
                    {"confusion_normalized", cm_normalized_to_json(row.cm)}};
  return out;
}

}  // namespace detail

inline json report_to_json(const ExperimentReport& report) {
  json folds = json::array();
  for (const auto& f : report.folds) {
    json sub_seg = json::object();
    for (const auto& [k, s] : f.by_segment)
      sub_seg[k] = json{{"weighted_f1", s.weighted_f1}, {"count", s.count}};
    json sub_env = json::object();
    for (const auto& [k, s] : f.by_environment)
      sub_env[k] = json{{"weighted_f1", s.weighted_f1}, {"count", s.count}};
    folds.push_back(json{{"participant", f.participant_id},
                         {"weighted_f1", f.weighted_f1},
                         {"confusion", detail::cm_to_json(f.cm)},
                         {"n_train", f.n_train},
                         {"n_test", f.n_test},
                         {"hyperparams", hyperparams_to_json(f.hyperparams)},
                         {"by_segment", sub_seg},
                         {"by_environment", sub_env}});
  }
  json skipped = json::array();
  for (const auto& s : report.skipped)
    skipped.push_back(json{{"participant", s.participant_id}, {"reason", s.reason}});
  return json{{"task", to_string(report.task)},
              {"group", to_string(report.group)},
              {"feature_window", report.config.feature_window},
              {"target_window", report.config.target_window},
              {"stride", report.config.stride},
              {"seed", report.seed},
              {"mean_weighted_f1", report.mean_weighted_f1},
              {"std_weighted_f1", report.std_weighted_f1},
              {"confusion", detail::cm_to_json(report.total_cm)},
              {"confusion_normalized", detail::cm_normalized_to_json(report.total_cm)},
              {"folds", folds},
              {"skipped", skipped},
              {"by_segment", detail::breakdown_to_json(report.segment_breakdown)},
              {"by_environment", detail::breakdown_to_json(report.environment_breakdown)}};
}

/// Fixed-width text rendering of a report (per fold + breakdowns).
inline std::string report_to_text(const ExperimentReport& report) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "task=" << to_string(report.task) << " group=" << to_string(report.group)
     << " target_window=" << report.config.target_window << "s"
     << " seed=" << report.seed << "\n";
  os << std::left << std::setw(16) << "participant" << std::right << std::setw(8) << "wF1"
     << std::setw(8) << "train" << std::setw(7) << "test" << std::setw(6) << "tp"
     << std::setw(6) << "fp" << std::setw(6) << "fn" << std::setw(6) << "tn" << "\n";
  for (const auto& f : report.folds) {
    os << std::left << std::setw(16) << f.participant_id << std::right << std::setw(8)
       << f.weighted_f1 << std::setw(8) << f.n_train << std::setw(7) << f.n_test
       << std::setw(6) << f.cm.tp << std::setw(6) << f.cm.fp << std::setw(6) << f.cm.fn
       << std::setw(6) << f.cm.tn << "\n";
  }
  for (const auto& s : report.skipped)
    os << std::left << std::setw(16) << s.participant_id << "  skipped: " << s.reason << "\n";
  os << "mean weighted F1 = " << report.mean_weighted_f1
     << "  (std " << report.std_weighted_f1 << ", " << report.folds.size() << " folds)\n";
  auto render_breakdown = [&](const char* title,
                              const std::map<std::string, BreakdownRow>& rows) {
    if (rows.empty()) return;
    os << title << ":\n";
    for (const auto& [key, row] : rows)
      os << "  " << std::left << std::setw(14) << key << std::right << std::setw(8)
         << row.mean_weighted_f1 << "  (" << row.folds_counted << " folds)\n";
  };
  render_breakdown("by segment", report.segment_breakdown);
  render_breakdown("by environment", report.environment_breakdown);
  return os.str();
}

/// Normalized confusion cells as CSV (overall plus per-segment rows).
inline std::string report_cm_csv(const ExperimentReport& report) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "scope,tp,fp,fn,tn\n";
  auto row = [&](const std::string& scope, const ConfusionMatrix& cm) {
    const double n = cm.total() > 0 ? static_cast<double>(cm.total()) : 1.0;
    os << scope << ',' << cm.tp / n << ',' << cm.fp / n << ',' << cm.fn / n << ','
       << cm.tn / n << "\n";
  };
  row("all", report.total_cm);
  for (const auto& [key, b] : report.segment_breakdown) row("segment:" + key, b.cm);
  for (const auto& [key, b] : report.environment_breakdown) row("environment:" + key, b.cm);
  return os.str();
}

}  // namespace shiftcast
