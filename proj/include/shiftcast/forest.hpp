#pragma once

// Random-forest classifier with deterministic training: bootstrap resampling
// and feature subsampling per node, Gini-minimizing threshold splits over
// midpoints of sorted distinct values, majority-vote prediction. All
// randomness derives from (seed, tree index), so results are independent of
// thread scheduling and of training-example order.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "shiftcast/common.hpp"
#include "shiftcast/examples.hpp"
#include "shiftcast/metrics.hpp"

namespace shiftcast {

struct Hyperparams {
  int n_trees = 100;
  int max_depth = 16;
  int min_samples_leaf = 1;
  int n_features_per_split = 0;  // 0 => round(sqrt(d)) at train time

  void validate(std::size_t dimension) const {
    if (n_trees < 1 || max_depth < 1 || min_samples_leaf < 1)
      throw ConfigError("hyperparameters must be >= 1");
    if (n_features_per_split < 0 ||
        static_cast<std::size_t>(n_features_per_split) > dimension)
      throw ConfigError("n_features_per_split exceeds the feature dimension");
  }
  bool operator==(const Hyperparams&) const = default;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::uint32_t count_true = 0;   // training samples reaching the leaf
  std::uint32_t count_false = 0;

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct Tree {
  std::vector<TreeNode> nodes;

  bool leaf_vote(const std::vector<double>& values) const {
    int i = 0;
    while (!nodes[i].is_leaf())
      i = values[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
    return nodes[i].count_true > nodes[i].count_false;  // tie votes false
  }
  bool operator==(const Tree&) const = default;
};

struct Forest {
  Hyperparams hp;
  std::vector<std::string> feature_names;
  std::uint64_t seed = 0;
  std::vector<Tree> trees;

  bool operator==(const Forest&) const = default;
};

struct Prediction {
  bool label = false;
  double score = 0.0;  // fraction of trees voting true
};

namespace detail {

struct TrainData {
  std::vector<std::vector<double>> columns;  // [feature][row], canonical order
  std::vector<std::uint8_t> labels;          // [row]
  std::size_t rows = 0;
};

// Canonical value-based order: permuting the caller's example order must not
// change the trained forest.
inline std::vector<std::size_t> canonical_order(const std::vector<Example>& examples) {
  std::vector<std::size_t> idx(examples.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const Example& ea = examples[a];
    const Example& eb = examples[b];
    if (ea.participant_id != eb.participant_id) return ea.participant_id < eb.participant_id;
    if (ea.t_ref != eb.t_ref) return ea.t_ref < eb.t_ref;
    if (ea.label != eb.label) return ea.label < eb.label;
    return ea.features.values < eb.features.values;
  });
  return idx;
}

inline double gini(std::uint32_t c_true, std::uint32_t c_false) {
  const double n = static_cast<double>(c_true) + static_cast<double>(c_false);
  if (n == 0.0) return 0.0;
  const double pt = static_cast<double>(c_true) / n;
  const double pf = static_cast<double>(c_false) / n;
  return 1.0 - pt * pt - pf * pf;
}

struct SplitChoice {
  bool found = false;
  double impurity = 0.0;
  int feature = 0;
  double threshold = 0.0;

  // Minimal impurity; ties break to the lowest feature index, then the
  // lowest threshold.
  bool better_than(const SplitChoice& o) const {
    if (!o.found) return found;
    if (!found) return false;
    if (impurity != o.impurity) return impurity < o.impurity;
    if (feature != o.feature) return feature < o.feature;
    return threshold < o.threshold;
  }
};

class TreeBuilder {
 public:
  TreeBuilder(const TrainData& data, const Hyperparams& hp, std::uint64_t tree_seed)
      : data_(data), hp_(hp), rng_(tree_seed) {}

  Tree build() {
    const std::size_t n = data_.rows;
    std::vector<std::uint32_t> sample(n);
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(n - 1));
    for (auto& s : sample) s = pick(rng_);
    std::sort(sample.begin(), sample.end());  // canonical bootstrap layout
    Tree tree;
    grow(tree, sample, 0);
    return tree;
  }

 private:
  // depth counts splits above this node; the root grows at depth 0 and every
  // leaf ends at depth <= max_depth.
  int grow(Tree& tree, std::vector<std::uint32_t>& rows, int depth) {
    std::uint32_t c_true = 0;
    for (auto r : rows) c_true += data_.labels[r];
    const auto c_false = static_cast<std::uint32_t>(rows.size()) - c_true;

    const int node_index = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(TreeNode{});

    const bool pure = c_true == 0 || c_false == 0;
    const bool can_split =
        !pure && depth < hp_.max_depth &&
        rows.size() >= 2 * static_cast<std::size_t>(hp_.min_samples_leaf);
    SplitChoice best;
    if (can_split) best = find_split(rows);

    if (!best.found) {
      tree.nodes[node_index].count_true = c_true;
      tree.nodes[node_index].count_false = c_false;
      return node_index;
    }

    std::vector<std::uint32_t> left, right;
    left.reserve(rows.size());
    right.reserve(rows.size());
    const auto& col = data_.columns[best.feature];
    for (auto r : rows)
      (col[r] <= best.threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    tree.nodes[node_index].feature = best.feature;
    tree.nodes[node_index].threshold = best.threshold;
    const int l = grow(tree, left, depth + 1);
    tree.nodes[node_index].left = l;
    const int r = grow(tree, right, depth + 1);
    tree.nodes[node_index].right = r;
    return node_index;
  }

  SplitChoice find_split(const std::vector<std::uint32_t>& rows) {
    const std::size_t d = data_.columns.size();
    std::size_t k = hp_.n_features_per_split == 0
                        ? static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(d))))
                        : static_cast<std::size_t>(hp_.n_features_per_split);
    k = std::clamp<std::size_t>(k, 1, d);

    // Partial Fisher-Yates: draw k distinct feature indices.
    candidates_.resize(d);
    for (std::size_t i = 0; i < d; ++i) candidates_[i] = static_cast<int>(i);
    for (std::size_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, d - 1);
      std::swap(candidates_[i], candidates_[pick(rng_)]);
    }

    std::uint32_t total_true = 0;
    for (auto r : rows) total_true += data_.labels[r];
    const auto n = static_cast<std::uint32_t>(rows.size());

    SplitChoice best;
    for (std::size_t ci = 0; ci < k; ++ci) {
      const int f = candidates_[ci];
      const auto& col = data_.columns[f];
      scratch_.clear();
      for (auto r : rows) scratch_.push_back({col[r], data_.labels[r]});
      std::sort(scratch_.begin(), scratch_.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });

      std::uint32_t left_true = 0;
      for (std::uint32_t i = 0; i + 1 < n; ++i) {
        left_true += scratch_[i].second;
        if (scratch_[i].first == scratch_[i + 1].first) continue;
        const std::uint32_t nl = i + 1;
        const std::uint32_t nr = n - nl;
        if (nl < static_cast<std::uint32_t>(hp_.min_samples_leaf) ||
            nr < static_cast<std::uint32_t>(hp_.min_samples_leaf))
          continue;
        const double thr = scratch_[i].first + 0.5 * (scratch_[i + 1].first - scratch_[i].first);
        // Degenerate midpoints (adjacent floats) cannot separate the values.
        if (!(thr >= scratch_[i].first && thr < scratch_[i + 1].first)) continue;
        const double impurity =
            (static_cast<double>(nl) * gini(left_true, nl - left_true) +
             static_cast<double>(nr) * gini(total_true - left_true, nr - (total_true - left_true))) /
            static_cast<double>(n);
        SplitChoice cand{true, impurity, f, thr};
        if (cand.better_than(best)) best = cand;
      }
    }
    return best;
  }

  const TrainData& data_;
  const Hyperparams& hp_;
  std::mt19937_64 rng_;
  std::vector<int> candidates_;
  std::vector<std::pair<double, std::uint8_t>> scratch_;
};

inline TrainData make_train_data(const std::vector<Example>& examples) {
  TrainData data;
  data.rows = examples.size();
  const auto order = canonical_order(examples);
  const std::size_t d = examples.front().features.values.size();
  data.columns.assign(d, std::vector<double>(data.rows));
  data.labels.resize(data.rows);
  for (std::size_t row = 0; row < order.size(); ++row) {
    const Example& ex = examples[order[row]];
    if (ex.features.values.size() != d)
      throw SchemaMismatchError("training examples disagree on feature dimension");
    for (std::size_t f = 0; f < d; ++f) data.columns[f][row] = ex.features.values[f];
    data.labels[row] = ex.label ? 1 : 0;
  }
  return data;
}

}  // namespace detail

/// Trains hp.n_trees trees, one bootstrap resample each. Fully deterministic
/// given (examples-as-set, hp, seed); trees may build in parallel.
inline Forest train_forest(const std::vector<Example>& examples, const Hyperparams& hp,
                           std::uint64_t seed, unsigned workers = 1) {
  if (examples.empty()) throw DegenerateDataError("cannot train on zero examples");
  hp.validate(examples.front().features.values.size());

  Forest forest;
  forest.hp = hp;
  forest.seed = seed;
  if (examples.front().features.schema)
    forest.feature_names = examples.front().features.schema->names;

  const detail::TrainData data = detail::make_train_data(examples);
  forest.trees.resize(static_cast<std::size_t>(hp.n_trees));
  parallel_for(forest.trees.size(), workers, [&](std::size_t i) {
    detail::TreeBuilder builder(data, hp, mix_seed(seed, i));
    forest.trees[i] = builder.build();
  });
  return forest;
}

/// Majority vote across trees: label = score > 0.5, ties vote false.
inline Prediction predict(const Forest& forest, const FeatureVector& fv) {
  if (!fv.schema || fv.schema->names != forest.feature_names)
    throw SchemaMismatchError("feature vector does not match the forest schema");
  std::size_t votes = 0;
  for (const auto& tree : forest.trees) votes += tree.leaf_vote(fv.values) ? 1 : 0;
  Prediction p;
  p.score = static_cast<double>(votes) / static_cast<double>(forest.trees.size());
  p.label = p.score > 0.5;
  return p;
}

/// Default tuning grid over max depth, minimum leaf size and the number of
/// features per split (sqrt(d) and d/3).
inline std::vector<Hyperparams> default_grid(std::size_t dimension, int n_trees = 100) {
  std::vector<Hyperparams> grid;
  const int root = std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(dimension)))));
  const int third = std::max(1, static_cast<int>(std::lround(static_cast<double>(dimension) / 3.0)));
  std::vector<int> feats{std::min<int>(root, static_cast<int>(dimension)),
                         std::min<int>(third, static_cast<int>(dimension))};
  if (feats[0] == feats[1]) feats.pop_back();
  for (int depth : {4, 8, 16})
    for (int leaf : {1, 5, 20})
      for (int f : feats) grid.push_back(Hyperparams{n_trees, depth, leaf, f});
  return grid;
}

/// k-fold cross-validation on the training set, participant-stratified when
/// at least k distinct participants exist (whole participants per fold);
/// otherwise examples round-robin in canonical order. Returns the grid point
/// with the highest mean weighted F1, ties resolved by grid order.
inline Hyperparams tune(const std::vector<Example>& train, const std::vector<Hyperparams>& grid,
                        int k, std::uint64_t seed, unsigned workers = 1) {
  if (grid.empty()) throw ConfigError("tuning grid is empty");
  if (k < 2) throw ConfigError("cross-validation needs k >= 2");
  if (train.empty()) throw DegenerateDataError("cannot tune on zero examples");

  // Fold assignment per example.
  std::vector<int> fold_of(train.size(), 0);
  {
    std::vector<std::string> participants;
    for (const auto& ex : train) participants.push_back(ex.participant_id);
    std::sort(participants.begin(), participants.end());
    participants.erase(std::unique(participants.begin(), participants.end()),
                       participants.end());
    if (participants.size() >= static_cast<std::size_t>(k)) {
      for (std::size_t i = 0; i < train.size(); ++i) {
        const auto it = std::lower_bound(participants.begin(), participants.end(),
                                         train[i].participant_id);
        fold_of[i] = static_cast<int>((it - participants.begin()) % k);
      }
    } else {
      const auto order = detail::canonical_order(train);
      for (std::size_t pos = 0; pos < order.size(); ++pos)
        fold_of[order[pos]] = static_cast<int>(pos % static_cast<std::size_t>(k));
    }
  }

  std::vector<double> scores(grid.size(), 0.0);
  parallel_for(grid.size(), workers, [&](std::size_t gi) {
    double sum = 0.0;
    int counted = 0;
    for (int f = 0; f < k; ++f) {
      std::vector<Example> cv_train, cv_test;
      for (std::size_t i = 0; i < train.size(); ++i)
        (fold_of[i] == f ? cv_test : cv_train).push_back(train[i]);
      if (cv_train.empty() || cv_test.empty()) continue;
      const Forest forest =
          train_forest(cv_train, grid[gi], mix_seed(mix_seed(seed, gi), static_cast<std::uint64_t>(f)));
      std::vector<bool> preds, labels;
      preds.reserve(cv_test.size());
      labels.reserve(cv_test.size());
      for (const auto& ex : cv_test) {
        preds.push_back(predict(forest, ex.features).label);
        labels.push_back(ex.label);
      }
      sum += weighted_f1(preds, labels);
      ++counted;
    }
    scores[gi] = counted > 0 ? sum / counted : 0.0;
  });

  std::size_t best = 0;
  for (std::size_t gi = 1; gi < grid.size(); ++gi)
    if (scores[gi] > scores[best]) best = gi;
  return grid[best];
}

// ---------------------------------------------------------------------------
// Model serialization
// ---------------------------------------------------------------------------

inline json hyperparams_to_json(const Hyperparams& hp) {
  return json{{"n_trees", hp.n_trees},
              {"max_depth", hp.max_depth},
              {"min_samples_leaf", hp.min_samples_leaf},
              {"n_features_per_split", hp.n_features_per_split}};
}

inline Hyperparams hyperparams_from_json(const json& j) {
  Hyperparams hp;
  hp.n_trees = j.at("n_trees").get<int>();
  hp.max_depth = j.at("max_depth").get<int>();
  hp.min_samples_leaf = j.at("min_samples_leaf").get<int>();
  hp.n_features_per_split = j.at("n_features_per_split").get<int>();
  return hp;
}

inline json forest_to_json(const Forest& forest) {
  json trees = json::array();
  for (const auto& tree : forest.trees) {
    json nodes = json::array();
    for (const auto& n : tree.nodes)
      nodes.push_back(json::array(
          {n.feature, n.threshold, n.left, n.right, n.count_true, n.count_false}));
    trees.push_back(std::move(nodes));
  }
  return json{{"format", "shiftcast-forest/1"},
              {"hyperparams", hyperparams_to_json(forest.hp)},
              {"seed", forest.seed},
              {"feature_names", forest.feature_names},
              {"trees", trees}};
}

inline Forest forest_from_json(const json& j) {
  Forest forest;
  forest.hp = hyperparams_from_json(j.at("hyperparams"));
  forest.seed = j.at("seed").get<std::uint64_t>();
  forest.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  for (const auto& tj : j.at("trees")) {
    Tree tree;
    for (const auto& nj : tj) {
      TreeNode n;
      n.feature = nj.at(0).get<int>();
      n.threshold = nj.at(1).get<double>();
      n.left = nj.at(2).get<int>();
      n.right = nj.at(3).get<int>();
      n.count_true = nj.at(4).get<std::uint32_t>();
      n.count_false = nj.at(5).get<std::uint32_t>();
      tree.nodes.push_back(n);
    }
    forest.trees.push_back(std::move(tree));
  }
  return forest;
}

}  // namespace shiftcast
