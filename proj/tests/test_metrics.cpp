#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "shiftcast/metrics.hpp"

using namespace shiftcast;

TEST_CASE("f1 on the listed confusion matrices") {
  CHECK(f1({1, 0, 0, 0}) == 1.0);
  CHECK(f1({0, 3, 2, 0}) == 0.0);
  CHECK(f1({0, 0, 0, 5}) == 0.0);
  // tp=3 fp=1 fn=2: P=0.75, R=0.6, F1=2/3.
  CHECK(f1({3, 1, 2, 0}) == Catch::Approx(2.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("f1 is invariant under scaling all counts") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::uint64_t> count(0, 50);
  for (int trial = 0; trial < 100; ++trial) {
    const ConfusionMatrix cm{count(rng), count(rng), count(rng), count(rng)};
    for (std::uint64_t scale : {2ull, 7ull, 100ull}) {
      const ConfusionMatrix scaled{cm.tp * scale, cm.fp * scale, cm.fn * scale,
                                   cm.tn * scale};
      CHECK(f1(scaled) == Catch::Approx(f1(cm)).margin(1e-12));
    }
  }
}

TEST_CASE("weighted f1 on hand-computed cases") {
  SECTION("perfect predictions") {
    CHECK(weighted_f1({true, false, true}, {true, false, true}) == 1.0);
  }
  SECTION("balanced labels with a constant predictor") {
    // Positive class: tp=2 fp=2 fn=0 -> F1 = 2/3; negative class F1 = 0.
    const double got = weighted_f1({true, true, true, true}, {true, true, false, false});
    CHECK(got == Catch::Approx(0.5 * (2.0 / 3.0)).epsilon(1e-9));
  }
  SECTION("supports 80/20 with per-class F1 0.75 and 0.5") {
    // tp=150 fn=90 (true class support 240), tn=50 fp=10 (false support 60).
    std::vector<bool> labels, preds;
    auto add = [&](std::size_t n, bool label, bool pred) {
      for (std::size_t i = 0; i < n; ++i) {
        labels.push_back(label);
        preds.push_back(pred);
      }
    };
    add(150, true, true);
    add(90, true, false);
    add(50, false, false);
    add(10, false, true);
    CHECK(weighted_f1(preds, labels) == Catch::Approx(0.70).epsilon(1e-9));
  }
}

TEST_CASE("weighted f1 is symmetric under negating predictions and labels") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<bool> preds, labels;
    const int n = 1 + trial % 40;
    bool has_true = false, has_false = false;
    for (int i = 0; i < n; ++i) {
      preds.push_back(coin(rng) == 1);
      labels.push_back(coin(rng) == 1);
      (labels.back() ? has_true : has_false) = true;
    }
    std::vector<bool> npreds, nlabels;
    for (int i = 0; i < n; ++i) {
      npreds.push_back(!preds[i]);
      nlabels.push_back(!labels[i]);
    }
    CHECK(weighted_f1(preds, labels) ==
          Catch::Approx(weighted_f1(npreds, nlabels)).margin(1e-12));
    (void)has_true;
    (void)has_false;
  }
}

TEST_CASE("length mismatches are rejected") {
  CHECK_THROWS_AS(weighted_f1({true}, {true, false}), LengthMismatchError);
  CHECK_THROWS_AS(weighted_f1({}, {}), LengthMismatchError);
  CHECK_THROWS_AS(confusion({true}, {}), LengthMismatchError);
}

TEST_CASE("confusion counts partition the evaluated set") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<bool> preds, labels;
    const std::size_t n = 1 + trial;
    for (std::size_t i = 0; i < n; ++i) {
      preds.push_back(coin(rng) == 1);
      labels.push_back(coin(rng) == 1);
    }
    CHECK(confusion(preds, labels).total() == n);
  }
}
