#include "camwatch/error.hpp"
#include "camwatch/eval.hpp"
#include "doctest.h"
#include "support/oracles.hpp"
#include "support/synth.hpp"

using namespace camwatch;

TEST_CASE("iou") {
  CHECK(iou({0, 0, 10, 10}, {0, 0, 10, 10}) == 1.0);
  CHECK(iou({0, 0, 10, 10}, {20, 20, 30, 30}) == 0.0);
  CHECK(iou({0, 0, 10, 10}, {5, 0, 15, 10}) == doctest::Approx(1.0 / 3));
  CHECK(iou({0, 0, 10, 10}, {1, 0, 11, 10}) == doctest::Approx(9.0 / 11));
  CHECK_THROWS_AS(iou({0, 0, 0, 10}, {0, 0, 1, 1}), InvalidBox);
}

TEST_CASE("greedy matching") {
  const std::vector<BoundingBox> truth = {{0, 0, 10, 10}, {8, 0, 18, 10}};
  const std::vector<Detection> preds = {{{5, 0, 15, 10}, "person", 0.9},  // overlaps both, takes the better
                                        {{0, 0, 10, 10}, "person", 0.8},
                                        {{0, 0, 10, 10}, "person", 0.7}};
  const auto m = match_frame(preds, truth, 0.3);
  CHECK(m.true_positive == std::vector<bool>{true, true, false});
  CHECK(m.false_negatives == 0);
  const auto strict = match_frame(preds, truth, 0.5);
  CHECK(strict.true_positive == std::vector<bool>{true, true, false});
  CHECK(match_frame({}, truth).false_negatives == 2);
  const std::vector<Detection> unsorted = {{{0, 0, 1, 1}, "p", 0.1}, {{0, 0, 1, 1}, "p", 0.5}};
  CHECK_THROWS_AS(match_frame(unsorted, truth), InvalidInput);
}

TEST_CASE("average precision against the brute-force curve") {
  CHECK(average_precision({}, 0) == 0.0);
  CHECK(average_precision({{0.9, true}}, 1) == 1.0);
  CHECK(average_precision({{0.9, false}, {0.8, true}}, 1) == doctest::Approx(0.5));
  // Tied confidences form one curve point.
  CHECK(average_precision({{0.5, false}, {0.5, true}}, 1) == doctest::Approx(0.5));
  CHECK(average_precision({{0.5, true}, {0.5, false}}, 1) == doctest::Approx(0.5));
  synth::Rng rng(4);
  std::uniform_int_distribution<int> conf(0, 20);
  for (int i = 0; i < 300; ++i) {
    std::vector<std::pair<double, bool>> scored;
    const int n = i % 15;
    std::size_t tps = 0;
    for (int k = 0; k < n; ++k) {
      const bool tp = std::bernoulli_distribution(0.5)(rng);
      tps += tp;
      scored.emplace_back(conf(rng) / 20.0, tp);
    }
    const std::size_t truth = tps + i % 4;
    CHECK(average_precision(scored, truth) == doctest::Approx(oracle::average_precision(scored, truth)).epsilon(1e-12));
  }
}

TEST_CASE("evaluate") {
  FrameDetections p;
  p.image_id = "a";
  p.image_width = p.image_height = 50;
  p.detections = {{{0, 0, 10, 10}, "person", 0.9}, {{20, 20, 30, 30}, "car", 0.8}, {{0, 0, 10, 10}, "dog", 0.8}};
  const std::vector<GroundTruthFrame> truth = {{"a", {{{0, 0, 10, 10}, "person"}, {{40, 40, 50, 50}, "car"}}}};
  const auto r = evaluate({&p, 1}, truth, {"person", "car"});
  CHECK(r.true_positives == 1);
  CHECK(r.false_positives == 1);
  CHECK(r.false_negatives == 1);
  CHECK(r.per_class.at("person").average_precision == 1.0);
  CHECK(r.per_class.at("car").average_precision == 0.0);
  CHECK(r.mean_average_precision == doctest::Approx(0.5));
  CHECK(f1_score(0, 0) == 0.0);
  FrameDetections orphan = p;
  orphan.image_id = "zzz";
  CHECK_THROWS_AS(evaluate({&orphan, 1}, truth, {"person"}), MissingTruth);
  CHECK(to_json(r).contains("mean_average_precision"));
}
