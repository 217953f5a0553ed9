#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "camwatch/detections.hpp"
#include "camwatch/jsonl.hpp"

namespace camwatch {

struct LabeledBox {
  BoundingBox box;
  std::string class_label;
};

struct GroundTruthFrame {
  std::string image_id;
  std::vector<LabeledBox> boxes;
};

// Truth files share the detection schema; confidences are ignored.
GroundTruthFrame truth_from_frame(const FrameDetections& frame);

// Intersection over union. Throws InvalidBox for a box without positive area.
double iou(const BoundingBox& a, const BoundingBox& b);

struct FrameMatch {
  std::vector<bool> true_positive;  // per prediction, input order
  std::size_t false_negatives = 0;
};

// Greedy one-to-one matching: in the given (descending-confidence) order each
// prediction takes the unmatched truth box of highest IoU if that IoU reaches
// the threshold. Throws InvalidInput if predictions are not sorted.
FrameMatch match_frame(std::span<const Detection> predictions, std::span<const BoundingBox> truth,
                       double iou_threshold = 0.5);

struct ClassEval {
  std::size_t truth_boxes = 0;
  std::size_t predictions = 0;
  std::size_t true_positives = 0;  // at the operating confidence
  std::size_t false_positives = 0;
  double average_precision = 0.0;
};

struct EvalResult {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::map<std::string, ClassEval> per_class;
  double mean_average_precision = 0.0;  // over classes with truth boxes
};

struct EvalOptions {
  double iou_threshold = 0.5;
  double operating_confidence = kDefaultConfidenceThreshold;
};

// 2PR / (P + R), 0 when both are 0.
double f1_score(double precision, double recall) noexcept;

// Area under the all-points interpolated precision/recall curve. Inputs are
// (confidence, is_true_positive) for every prediction of a class; the curve
// has one point per distinct confidence.
double average_precision(std::vector<std::pair<double, bool>> scored, std::size_t truth_boxes);

// Throws MissingTruth when a prediction frame has no truth frame.
EvalResult evaluate(std::span<const FrameDetections> predictions, std::span<const GroundTruthFrame> truth,
                    const std::vector<std::string>& classes, const EvalOptions& options = {});

Json to_json(const EvalResult& r);

}  // namespace camwatch
