#include "camwatch/eval.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include <fmt/format.h>

#include "camwatch/error.hpp"

namespace camwatch {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

void require_area(const BoundingBox& b) {
  if (!b.has_positive_area()) throw InvalidBox("box has no positive area");
}

}  // namespace

GroundTruthFrame truth_from_frame(const FrameDetections& frame) {
  GroundTruthFrame t;
  t.image_id = frame_key(frame);
  for (const auto& d : frame.detections) t.boxes.push_back({d.box, d.class_label});
  return t;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  require_area(a);
  require_area(b);
  const double iw = std::max(0.0, std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
  const double ih = std::max(0.0, std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
  const double inter = iw * ih;
  return inter / (a.area() + b.area() - inter);
}

FrameMatch match_frame(std::span<const Detection> predictions, std::span<const BoundingBox> truth, double iou_threshold) {
  for (std::size_t i = 1; i < predictions.size(); ++i) {
    if (predictions[i].confidence > predictions[i - 1].confidence) {
      throw InvalidInput("predictions must be sorted by descending confidence");
    }
  }
  FrameMatch m;
  m.true_positive.assign(predictions.size(), false);
  std::vector<bool> taken(truth.size(), false);
  for (std::size_t p = 0; p < predictions.size(); ++p) {
    double best = -1.0;
    std::size_t best_t = truth.size();
    for (std::size_t t = 0; t < truth.size(); ++t) {
      if (taken[t]) continue;
      const double v = iou(predictions[p].box, truth[t]);
      if (v > best) {
        best = v;
        best_t = t;
      }
    }
    if (best_t < truth.size() && best >= iou_threshold) {
      taken[best_t] = true;
      m.true_positive[p] = true;
    }
  }
  m.false_negatives = static_cast<std::size_t>(std::count(taken.begin(), taken.end(), false));
  return m;
}

double f1_score(double precision, double recall) noexcept {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

double average_precision(std::vector<std::pair<double, bool>> scored, std::size_t truth_boxes) {
  if (truth_boxes == 0) return 0.0;
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<double> recall, precision;
  std::size_t tp = 0;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    tp += scored[i].second ? 1 : 0;
    const bool group_end = i + 1 == scored.size() || scored[i + 1].first != scored[i].first;
    if (!group_end) continue;
    recall.push_back(static_cast<double>(tp) / static_cast<double>(truth_boxes));
    precision.push_back(static_cast<double>(tp) / static_cast<double>(i + 1));
  }
  for (std::size_t k = precision.size(); k-- > 1;) precision[k - 1] = std::max(precision[k - 1], precision[k]);
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t k = 0; k < recall.size(); ++k) {
    ap += (recall[k] - prev_recall) * precision[k];
    prev_recall = recall[k];
  }
  return ap;
}

EvalResult evaluate(std::span<const FrameDetections> predictions, std::span<const GroundTruthFrame> truth,
                    const std::vector<std::string>& classes, const EvalOptions& options) {
  std::map<std::string, const GroundTruthFrame*> truth_by_id;
  for (const auto& t : truth) truth_by_id[t.image_id] = &t;
  std::map<std::string, std::vector<const FrameDetections*>> preds_by_id;
  for (const auto& p : predictions) {
    const std::string key = frame_key(p);
    if (!truth_by_id.count(key)) throw MissingTruth(fmt::format("no ground truth for image '{}'", key));
    preds_by_id[key].push_back(&p);
  }

  EvalResult result;
  std::set<std::string> class_set;
  for (const auto& c : classes) class_set.insert(lower(c));
  double ap_sum = 0.0;
  std::size_t ap_classes = 0;

  for (const auto& cls : class_set) {
    ClassEval ce;
    std::vector<std::pair<double, bool>> scored;
    for (const auto& [id, t] : truth_by_id) {
      std::vector<BoundingBox> gt;
      for (const auto& b : t->boxes) {
        if (lower(b.class_label) == cls) gt.push_back(b.box);
      }
      std::vector<Detection> dets;
      if (auto it = preds_by_id.find(id); it != preds_by_id.end()) {
        for (const auto* f : it->second) {
          for (const auto& d : f->detections) {
            if (lower(d.class_label) == cls) dets.push_back(d);
          }
        }
      }
      std::stable_sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) { return a.confidence > b.confidence; });
      const FrameMatch m = match_frame(dets, gt, options.iou_threshold);
      ce.truth_boxes += gt.size();
      ce.predictions += dets.size();
      // Greedy matching visits predictions by confidence, so the flags of the
      // predictions above any cut equal a fresh matching of just those.
      for (std::size_t k = 0; k < dets.size(); ++k) {
        scored.emplace_back(dets[k].confidence, m.true_positive[k]);
        if (dets[k].confidence >= options.operating_confidence) {
          (m.true_positive[k] ? ce.true_positives : ce.false_positives) += 1;
        }
      }
    }
    ce.average_precision = average_precision(std::move(scored), ce.truth_boxes);
    if (ce.truth_boxes > 0) {
      ap_sum += ce.average_precision;
      ++ap_classes;
    }
    result.true_positives += ce.true_positives;
    result.false_positives += ce.false_positives;
    result.false_negatives += ce.truth_boxes - ce.true_positives;
    result.per_class[cls] = ce;
  }

  const double tp = static_cast<double>(result.true_positives);
  result.precision = result.true_positives + result.false_positives > 0 ? tp / (tp + result.false_positives) : 0.0;
  result.recall = result.true_positives + result.false_negatives > 0 ? tp / (tp + result.false_negatives) : 0.0;
  result.f1 = f1_score(result.precision, result.recall);
  result.mean_average_precision = ap_classes > 0 ? ap_sum / static_cast<double>(ap_classes) : 0.0;
  return result;
}

Json to_json(const EvalResult& r) {
  Json per_class = Json::object();
  for (const auto& [cls, ce] : r.per_class) {
    per_class[cls] = {{"truth_boxes", ce.truth_boxes},
                      {"predictions", ce.predictions},
                      {"true_positives", ce.true_positives},
                      {"false_positives", ce.false_positives},
                      {"average_precision", ce.average_precision}};
  }
  return {{"true_positives", r.true_positives},
          {"false_positives", r.false_positives},
          {"false_negatives", r.false_negatives},
          {"precision", r.precision},
          {"recall", r.recall},
          {"f1", r.f1},
          {"per_class", per_class},
          {"mean_average_precision", r.mean_average_precision}};
}

}  // namespace camwatch
