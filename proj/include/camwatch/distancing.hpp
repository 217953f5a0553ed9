#pragma once

#include <optional>
#include <string>
#include <vector>

#include "camwatch/detections.hpp"
#include "camwatch/jsonl.hpp"

namespace camwatch {

// Every person is assumed to be assumed_height_ft tall; a pair is flagged
// when its score exceeds violation_threshold, which defaults to
// distance_ft / assumed_height_ft.
struct DistancingConfig {
  double assumed_height_ft = 5.4;
  double distance_ft = 6.0;
  double violation_threshold = 6.0 / 5.4;

  // Throws InvalidInput unless all three values are positive and finite.
  static DistancingConfig make(double assumed_height_ft = 5.4, double distance_ft = 6.0,
                               std::optional<double> violation_threshold = std::nullopt);
};

struct PairScore {
  std::size_t index_a = 0;
  std::size_t index_b = 1;
  double depth_similarity = 0;           // smaller area / larger area
  double pixel_distance = 0;             // between box centers
  double inverse_relative_distance = 0;  // mean box height / pixel_distance; +inf when centers coincide
  double score = 0;
  bool violation = false;
};

// min(area) / max(area). Throws InvalidBox for a box without positive area.
double depth_similarity(const BoundingBox& a, const BoundingBox& b);

// score = (mean height / center distance) * depth similarity, flagged when
// strictly above the threshold. Coincident centers are always flagged, with
// score set to image_height.
PairScore pair_score(const BoundingBox& a, const BoundingBox& b, const DistancingConfig& config, double image_height,
                     std::size_t index_a = 0, std::size_t index_b = 1);

struct GroupBounds {
  std::size_t lower = 0;
  std::size_t upper = 0;

  friend bool operator==(const GroupBounds&, const GroupBounds&) = default;
};

struct ViolationReport {
  std::string camera_id;
  Timestamp captured_at{};
  std::string image_id;
  std::size_t person_count = 0;
  std::vector<PairScore> pairs;
  std::size_t violating_pairs = 0;
  std::size_t violating_people = 0;
  std::optional<GroupBounds> groups;
};

// Scores all n(n-1)/2 pairs of the frame's detections, which are taken to be
// people.
ViolationReport violation_report(const FrameDetections& frame, const DistancingConfig& config = {});

Json to_json(const ViolationReport& report);
// Throws SchemaError.
ViolationReport violation_report_from_json(const Json& j);

// Standalone SVG of the frame: boxes in violating pairs red, the rest green,
// with a line joining each violating pair.
std::string violation_overlay_svg(const FrameDetections& frame, const ViolationReport& report);

}  // namespace camwatch
