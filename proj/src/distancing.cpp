#include "camwatch/distancing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <fmt/format.h>

#include "camwatch/error.hpp"

namespace camwatch {

DistancingConfig DistancingConfig::make(double assumed_height_ft, double distance_ft,
                                        std::optional<double> violation_threshold) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(assumed_height_ft)) throw InvalidInput("assumed_height_ft must be positive");
  if (!positive(distance_ft)) throw InvalidInput("distance_ft must be positive");
  DistancingConfig c;
  c.assumed_height_ft = assumed_height_ft;
  c.distance_ft = distance_ft;
  c.violation_threshold = violation_threshold.value_or(distance_ft / assumed_height_ft);
  if (!positive(c.violation_threshold)) throw InvalidInput("violation_threshold must be positive");
  return c;
}

namespace {

void require_area(const BoundingBox& b) {
  if (!b.has_positive_area()) {
    throw InvalidBox(fmt::format("box [{}, {}, {}, {}] has no positive area", b.x_min, b.y_min, b.x_max, b.y_max));
  }
}

}  // namespace

double depth_similarity(const BoundingBox& a, const BoundingBox& b) {
  require_area(a);
  require_area(b);
  const double aa = a.area();
  const double ab = b.area();
  return std::min(aa, ab) / std::max(aa, ab);
}

PairScore pair_score(const BoundingBox& a, const BoundingBox& b, const DistancingConfig& config, double image_height,
                     std::size_t index_a, std::size_t index_b) {
  PairScore s;
  s.index_a = index_a;
  s.index_b = index_b;
  s.depth_similarity = depth_similarity(a, b);
  s.pixel_distance = std::hypot(a.center_x() - b.center_x(), a.center_y() - b.center_y());
  const double mean_height = 0.5 * (a.height() + b.height());
  if (s.pixel_distance == 0.0) {
    s.inverse_relative_distance = std::numeric_limits<double>::infinity();
    s.score = image_height;
    s.violation = true;
    return s;
  }
  s.inverse_relative_distance = mean_height / s.pixel_distance;
  s.score = s.inverse_relative_distance * s.depth_similarity;
  s.violation = s.score > config.violation_threshold;
  return s;
}

ViolationReport violation_report(const FrameDetections& frame, const DistancingConfig& config) {
  ViolationReport r;
  r.camera_id = frame.camera_id;
  r.captured_at = frame.captured_at;
  r.image_id = frame_key(frame);
  const auto& dets = frame.detections;
  r.person_count = dets.size();
  std::vector<bool> involved(dets.size(), false);
  for (std::size_t i = 0; i < dets.size(); ++i) {
    for (std::size_t j = i + 1; j < dets.size(); ++j) {
      PairScore s = pair_score(dets[i].box, dets[j].box, config, frame.image_height, i, j);
      if (s.violation) {
        ++r.violating_pairs;
        involved[i] = involved[j] = true;
      }
      r.pairs.push_back(s);
    }
  }
  r.violating_people = static_cast<std::size_t>(std::count(involved.begin(), involved.end(), true));
  return r;
}

Json to_json(const ViolationReport& r) {
  Json pairs = Json::array();
  for (const auto& p : r.pairs) {
    Json ird = std::isfinite(p.inverse_relative_distance) ? Json(p.inverse_relative_distance) : Json(nullptr);
    pairs.push_back({{"a", p.index_a},
                     {"b", p.index_b},
                     {"depth_similarity", p.depth_similarity},
                     {"pixel_distance", p.pixel_distance},
                     {"inverse_relative_distance", ird},
                     {"score", p.score},
                     {"violation", p.violation}});
  }
  Json j = {{"camera_id", r.camera_id},
            {"captured_at", format_rfc3339(r.captured_at)},
            {"image_id", r.image_id},
            {"person_count", r.person_count},
            {"violating_pairs", r.violating_pairs},
            {"violating_people", r.violating_people},
            {"pairs", pairs}};
  if (r.groups) {
    j["group_lower"] = r.groups->lower;
    j["group_upper"] = r.groups->upper;
  }
  return j;
}

ViolationReport violation_report_from_json(const Json& j) {
  try {
    ViolationReport r;
    r.camera_id = j.at("camera_id").get<std::string>();
    r.captured_at = parse_rfc3339(j.at("captured_at").get<std::string>());
    r.image_id = j.value("image_id", "");
    r.person_count = j.at("person_count").get<std::size_t>();
    r.violating_pairs = j.at("violating_pairs").get<std::size_t>();
    r.violating_people = j.at("violating_people").get<std::size_t>();
    for (const auto& p : j.at("pairs")) {
      PairScore s;
      s.index_a = p.at("a").get<std::size_t>();
      s.index_b = p.at("b").get<std::size_t>();
      if (s.index_a >= s.index_b || s.index_b >= r.person_count) throw SchemaError("pair indices out of range");
      s.depth_similarity = p.at("depth_similarity").get<double>();
      s.pixel_distance = p.at("pixel_distance").get<double>();
      const Json& ird = p.at("inverse_relative_distance");
      s.inverse_relative_distance = ird.is_null() ? std::numeric_limits<double>::infinity() : ird.get<double>();
      s.score = p.at("score").get<double>();
      s.violation = p.at("violation").get<bool>();
      r.pairs.push_back(s);
    }
    if (j.contains("group_lower")) r.groups = GroupBounds{j.at("group_lower").get<std::size_t>(), j.at("group_upper").get<std::size_t>()};
    return r;
  } catch (const Json::exception& e) {
    throw SchemaError(fmt::format("violation report: {}", e.what()));
  } catch (const InvalidInput& e) {
    throw SchemaError(e.what());
  }
}

std::string violation_overlay_svg(const FrameDetections& frame, const ViolationReport& report) {
  std::vector<bool> red(frame.detections.size(), false);
  for (const auto& p : report.pairs) {
    if (p.violation && p.index_b < red.size()) red[p.index_a] = red[p.index_b] = true;
  }
  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "<rect width=\"{0}\" height=\"{1}\" fill=\"#202020\"/>\n",
      frame.image_width, frame.image_height);
  for (std::size_t i = 0; i < frame.detections.size(); ++i) {
    const auto& b = frame.detections[i].box;
    svg += fmt::format(
        "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n",
        b.x_min, b.y_min, b.width(), b.height(), red[i] ? "#e02020" : "#20c020");
  }
  for (const auto& p : report.pairs) {
    if (!p.violation || p.index_b >= frame.detections.size()) continue;
    const auto& a = frame.detections[p.index_a].box;
    const auto& b = frame.detections[p.index_b].box;
    svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#e02020\" stroke-width=\"1\"/>\n",
                       a.center_x(), a.center_y(), b.center_x(), b.center_y());
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace camwatch
