#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "camwatch/jsonl.hpp"
#include "camwatch/time.hpp"

namespace camwatch {

// Pixel coordinates, origin top-left.
struct BoundingBox {
  double x_min = 0, y_min = 0, x_max = 0, y_max = 0;

  double width() const noexcept { return x_max - x_min; }
  double height() const noexcept { return y_max - y_min; }
  double area() const noexcept { return width() * height(); }
  double center_x() const noexcept { return 0.5 * (x_min + x_max); }
  double center_y() const noexcept { return 0.5 * (y_min + y_max); }
  bool has_positive_area() const noexcept { return x_max > x_min && y_max > y_min; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct Detection {
  BoundingBox box;
  std::string class_label;
  double confidence = 1.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct FrameSource {
  enum class Kind { Still, Video };
  Kind kind = Kind::Still;
  std::int64_t frame_index = 0;  // Video only

  friend bool operator==(const FrameSource&, const FrameSource&) = default;
};

struct FrameDetections {
  std::string camera_id;
  Timestamp captured_at{};
  int image_width = 0;
  int image_height = 0;
  std::vector<Detection> detections;
  FrameSource source;
  std::optional<std::string> image_id;  // explicit join key, else derived

  friend bool operator==(const FrameDetections&, const FrameDetections&) = default;
};

// Explicit image_id when present, else "<camera_id>@<captured_at>" with
// "#<frame_index>" appended for video frames.
std::string frame_key(const FrameDetections& frame);

struct LoadIssue {
  std::size_t line = 0;
  std::string message;
};

struct LoadOptions {
  bool strict = false;
  // Truth files omit confidences; they load as 1.0.
  bool require_confidence = true;
};

struct LoadResult {
  std::vector<FrameDetections> frames;
  std::vector<LoadIssue> issues;
};

// Validates a detection record; throws SchemaError describing the first
// violation.
FrameDetections frame_from_json(const Json& j, const LoadOptions& options = {});
Json to_json(const FrameDetections& frame);

// Invalid records are reported with line numbers and skipped; in strict mode
// the first one throws SchemaError, as does a file with no valid record.
// Throws IoError if the file cannot be read.
LoadResult load_detection_file(const std::filesystem::path& path, const LoadOptions& options = {});

inline constexpr double kDefaultConfidenceThreshold = 0.3;

// Keeps detections with confidence >= threshold, in order.
FrameDetections filter_confident(const FrameDetections& frame, double threshold = kDefaultConfidenceThreshold);

bool is_person_label(std::string_view label) noexcept;
bool is_vehicle_label(std::string_view label) noexcept;  // car, truck, motorcycle, bus
std::size_t count_people(const FrameDetections& frame) noexcept;
std::size_t count_vehicles(const FrameDetections& frame) noexcept;
FrameDetections persons_only(const FrameDetections& frame);

enum class Task : unsigned { People = 1, Vehicles = 2 };

struct SceneLabel {
  std::string scene;
  double confidence = 0.0;

  friend bool operator==(const SceneLabel&, const SceneLabel&) = default;
};

struct SceneAssignment {
  std::string camera_id;
  std::array<SceneLabel, 5> labels;
  std::string primary_scene;
  bool people = false;
  bool vehicles = false;

  bool has(Task t) const noexcept { return t == Task::People ? people : vehicles; }
};

inline const std::set<std::string> kDefaultVehicleScenes = {"highway", "road"};

// Mode of the five labels; tied modes are broken by the highest single
// confidence among their members, then by label order. Throws InvalidInput
// unless exactly five labels are given.
SceneAssignment assign_scene(const std::string& camera_id, std::span<const SceneLabel> labels,
                             const std::set<std::string>& vehicle_scenes, const std::set<std::string>& people_scenes);

struct SceneRecord {
  std::string camera_id;
  std::vector<SceneLabel> labels;
};

// Scene file rows; records with a label count other than five are reported
// as issues and skipped.
std::vector<SceneRecord> load_scene_file(const std::filesystem::path& path, std::vector<LoadIssue>* issues = nullptr);
Json to_json(const SceneAssignment& a);

inline constexpr std::int64_t kDefaultFrameStride = 30;

// 0, stride, 2*stride, ... below total_frames. Throws InvalidInput for
// non-positive arguments.
std::vector<std::int64_t> sample_video_frames(std::int64_t total_frames, std::int64_t stride = kDefaultFrameStride);

// Maximum per-frame person count over the clip, 0 for no frames.
std::size_t clip_person_count(std::span<const FrameDetections> frames) noexcept;
std::size_t clip_vehicle_count(std::span<const FrameDetections> frames) noexcept;

// One count per still image or per video clip. Clips are the video frames
// sharing (camera_id, captured_at).
struct Observation {
  std::string camera_id;
  Timestamp captured_at{};
  std::size_t people = 0;
  std::size_t vehicles = 0;
  bool clip = false;
  std::size_t frames = 1;

  friend bool operator==(const Observation&, const Observation&) = default;
};

// Applies the confidence filter and reduces clips; output sorted by
// (camera_id, captured_at).
std::vector<Observation> reduce_observations(std::span<const FrameDetections> frames,
                                             double threshold = kDefaultConfidenceThreshold);
Json to_json(const Observation& o);
Observation observation_from_json(const Json& j);

}  // namespace camwatch
