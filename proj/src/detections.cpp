#include "camwatch/detections.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <tuple>

#include <fmt/format.h>

#include "camwatch/error.hpp"

namespace camwatch {
namespace {

bool iequals(std::string_view a, std::string_view b) noexcept {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
           return std::tolower(x) == std::tolower(y);
         });
}

double finite_number(const Json& j, const char* what) {
  if (!j.is_number()) throw SchemaError(fmt::format("{} must be a number", what));
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SchemaError(fmt::format("{} must be finite", what));
  return v;
}

}  // namespace

std::string frame_key(const FrameDetections& frame) {
  if (frame.image_id) return *frame.image_id;
  std::string key = frame.camera_id + "@" + format_rfc3339(frame.captured_at);
  if (frame.source.kind == FrameSource::Kind::Video) key += "#" + std::to_string(frame.source.frame_index);
  return key;
}

FrameDetections frame_from_json(const Json& j, const LoadOptions& options) {
  if (!j.is_object()) throw SchemaError("record is not a JSON object");
  FrameDetections f;
  try {
    f.camera_id = j.at("camera_id").get<std::string>();
    if (f.camera_id.empty()) throw SchemaError("camera_id is empty");
    f.captured_at = parse_rfc3339(j.at("captured_at").get<std::string>());
    f.image_width = j.at("image_width").get<int>();
    f.image_height = j.at("image_height").get<int>();
    if (f.image_width < 1 || f.image_height < 1) throw SchemaError("image dimensions must be positive");
    if (j.contains("image_id")) f.image_id = j.at("image_id").get<std::string>();

    const Json& src = j.at("source");
    const auto kind = src.at("kind").get<std::string>();
    if (kind == "still") {
      f.source.kind = FrameSource::Kind::Still;
    } else if (kind == "video") {
      f.source.kind = FrameSource::Kind::Video;
      if (!src.contains("frame_index")) throw SchemaError("video source without frame_index");
      f.source.frame_index = src.at("frame_index").get<std::int64_t>();
      if (f.source.frame_index < 0) throw SchemaError("frame_index must be non-negative");
    } else {
      throw SchemaError(fmt::format("unknown source kind '{}'", kind));
    }

    const Json& dets = j.at("detections");
    if (!dets.is_array()) throw SchemaError("detections must be an array");
    for (std::size_t k = 0; k < dets.size(); ++k) {
      const Json& d = dets[k];
      Detection det;
      det.class_label = d.at("class").get<std::string>();
      if (d.contains("confidence")) {
        det.confidence = finite_number(d.at("confidence"), "confidence");
        if (det.confidence < 0.0 || det.confidence > 1.0) {
          throw SchemaError(fmt::format("detection {}: confidence {} outside [0,1]", k, det.confidence));
        }
      } else if (options.require_confidence) {
        throw SchemaError(fmt::format("detection {}: missing confidence", k));
      }
      const Json& box = d.at("box");
      if (!box.is_array() || box.size() != 4) throw SchemaError(fmt::format("detection {}: box must have 4 numbers", k));
      det.box = {finite_number(box[0], "box"), finite_number(box[1], "box"), finite_number(box[2], "box"),
                 finite_number(box[3], "box")};
      const auto& b = det.box;
      if (!(b.x_max > b.x_min) || !(b.y_max > b.y_min)) {
        throw SchemaError(fmt::format("detection {}: box has non-positive area", k));
      }
      if (b.x_min < 0 || b.y_min < 0 || b.x_max > f.image_width || b.y_max > f.image_height) {
        throw SchemaError(fmt::format("detection {}: box outside {}x{} image", k, f.image_width, f.image_height));
      }
      f.detections.push_back(std::move(det));
    }
  } catch (const Json::exception& e) {
    throw SchemaError(e.what());
  } catch (const InvalidInput& e) {
    throw SchemaError(e.what());
  }
  return f;
}

Json to_json(const FrameDetections& f) {
  Json dets = Json::array();
  for (const auto& d : f.detections) {
    dets.push_back({{"class", d.class_label},
                    {"confidence", d.confidence},
                    {"box", {d.box.x_min, d.box.y_min, d.box.x_max, d.box.y_max}}});
  }
  Json source = {{"kind", f.source.kind == FrameSource::Kind::Still ? "still" : "video"}};
  if (f.source.kind == FrameSource::Kind::Video) source["frame_index"] = f.source.frame_index;
  Json j = {{"camera_id", f.camera_id},
            {"captured_at", format_rfc3339(f.captured_at)},
            {"image_width", f.image_width},
            {"image_height", f.image_height},
            {"source", source},
            {"detections", dets}};
  if (f.image_id) j["image_id"] = *f.image_id;
  return j;
}

LoadResult load_detection_file(const std::filesystem::path& path, const LoadOptions& options) {
  LoadResult result;
  for (const auto& line : read_jsonl(path)) {
    std::string problem;
    if (!line.value) {
      problem = fmt::format("malformed JSON: {}", line.parse_error);
    } else {
      try {
        result.frames.push_back(frame_from_json(*line.value, options));
        continue;
      } catch (const SchemaError& e) {
        problem = e.what();
      }
    }
    if (options.strict) throw SchemaError(fmt::format("{}:{}: {}", path.string(), line.line_number, problem));
    result.issues.push_back({line.line_number, problem});
  }
  if (options.strict && result.frames.empty()) {
    throw SchemaError(fmt::format("{}: no valid detection records", path.string()));
  }
  return result;
}

FrameDetections filter_confident(const FrameDetections& frame, double threshold) {
  FrameDetections out = frame;
  out.detections.clear();
  std::copy_if(frame.detections.begin(), frame.detections.end(), std::back_inserter(out.detections),
               [&](const Detection& d) { return d.confidence >= threshold; });
  return out;
}

bool is_person_label(std::string_view label) noexcept { return iequals(label, "person"); }

bool is_vehicle_label(std::string_view label) noexcept {
  return iequals(label, "car") || iequals(label, "truck") || iequals(label, "motorcycle") || iequals(label, "bus");
}

std::size_t count_people(const FrameDetections& frame) noexcept {
  return static_cast<std::size_t>(std::count_if(frame.detections.begin(), frame.detections.end(),
                                                [](const Detection& d) { return is_person_label(d.class_label); }));
}

std::size_t count_vehicles(const FrameDetections& frame) noexcept {
  return static_cast<std::size_t>(std::count_if(frame.detections.begin(), frame.detections.end(),
                                                [](const Detection& d) { return is_vehicle_label(d.class_label); }));
}

FrameDetections persons_only(const FrameDetections& frame) {
  FrameDetections out = frame;
  out.detections.clear();
  std::copy_if(frame.detections.begin(), frame.detections.end(), std::back_inserter(out.detections),
               [](const Detection& d) { return is_person_label(d.class_label); });
  return out;
}

SceneAssignment assign_scene(const std::string& camera_id, std::span<const SceneLabel> labels,
                             const std::set<std::string>& vehicle_scenes, const std::set<std::string>& people_scenes) {
  if (labels.size() != 5) throw InvalidInput(fmt::format("scene assignment takes 5 labels, got {}", labels.size()));
  SceneAssignment a;
  a.camera_id = camera_id;
  std::copy(labels.begin(), labels.end(), a.labels.begin());

  struct Tally {
    int count = 0;
    double best_confidence = -1.0;
  };
  std::map<std::string, Tally> tally;
  for (const auto& l : labels) {
    auto& t = tally[l.scene];
    ++t.count;
    t.best_confidence = std::max(t.best_confidence, l.confidence);
    if (vehicle_scenes.count(l.scene)) a.vehicles = true;
    if (people_scenes.count(l.scene)) a.people = true;
  }
  // std::map iterates labels in order, so exact ties keep the smallest label.
  const Tally* best = nullptr;
  for (const auto& [scene, t] : tally) {
    if (!best || t.count > best->count || (t.count == best->count && t.best_confidence > best->best_confidence)) {
      best = &t;
      a.primary_scene = scene;
    }
  }
  return a;
}

std::vector<SceneRecord> load_scene_file(const std::filesystem::path& path, std::vector<LoadIssue>* issues) {
  std::vector<SceneRecord> out;
  auto report = [&](std::size_t line, std::string msg) {
    if (issues) issues->push_back({line, std::move(msg)});
  };
  for (const auto& line : read_jsonl(path)) {
    if (!line.value) {
      report(line.line_number, fmt::format("malformed JSON: {}", line.parse_error));
      continue;
    }
    try {
      SceneRecord r;
      r.camera_id = line.value->at("camera_id").get<std::string>();
      for (const auto& l : line.value->at("labels")) {
        r.labels.push_back({l.at("scene").get<std::string>(), l.at("confidence").get<double>()});
      }
      if (r.labels.size() != 5) {
        report(line.line_number, fmt::format("expected 5 labels, got {}", r.labels.size()));
        continue;
      }
      out.push_back(std::move(r));
    } catch (const Json::exception& e) {
      report(line.line_number, e.what());
    }
  }
  return out;
}

Json to_json(const SceneAssignment& a) {
  Json labels = Json::array();
  for (const auto& l : a.labels) labels.push_back({{"scene", l.scene}, {"confidence", l.confidence}});
  Json tasks = Json::array();
  if (a.people) tasks.push_back("People");
  if (a.vehicles) tasks.push_back("Vehicles");
  return {{"camera_id", a.camera_id}, {"labels", labels}, {"primary_scene", a.primary_scene}, {"tasks", tasks}};
}

std::vector<std::int64_t> sample_video_frames(std::int64_t total_frames, std::int64_t stride) {
  if (total_frames < 1) throw InvalidInput("total_frames must be positive");
  if (stride < 1) throw InvalidInput("stride must be positive");
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>((total_frames + stride - 1) / stride));
  for (std::int64_t i = 0; i < total_frames; i += stride) out.push_back(i);
  return out;
}

std::size_t clip_person_count(std::span<const FrameDetections> frames) noexcept {
  std::size_t best = 0;
  for (const auto& f : frames) best = std::max(best, count_people(f));
  return best;
}

std::size_t clip_vehicle_count(std::span<const FrameDetections> frames) noexcept {
  std::size_t best = 0;
  for (const auto& f : frames) best = std::max(best, count_vehicles(f));
  return best;
}

std::vector<Observation> reduce_observations(std::span<const FrameDetections> frames, double threshold) {
  std::vector<Observation> out;
  std::map<std::pair<std::string, Timestamp>, std::vector<FrameDetections>> clips;
  for (const auto& raw : frames) {
    FrameDetections f = filter_confident(raw, threshold);
    if (f.source.kind == FrameSource::Kind::Video) {
      clips[{f.camera_id, f.captured_at}].push_back(std::move(f));
      continue;
    }
    out.push_back({f.camera_id, f.captured_at, count_people(f), count_vehicles(f), false, 1});
  }
  for (const auto& [key, clip] : clips) {
    out.push_back({key.first, key.second, clip_person_count(clip), clip_vehicle_count(clip), true, clip.size()});
  }
  std::stable_sort(out.begin(), out.end(), [](const Observation& a, const Observation& b) {
    return std::tie(a.camera_id, a.captured_at, a.clip) < std::tie(b.camera_id, b.captured_at, b.clip);
  });
  return out;
}

Json to_json(const Observation& o) {
  return {{"camera_id", o.camera_id}, {"captured_at", format_rfc3339(o.captured_at)},
          {"people", o.people},       {"vehicles", o.vehicles},
          {"source", o.clip ? "clip" : "still"}, {"frames", o.frames}};
}

Observation observation_from_json(const Json& j) {
  try {
    Observation o;
    o.camera_id = j.at("camera_id").get<std::string>();
    o.captured_at = parse_rfc3339(j.at("captured_at").get<std::string>());
    o.people = j.at("people").get<std::size_t>();
    o.vehicles = j.at("vehicles").get<std::size_t>();
    o.clip = j.value("source", "still") == "clip";
    o.frames = j.value("frames", std::size_t{1});
    return o;
  } catch (const Json::exception& e) {
    throw SchemaError(fmt::format("observation: {}", e.what()));
  } catch (const InvalidInput& e) {
    throw SchemaError(e.what());
  }
}

}  // namespace camwatch
