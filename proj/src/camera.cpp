#include "camwatch/camera.hpp"

#include <fmt/format.h>

#include "camwatch/digest.hpp"
#include "camwatch/error.hpp"
#include "camwatch/url.hpp"

namespace camwatch {

std::string camera_id_for(std::string_view url) {
  const auto canonical = canonical_url(url);
  if (!canonical) throw InvalidInput(fmt::format("not an absolute URL: '{}'", url));
  return sha256_hex(*canonical);
}

CameraDescriptor make_descriptor(std::string url, MediaKind kind, CameraStatus status) {
  CameraDescriptor d;
  d.camera_id = camera_id_for(url);
  d.url = std::move(url);
  d.kind = kind;
  d.status = status;
  return d;
}

const char* to_string(MediaKind kind) noexcept { return kind == MediaKind::Still ? "Still" : "Video"; }

const char* to_string(CameraStatus status) noexcept {
  switch (status) {
    case CameraStatus::Live:
      return "Live";
    case CameraStatus::Static:
      return "Static";
    case CameraStatus::Frozen:
      return "Frozen";
    case CameraStatus::Unreachable:
      return "Unreachable";
  }
  return "Unreachable";
}

MediaKind parse_media_kind(std::string_view text) {
  if (text == "Still") return MediaKind::Still;
  if (text == "Video") return MediaKind::Video;
  throw SchemaError(fmt::format("unknown media kind '{}'", text));
}

CameraStatus parse_camera_status(std::string_view text) {
  for (auto s : {CameraStatus::Live, CameraStatus::Static, CameraStatus::Frozen, CameraStatus::Unreachable}) {
    if (text == to_string(s)) return s;
  }
  throw SchemaError(fmt::format("unknown camera status '{}'", text));
}

Json to_json(const CameraDescriptor& c) {
  Json j = {{"camera_id", c.camera_id}, {"url", c.url}, {"kind", to_string(c.kind)}, {"status", to_string(c.status)}};
  if (c.scene) j["scene"] = *c.scene;
  if (c.country) j["country"] = *c.country;
  if (c.city) j["city"] = *c.city;
  if (c.note) j["note"] = *c.note;
  return j;
}

CameraDescriptor camera_from_json(const Json& j) {
  try {
    CameraDescriptor c;
    c.url = j.at("url").get<std::string>();
    c.camera_id = camera_id_for(c.url);
    if (j.contains("camera_id") && j.at("camera_id").get<std::string>() != c.camera_id) {
      throw SchemaError(fmt::format("camera_id does not match url {}", c.url));
    }
    c.kind = parse_media_kind(j.at("kind").get<std::string>());
    c.status = parse_camera_status(j.at("status").get<std::string>());
    if (j.contains("scene")) c.scene = j.at("scene").get<std::string>();
    if (j.contains("country")) c.country = j.at("country").get<std::string>();
    if (j.contains("city")) c.city = j.at("city").get<std::string>();
    if (j.contains("note")) c.note = j.at("note").get<std::string>();
    return c;
  } catch (const Json::exception& e) {
    throw SchemaError(fmt::format("camera descriptor: {}", e.what()));
  } catch (const InvalidInput& e) {
    throw SchemaError(fmt::format("camera descriptor: {}", e.what()));
  }
}

std::vector<CameraDescriptor> read_cameras(const std::filesystem::path& path) {
  std::vector<CameraDescriptor> out;
  for (const auto& line : read_jsonl(path)) {
    if (!line.value) throw SchemaError(fmt::format("{}:{}: {}", path.string(), line.line_number, line.parse_error));
    try {
      out.push_back(camera_from_json(*line.value));
    } catch (const Error& e) {
      throw SchemaError(fmt::format("{}:{}: {}", path.string(), line.line_number, e.what()));
    }
  }
  return out;
}

void write_cameras(const std::filesystem::path& path, const std::vector<CameraDescriptor>& cameras) {
  std::vector<Json> records;
  records.reserve(cameras.size());
  for (const auto& c : cameras) records.push_back(to_json(c));
  write_jsonl(path, records);
}

}  // namespace camwatch
