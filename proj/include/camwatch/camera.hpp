#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "camwatch/jsonl.hpp"

namespace camwatch {

enum class MediaKind { Still, Video };
enum class CameraStatus { Live, Static, Frozen, Unreachable };

struct CameraDescriptor {
  std::string camera_id;
  std::string url;
  MediaKind kind = MediaKind::Still;
  CameraStatus status = CameraStatus::Unreachable;
  std::optional<std::string> scene;
  std::optional<std::string> country;  // ISO-3166 alpha-2
  std::optional<std::string> city;
  std::optional<std::string> note;     // cause for Unreachable/Static outcomes

  friend bool operator==(const CameraDescriptor&, const CameraDescriptor&) = default;
};

// Hex SHA-256 of the canonical form of url. Throws InvalidInput if the url
// is not absolute.
std::string camera_id_for(std::string_view url);

CameraDescriptor make_descriptor(std::string url, MediaKind kind, CameraStatus status);

const char* to_string(MediaKind kind) noexcept;
const char* to_string(CameraStatus status) noexcept;
MediaKind parse_media_kind(std::string_view text);
CameraStatus parse_camera_status(std::string_view text);

Json to_json(const CameraDescriptor& camera);
// Throws SchemaError.
CameraDescriptor camera_from_json(const Json& j);

std::vector<CameraDescriptor> read_cameras(const std::filesystem::path& path);
void write_cameras(const std::filesystem::path& path, const std::vector<CameraDescriptor>& cameras);

}  // namespace camwatch
