#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "camwatch/camera.hpp"
#include "camwatch/fetch.hpp"
#include "camwatch/jsonl.hpp"
#include "camwatch/time.hpp"

namespace camwatch {

enum class CaptureKind { Still, Clip };

inline constexpr std::chrono::seconds kDefaultClipDuration{60};

struct CaptureJob {
  std::string camera_id;
  std::string url;
  Timestamp scheduled_at{};
  CaptureKind kind = CaptureKind::Still;
  std::chrono::seconds clip_duration{0};  // Clip jobs only

  friend bool operator==(const CaptureJob&, const CaptureJob&) = default;
};

// captures_per_day equal windows per camera, each job at a seeded uniform
// offset inside its window. Sorted by (scheduled_at, camera_id). A camera's
// jobs depend only on (seed, camera_id, day). Throws InvalidInput for
// captures_per_day < 1.
std::vector<CaptureJob> build_daily_schedule(const std::vector<CameraDescriptor>& cameras, int captures_per_day,
                                             Date day, std::uint64_t seed);

enum class CaptureOutcome { Succeeded, Failed, Skipped };

struct ArchiveRecord {
  CaptureJob job;
  CaptureOutcome outcome = CaptureOutcome::Failed;
  std::filesystem::path path;  // empty unless Succeeded/Skipped
  std::uintmax_t bytes = 0;
  std::string cause;
};

// "<camera_id>/<YYYY-MM-DD>" relative to the archive root.
std::filesystem::path archive_directory(const std::filesystem::path& root, const std::string& camera_id, Date day);

// Extension for stored media: content type first, then the URL path, then
// magic bytes; "mp4" for clips unless the fetcher reports something else.
std::string media_extension(const CaptureJob& job, const FetchResult& fetched);

// Fetches and stores one capture at <root>/<camera_id>/<date>/<HHMMSS>.<ext>,
// adding "-1", "-2", ... before the extension when the name is taken. The
// bytes go to a temporary name first and are renamed into place. Fetch
// failures are returned as Failed records; a storage failure throws
// ArchiveError.
ArchiveRecord execute_job(const CaptureJob& job, CaptureFetcher& fetcher, const std::filesystem::path& root);

struct ArchiverSummary {
  std::size_t attempted = 0;
  std::size_t succeeded = 0;
  std::size_t failed = 0;
  std::size_t skipped = 0;  // already present in the archive
  std::vector<ArchiveRecord> records;  // schedule order
};

struct ArchiverOptions {
  std::size_t parallelism = 4;
  // Only jobs with scheduled_at <= now() run; unset runs everything.
  std::function<Timestamp()> now;
};

// Runs the due jobs on a bounded pool with at most one in-flight fetch per
// camera. Jobs whose archive slot already exists are skipped, so re-running a
// completed schedule fetches nothing.
ArchiverSummary run_archiver(const std::vector<CaptureJob>& schedule, CaptureFetcher& fetcher,
                             const std::filesystem::path& root, const ArchiverOptions& options = {});

// Archived media of one camera in chronological (date dir, file name) order.
std::vector<std::filesystem::path> list_camera_archive(const std::filesystem::path& root, const std::string& camera_id);

Json to_json(const CaptureJob& job);
CaptureJob job_from_json(const Json& j);
Json to_json(const ArchiveRecord& record);
const char* to_string(CaptureOutcome outcome) noexcept;

}  // namespace camwatch
