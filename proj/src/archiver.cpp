#include "camwatch/archiver.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <thread>

#include <fmt/format.h>

#include "camwatch/error.hpp"
#include "camwatch/image.hpp"
#include "camwatch/url.hpp"

namespace camwatch {

namespace fs = std::filesystem;

namespace {

// FNV-1a, used to derive an independent stream per camera from one seed.
std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string stem_for(const std::string& hms, std::size_t ordinal) {
  return ordinal == 0 ? hms : fmt::format("{}-{}", hms, ordinal);
}

// Files in dir whose stem is hms or hms-<k>.
std::set<std::string> taken_stems(const fs::path& dir, const std::string& hms) {
  std::set<std::string> stems;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return stems;
  for (const auto& e : fs::directory_iterator(dir, ec)) {
    if (!e.is_regular_file()) continue;
    const std::string name = e.path().filename().string();
    if (name.empty() || name[0] == '.') continue;
    const std::string stem = e.path().stem().string();
    if (stem == hms || stem.rfind(hms + "-", 0) == 0) stems.insert(stem);
  }
  return stems;
}

}  // namespace

std::vector<CaptureJob> build_daily_schedule(const std::vector<CameraDescriptor>& cameras, int captures_per_day,
                                             Date day, std::uint64_t seed) {
  if (captures_per_day < 1) throw InvalidInput("captures_per_day must be at least 1");
  constexpr std::int64_t kDay = 86400;
  std::vector<CaptureJob> jobs;
  jobs.reserve(cameras.size() * static_cast<std::size_t>(captures_per_day));
  for (const auto& cam : cameras) {
    std::mt19937_64 rng(seed ^ fnv1a(cam.camera_id));
    for (int w = 0; w < captures_per_day; ++w) {
      const std::int64_t begin = kDay * w / captures_per_day;
      const std::int64_t end = kDay * (w + 1) / captures_per_day;  // exclusive
      std::uniform_int_distribution<std::int64_t> offset(begin, end - 1);
      CaptureJob job;
      job.camera_id = cam.camera_id;
      job.url = cam.url;
      job.scheduled_at = Timestamp{day} + std::chrono::seconds{offset(rng)};
      if (cam.kind == MediaKind::Video) {
        job.kind = CaptureKind::Clip;
        job.clip_duration = kDefaultClipDuration;
      }
      jobs.push_back(std::move(job));
    }
  }
  std::stable_sort(jobs.begin(), jobs.end(), [](const CaptureJob& a, const CaptureJob& b) {
    return std::tie(a.scheduled_at, a.camera_id) < std::tie(b.scheduled_at, b.camera_id);
  });
  return jobs;
}

fs::path archive_directory(const fs::path& root, const std::string& camera_id, Date day) {
  return root / camera_id / format_date(day);
}

std::string media_extension(const CaptureJob& job, const FetchResult& fetched) {
  const std::string ct = lower(fetched.content_type.substr(0, fetched.content_type.find(';')));
  if (ct == "image/jpeg" || ct == "image/jpg" || ct == "image/pjpeg") return "jpg";
  if (ct == "image/png") return "png";
  if (ct == "video/mp4") return "mp4";
  if (ct.rfind("multipart/x-mixed-replace", 0) == 0) return "mjpg";
  if (job.kind == CaptureKind::Clip) return "mp4";
  if (const auto url = parse_url(job.url)) {
    const std::string path = lower(url->path);
    auto ends = [&](std::string_view s) { return path.size() >= s.size() && path.compare(path.size() - s.size(), s.size(), s) == 0; };
    if (ends(".jpg") || ends(".jpeg")) return "jpg";
    if (ends(".png")) return "png";
  }
  switch (sniff_image_format(fetched.body)) {
    case ImageFormat::Png:
      return "png";
    case ImageFormat::Jpeg:
      return "jpg";
    case ImageFormat::Unknown:
      break;
  }
  return "jpg";
}

ArchiveRecord execute_job(const CaptureJob& job, CaptureFetcher& fetcher, const fs::path& root) {
  ArchiveRecord record;
  record.job = job;
  if (job.kind == CaptureKind::Clip && job.clip_duration.count() <= 0) {
    record.cause = "clip job without a positive duration";
    return record;
  }
  FetchResult fetched =
      job.kind == CaptureKind::Clip ? fetcher.fetch_clip(job.url, job.clip_duration) : fetcher.fetch_snapshot(job.url);
  if (!fetched.ok || fetched.body.empty()) {
    record.cause = !fetched.ok ? (fetched.error.empty() ? fmt::format("HTTP {}", fetched.status) : fetched.error)
                               : "empty body";
    return record;
  }

  const fs::path dir = archive_directory(root, job.camera_id, date_of(job.scheduled_at));
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ArchiveError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));

  const std::string ext = media_extension(job, fetched);
  const std::string hms = format_hms(job.scheduled_at);
  const auto taken = taken_stems(dir, hms);
  std::size_t ordinal = 0;
  while (taken.count(stem_for(hms, ordinal))) ++ordinal;
  const fs::path final_path = dir / (stem_for(hms, ordinal) + "." + ext);
  const fs::path temp_path =
      dir / fmt::format(".{}.{}.tmp{}", stem_for(hms, ordinal), ext, std::hash<std::thread::id>{}(std::this_thread::get_id()));

  {
    std::ofstream out(temp_path, std::ios::binary | std::ios::trunc);
    if (!out) throw ArchiveError(fmt::format("cannot open '{}' for writing", temp_path.string()));
    out.write(reinterpret_cast<const char*>(fetched.body.data()), static_cast<std::streamsize>(fetched.body.size()));
    out.flush();
    if (!out) {
      out.close();
      fs::remove(temp_path, ec);
      throw ArchiveError(fmt::format("write failed for '{}' (disk full?)", temp_path.string()));
    }
  }
  fs::rename(temp_path, final_path, ec);
  if (ec) {
    fs::remove(temp_path, ec);
    throw ArchiveError(fmt::format("cannot move capture into '{}'", final_path.string()));
  }
  record.outcome = CaptureOutcome::Succeeded;
  record.path = final_path;
  record.bytes = fetched.body.size();
  return record;
}

ArchiverSummary run_archiver(const std::vector<CaptureJob>& schedule, CaptureFetcher& fetcher, const fs::path& root,
                             const ArchiverOptions& options) {
  if (options.parallelism < 1) throw InvalidInput("parallelism must be at least 1");
  ArchiverSummary summary;

  // Jobs sharing (camera, second) take the collision suffixes in schedule
  // order; the k-th such job is complete once k+1 files of that second exist.
  std::vector<std::size_t> due;
  std::map<std::pair<std::string, Timestamp>, std::size_t> ordinal_counter;
  std::vector<std::size_t> ordinals(schedule.size(), 0);
  const std::optional<Timestamp> cutoff = options.now ? std::optional(options.now()) : std::nullopt;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (cutoff && schedule[i].scheduled_at > *cutoff) continue;
    ordinals[i] = ordinal_counter[{schedule[i].camera_id, schedule[i].scheduled_at}]++;
    due.push_back(i);
  }

  std::vector<std::optional<ArchiveRecord>> records(schedule.size());
  std::vector<std::size_t> pending;
  for (std::size_t i : due) {
    const auto& job = schedule[i];
    const fs::path dir = archive_directory(root, job.camera_id, date_of(job.scheduled_at));
    const std::string hms = format_hms(job.scheduled_at);
    const auto taken = taken_stems(dir, hms);
    if (taken.size() > ordinals[i]) {
      ArchiveRecord r;
      r.job = job;
      r.outcome = CaptureOutcome::Skipped;
      r.path = dir / stem_for(hms, ordinals[i]);
      records[i] = std::move(r);
    } else {
      pending.push_back(i);
    }
  }

  std::mutex mu;
  std::condition_variable cv;
  std::set<std::string> busy;
  std::vector<bool> claimed(pending.size(), false);
  std::size_t remaining = pending.size();
  std::exception_ptr fatal;

  // Claims the earliest pending job whose camera has nothing in flight.
  auto worker = [&] {
    while (true) {
      std::size_t slot = 0;
      {
        std::unique_lock lock(mu);
        bool found = false;
        cv.wait(lock, [&] {
          if (remaining == 0 || fatal) return true;
          for (std::size_t k = 0; k < pending.size(); ++k) {
            if (!claimed[k] && !busy.count(schedule[pending[k]].camera_id)) {
              slot = k;
              found = true;
              return true;
            }
          }
          return false;
        });
        if (!found) return;
        claimed[slot] = true;
        busy.insert(schedule[pending[slot]].camera_id);
      }
      const std::size_t i = pending[slot];
      std::optional<ArchiveRecord> rec;
      std::exception_ptr error;
      try {
        rec = execute_job(schedule[i], fetcher, root);
      } catch (...) {
        error = std::current_exception();
      }
      {
        std::lock_guard lock(mu);
        busy.erase(schedule[i].camera_id);
        --remaining;
        if (error && !fatal) fatal = error;
        if (rec) records[i] = std::move(rec);
      }
      cv.notify_all();
    }
  };

  {
    const std::size_t n = std::min(options.parallelism, std::max<std::size_t>(pending.size(), 1));
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n; ++w) pool.emplace_back(worker);
  }
  if (fatal) std::rethrow_exception(fatal);

  for (std::size_t i : due) {
    auto& r = *records[i];
    switch (r.outcome) {
      case CaptureOutcome::Succeeded:
        ++summary.attempted;
        ++summary.succeeded;
        break;
      case CaptureOutcome::Failed:
        ++summary.attempted;
        ++summary.failed;
        break;
      case CaptureOutcome::Skipped:
        ++summary.skipped;
        break;
    }
    summary.records.push_back(std::move(r));
  }
  return summary;
}

std::vector<fs::path> list_camera_archive(const fs::path& root, const std::string& camera_id) {
  std::vector<fs::path> files;
  const fs::path cam_dir = root / camera_id;
  std::error_code ec;
  if (!fs::is_directory(cam_dir, ec)) return files;
  for (const auto& e : fs::recursive_directory_iterator(cam_dir, ec)) {
    if (!e.is_regular_file()) continue;
    const std::string name = e.path().filename().string();
    if (name.empty() || name[0] == '.') continue;
    files.push_back(e.path());
  }
  // Date directories and HHMMSS names both sort lexicographically in time
  // order; the numeric suffix is compared as a number.
  auto key = [](const fs::path& p) {
    const std::string stem = p.stem().string();
    const auto dash = stem.find('-');
    const std::string hms = stem.substr(0, dash);
    const long suffix = dash == std::string::npos ? 0 : std::strtol(stem.c_str() + dash + 1, nullptr, 10);
    return std::make_tuple(p.parent_path().filename().string(), hms, suffix, p.filename().string());
  };
  std::sort(files.begin(), files.end(), [&](const fs::path& a, const fs::path& b) { return key(a) < key(b); });
  return files;
}

const char* to_string(CaptureOutcome outcome) noexcept {
  switch (outcome) {
    case CaptureOutcome::Succeeded:
      return "Succeeded";
    case CaptureOutcome::Failed:
      return "Failed";
    case CaptureOutcome::Skipped:
      return "Skipped";
  }
  return "Failed";
}

Json to_json(const CaptureJob& job) {
  Json j = {{"camera_id", job.camera_id},
            {"url", job.url},
            {"scheduled_at", format_rfc3339(job.scheduled_at)},
            {"kind", job.kind == CaptureKind::Still ? "Still" : "Clip"}};
  if (job.kind == CaptureKind::Clip) j["clip_duration"] = job.clip_duration.count();
  return j;
}

CaptureJob job_from_json(const Json& j) {
  try {
    CaptureJob job;
    job.camera_id = j.at("camera_id").get<std::string>();
    job.url = j.at("url").get<std::string>();
    job.scheduled_at = parse_rfc3339(j.at("scheduled_at").get<std::string>());
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "Clip") {
      job.kind = CaptureKind::Clip;
      job.clip_duration = std::chrono::seconds{j.value("clip_duration", kDefaultClipDuration.count())};
      if (job.clip_duration.count() <= 0) throw SchemaError("clip_duration must be positive");
    } else if (kind != "Still") {
      throw SchemaError(fmt::format("unknown capture kind '{}'", kind));
    }
    return job;
  } catch (const Json::exception& e) {
    throw SchemaError(fmt::format("capture job: {}", e.what()));
  }
}

Json to_json(const ArchiveRecord& r) {
  Json j = to_json(r.job);
  j["outcome"] = to_string(r.outcome);
  if (!r.path.empty()) j["path"] = r.path.string();
  j["bytes"] = r.bytes;
  if (!r.cause.empty()) j["cause"] = r.cause;
  return j;
}

}  // namespace camwatch
