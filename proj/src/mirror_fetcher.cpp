#include "camwatch/mirror_fetcher.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include <fmt/format.h>

#include "camwatch/error.hpp"

namespace camwatch {

namespace fs = std::filesystem;

namespace {

std::string content_type_for(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".html" || ext == ".htm") return "text/html";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".png") return "image/png";
  if (ext == ".txt") return "text/plain";
  if (ext == ".mp4") return "video/mp4";
  return "application/octet-stream";
}

std::vector<std::uint8_t> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read '{}'", p.string()));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

MirrorFetcher::MirrorFetcher(std::vector<Mapping> mappings, PageFetcher* page_fallback,
                             SnapshotRetriever* snapshot_fallback, CaptureFetcher* capture_fallback)
    : mappings_(std::move(mappings)),
      page_fallback_(page_fallback),
      snapshot_fallback_(snapshot_fallback),
      capture_fallback_(capture_fallback) {
  // Longest prefix first.
  std::stable_sort(mappings_.begin(), mappings_.end(),
                   [](const Mapping& a, const Mapping& b) { return a.prefix.size() > b.prefix.size(); });
}

MirrorFetcher::Mapping MirrorFetcher::parse_mapping(const std::string& spec) {
  const auto eq = spec.rfind('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
    throw InvalidInput(fmt::format("mirror mapping must be PREFIX=DIR, got '{}'", spec));
  }
  return {spec.substr(0, eq), fs::path(spec.substr(eq + 1))};
}

bool MirrorFetcher::maps(const std::string& url) const {
  return std::any_of(mappings_.begin(), mappings_.end(), [&](const Mapping& m) { return url.starts_with(m.prefix); });
}

FetchResult MirrorFetcher::serve(const std::string& url) {
  const auto m = std::find_if(mappings_.begin(), mappings_.end(), [&](const Mapping& m) { return url.starts_with(m.prefix); });
  std::string rest = url.substr(m->prefix.size());
  rest = rest.substr(0, rest.find_first_of("?#"));
  if (rest.empty() || rest.back() == '/') rest += "index.html";
  while (!rest.empty() && rest.front() == '/') rest.erase(0, 1);
  if (rest.find("..") != std::string::npos) return FetchResult::failure("http status 404", 404);

  const fs::path p = m->dir / rest;
  std::error_code ec;
  fs::path file;
  if (fs::is_directory(p, ec)) {
    std::vector<fs::path> frames;
    for (const auto& e : fs::directory_iterator(p, ec)) {
      if (e.is_regular_file()) frames.push_back(e.path());
    }
    if (frames.empty()) return FetchResult::failure("http status 404", 404);
    std::sort(frames.begin(), frames.end());
    std::lock_guard lock(mutex_);
    const std::size_t k = served_[url]++;
    file = frames[std::min(k, frames.size() - 1)];
  } else if (fs::is_regular_file(p, ec)) {
    std::lock_guard lock(mutex_);
    ++served_[url];
    file = p;
  } else {
    return FetchResult::failure("http status 404", 404);
  }
  FetchResult r;
  r.ok = true;
  r.status = 200;
  r.body = slurp(file);
  // A camera directory is named after the image it serves.
  r.content_type = content_type_for(fs::is_directory(p, ec) ? p : file);
  return r;
}

FetchResult MirrorFetcher::fetch(const std::string& url) {
  if (maps(url)) return serve(url);
  return page_fallback_ ? page_fallback_->fetch(url) : FetchResult::failure("no mirror for url");
}

FetchResult MirrorFetcher::retrieve(const std::string& url) {
  if (maps(url)) return serve(url);
  return snapshot_fallback_ ? snapshot_fallback_->retrieve(url) : FetchResult::failure("no mirror for url");
}

bool MirrorFetcher::probe_stream(const std::string& url) {
  if (maps(url)) return serve(url).ok;
  return snapshot_fallback_ && snapshot_fallback_->probe_stream(url);
}

FetchResult MirrorFetcher::fetch_snapshot(const std::string& url) {
  if (maps(url)) return serve(url);
  return capture_fallback_ ? capture_fallback_->fetch_snapshot(url) : FetchResult::failure("no mirror for url");
}

FetchResult MirrorFetcher::fetch_clip(const std::string& url, std::chrono::seconds duration) {
  if (maps(url)) return serve(url);
  return capture_fallback_ ? capture_fallback_->fetch_clip(url, duration) : FetchResult::failure("no mirror for url");
}

std::size_t MirrorFetcher::request_count(const std::string& url) const {
  std::lock_guard lock(mutex_);
  const auto it = served_.find(url);
  return it == served_.end() ? 0 : it->second;
}

}  // namespace camwatch
