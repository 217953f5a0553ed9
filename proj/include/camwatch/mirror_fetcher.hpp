#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "camwatch/fetch.hpp"

namespace camwatch {

// Serves URLs from local directories, for offline runs and tests.
//
// A URL under a mapped prefix resolves to <dir>/<rest of path>; a trailing
// '/' or empty rest maps to index.html. When that path is a directory it is
// treated as a camera: each request returns the next file in name order,
// repeating the last one once exhausted. A regular file is returned as is.
// Anything else is a 404. URLs outside every prefix go to the fallback, or
// fail when there is none.
class MirrorFetcher final : public PageFetcher, public SnapshotRetriever, public CaptureFetcher {
 public:
  struct Mapping {
    std::string prefix;
    std::filesystem::path dir;
  };

  MirrorFetcher(std::vector<Mapping> mappings, PageFetcher* page_fallback = nullptr,
                SnapshotRetriever* snapshot_fallback = nullptr, CaptureFetcher* capture_fallback = nullptr);

  // "PREFIX=DIR". Throws InvalidInput.
  static Mapping parse_mapping(const std::string& spec);

  FetchResult fetch(const std::string& url) override;
  FetchResult retrieve(const std::string& url) override;
  bool probe_stream(const std::string& url) override;
  FetchResult fetch_snapshot(const std::string& url) override;
  FetchResult fetch_clip(const std::string& url, std::chrono::seconds duration) override;

  // Requests answered so far, per URL.
  std::size_t request_count(const std::string& url) const;

 private:
  bool maps(const std::string& url) const;
  FetchResult serve(const std::string& url);

  std::vector<Mapping> mappings_;
  PageFetcher* page_fallback_;
  SnapshotRetriever* snapshot_fallback_;
  CaptureFetcher* capture_fallback_;
  mutable std::mutex mutex_;
  std::map<std::string, std::size_t> served_;
};

}  // namespace camwatch
