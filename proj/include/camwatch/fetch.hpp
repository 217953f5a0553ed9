#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

namespace camwatch {

struct FetchResult {
  bool ok = false;
  int status = 0;  // HTTP status when applicable
  std::vector<std::uint8_t> body;
  std::string content_type;
  std::string error;  // failure cause when !ok

  std::string text() const { return {body.begin(), body.end()}; }

  static FetchResult failure(std::string cause, int status = 0) {
    FetchResult r;
    r.status = status;
    r.error = std::move(cause);
    return r;
  }
};

// Retrieval capabilities. Implementations must be safe to call from several
// threads at once.
class PageFetcher {
 public:
  virtual ~PageFetcher() = default;
  virtual FetchResult fetch(const std::string& url) = 0;
};

class SnapshotRetriever {
 public:
  virtual ~SnapshotRetriever() = default;
  virtual FetchResult retrieve(const std::string& url) = 0;
  // true iff at least one frame could be obtained from the stream.
  virtual bool probe_stream(const std::string& url) = 0;
};

class CaptureFetcher {
 public:
  virtual ~CaptureFetcher() = default;
  virtual FetchResult fetch_snapshot(const std::string& url) = 0;
  virtual FetchResult fetch_clip(const std::string& url, std::chrono::seconds duration) = 0;
};

}  // namespace camwatch
