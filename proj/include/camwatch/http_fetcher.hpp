#pragma once

#include <chrono>
#include <cstddef>
#include <string>

#include "camwatch/fetch.hpp"

namespace camwatch {

struct HttpOptions {
  std::string user_agent = "camwatch";
  std::chrono::seconds connect_timeout{10};
  std::chrono::seconds read_timeout{20};
  std::size_t max_body_bytes = 32u << 20;
  bool verify_tls = true;
};

// Network retrieval over http(s), with probes for rtsp and rtmp. Clips are
// recorded from multipart MJPEG streams served over http(s); rtsp/rtmp
// recording needs a media stack and fails with a cause. Stateless apart from
// its options, so safe for concurrent use.
class HttpFetcher final : public PageFetcher, public SnapshotRetriever, public CaptureFetcher {
 public:
  explicit HttpFetcher(HttpOptions options = {}) : options_(std::move(options)) {}

  FetchResult fetch(const std::string& url) override;
  FetchResult retrieve(const std::string& url) override;
  bool probe_stream(const std::string& url) override;
  FetchResult fetch_snapshot(const std::string& url) override { return fetch(url); }
  FetchResult fetch_clip(const std::string& url, std::chrono::seconds duration) override;

 private:
  HttpOptions options_;
};

}  // namespace camwatch
