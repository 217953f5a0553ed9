#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>
#include <thread>
#include <utility>
#include <string>
#include <string_view>
#include <vector>

#include "camwatch/camera.hpp"
#include "camwatch/fetch.hpp"
#include "camwatch/identification.hpp"
#include "camwatch/jsonl.hpp"
#include "camwatch/time.hpp"

namespace camwatch {

enum class LinkKind { StillImage, VideoStream };

struct CandidateLink {
  std::string url;
  LinkKind kind = LinkKind::StillImage;
  std::string source_page;
  Timestamp discovered_at{};

  friend bool operator==(const CandidateLink&, const CandidateLink&) = default;
};

struct CrawlBudget {
  std::size_t max_pages = 100;
  std::size_t max_depth = 2;
  std::chrono::milliseconds per_host_delay{1000};
};

struct CrawlOptions {
  std::size_t workers = 4;
  bool respect_robots = true;
  std::string user_agent = "camwatch";
  std::function<Timestamp()> clock = now_utc;  // stamps discovered_at
};

struct FetchFailure {
  std::string url;
  std::string cause;
};

struct CrawlResult {
  std::vector<CandidateLink> candidates;
  std::vector<FetchFailure> failures;
  std::vector<std::string> fetched_pages;  // in traversal order
};

// Candidate camera links in a page, de-duplicated by resolved URL, in order
// of first appearance. Throws InvalidInput if page_url is not absolute.
std::vector<CandidateLink> extract_candidate_links(std::string_view html, std::string_view page_url,
                                                   Timestamp discovered_at = {});

// Resolved http(s) hyperlinks (<a href>, <frame src>, ...) that are not
// themselves candidate media links, de-duplicated, in order of appearance.
std::vector<std::string> extract_page_links(std::string_view html, std::string_view page_url);

// Stream scheme or .mjpg path => VideoStream; .jpg/.jpeg/.png path =>
// StillImage; nullopt otherwise.
std::optional<LinkKind> classify_link(std::string_view absolute_url);

// Breadth-first, level by level, over pages on the seeds' registrable
// domains. Per-host requests are serialized and spaced by per_host_delay.
// Throws CrawlFailed when no seed could be fetched.
CrawlResult crawl(const std::vector<std::string>& seeds, const CrawlBudget& budget, PageFetcher& fetcher,
                  const CrawlOptions& options = {});

// Minimal robots.txt evaluation: groups for "*" or the given agent,
// longest-match Allow/Disallow prefixes.
class RobotsRules {
 public:
  static RobotsRules parse(std::string_view text, std::string_view user_agent);
  bool allowed(std::string_view path) const;

 private:
  std::vector<std::pair<std::string, bool>> rules_;  // (prefix, allow)
};

struct IdentifiedCamera {
  CameraDescriptor descriptor;
  std::optional<LivenessVerdict> verdict;  // still images that were sampled
};

struct IdentifyOptions {
  std::size_t workers = 4;
  // Injected so tests do not wait out the real sample spacing.
  std::function<void(std::chrono::seconds)> sleep = [](std::chrono::seconds s) { std::this_thread::sleep_for(s); };
  std::function<Timestamp()> clock = now_utc;
  // Skip the waits and stamp sample k at clock() + k * spacing, taken once
  // per candidate. For mirrors and reproducible runs.
  bool virtual_time = false;
};

// Samples every still candidate config.samples times and classifies it;
// probes stream candidates for a frame. Never throws per candidate: failures
// become Unreachable descriptors. Output order follows input order.
std::vector<IdentifiedCamera> identify_candidates(const std::vector<CandidateLink>& candidates,
                                                  SnapshotRetriever& retriever, const LivenessConfig& config,
                                                  const IdentifyOptions& options = {});

const char* to_string(LinkKind kind) noexcept;
Json to_json(const CandidateLink& link);
CandidateLink candidate_from_json(const Json& j);
Json verdict_to_json(const CameraDescriptor& camera, const LivenessVerdict& verdict);

}  // namespace camwatch
