#include "camwatch/crawler.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <regex>
#include <set>
#include <thread>
#include <unordered_set>

#include <fmt/format.h>

#include "camwatch/digest.hpp"
#include "camwatch/error.hpp"
#include "camwatch/url.hpp"

namespace camwatch {
namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
           return std::tolower(x) == std::tolower(y);
         });
}

bool iends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && iequals(s.substr(s.size() - suffix.size()), suffix);
}

std::string decode_entities(std::string_view s) {
  static const std::pair<std::string_view, char> kEntities[] = {
      {"&amp;", '&'}, {"&quot;", '"'}, {"&#39;", '\''}, {"&apos;", '\''}, {"&lt;", '<'}, {"&gt;", '>'}, {"&#x2F;", '/'}, {"&#47;", '/'}};
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    bool replaced = false;
    if (s[i] == '&') {
      for (const auto& [name, c] : kEntities) {
        if (s.substr(i, name.size()) == name) {
          out.push_back(c);
          i += name.size();
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) out.push_back(s[i++]);
  }
  return out;
}

struct AttributeRef {
  std::size_t position;
  std::string tag;
  std::string name;
  std::string value;
};

// Tolerant tag scanner: collects every attribute of every start tag.
// Comments are skipped; script/style bodies are not scanned for tags.
std::vector<AttributeRef> scan_attributes(std::string_view html) {
  std::vector<AttributeRef> out;
  std::size_t i = 0;
  const std::size_t n = html.size();
  auto lower = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
  };
  while (i < n) {
    const auto lt = html.find('<', i);
    if (lt == std::string_view::npos) break;
    if (html.substr(lt, 4) == "<!--") {
      const auto end = html.find("-->", lt + 4);
      i = end == std::string_view::npos ? n : end + 3;
      continue;
    }
    std::size_t p = lt + 1;
    if (p >= n || !std::isalpha(static_cast<unsigned char>(html[p]))) {
      i = p;
      continue;
    }
    const std::size_t name_start = p;
    while (p < n && (std::isalnum(static_cast<unsigned char>(html[p])) || html[p] == '-')) ++p;
    const std::string tag = lower(std::string(html.substr(name_start, p - name_start)));

    while (p < n && html[p] != '>') {
      while (p < n && (std::isspace(static_cast<unsigned char>(html[p])) || html[p] == '/')) ++p;
      if (p >= n || html[p] == '>' || html[p] == '<') break;
      const std::size_t an = p;
      while (p < n && !std::isspace(static_cast<unsigned char>(html[p])) && html[p] != '=' && html[p] != '>' &&
             html[p] != '/' && html[p] != '<') {
        ++p;
      }
      std::string attr = lower(std::string(html.substr(an, p - an)));
      if (p == an) {
        ++p;
        continue;
      }
      while (p < n && std::isspace(static_cast<unsigned char>(html[p]))) ++p;
      if (p < n && html[p] == '=') {
        ++p;
        while (p < n && std::isspace(static_cast<unsigned char>(html[p]))) ++p;
        std::string value;
        const std::size_t vpos = p;
        if (p < n && (html[p] == '"' || html[p] == '\'')) {
          const char q = html[p++];
          const auto close = html.find(q, p);
          if (close == std::string_view::npos) {
            p = n;  // unterminated quote: drop the fragment
            break;
          }
          value = std::string(html.substr(p, close - p));
          p = close + 1;
        } else {
          const std::size_t vs = p;
          while (p < n && !std::isspace(static_cast<unsigned char>(html[p])) && html[p] != '>') ++p;
          value = std::string(html.substr(vs, p - vs));
        }
        out.push_back({vpos, tag, std::move(attr), decode_entities(value)});
      }
    }
    i = p < n ? p + 1 : n;
    if (tag == "script" || tag == "style") {
      const std::string close = "</" + tag;
      std::size_t k = i;
      while (k < n) {
        const auto c = html.find("</", k);
        if (c == std::string_view::npos) {
          k = n;
          break;
        }
        if (iequals(html.substr(c, close.size()), close)) {
          k = c;
          break;
        }
        k = c + 2;
      }
      i = k;
    }
  }
  return out;
}

std::vector<std::pair<std::size_t, std::string>> scan_raw_stream_urls(std::string_view html) {
  static const std::regex kUrl(R"((?:rtsp|rtmp|https?)://[^\s"'<>()\\,;]+)", std::regex::icase);
  std::vector<std::pair<std::size_t, std::string>> out;
  const std::string text(html);
  for (auto it = std::sregex_iterator(text.begin(), text.end(), kUrl); it != std::sregex_iterator(); ++it) {
    std::string url = decode_entities(it->str());
    if (classify_link(url) == LinkKind::VideoStream) out.emplace_back(static_cast<std::size_t>(it->position()), url);
  }
  return out;
}

bool is_link_attribute(std::string_view name) {
  return name == "href" || name == "src" || name == "data-src" || name == "poster" || name == "data" ||
         name == "content" || name == "value" || name == "data-url";
}

Url parse_page_url(std::string_view page_url) {
  auto base = parse_url(page_url);
  if (!base) throw InvalidInput(fmt::format("page url is not an absolute URL: '{}'", page_url));
  return *base;
}

std::string strip_fragment(Url url) {
  url.fragment.reset();
  return url.to_string();
}

}  // namespace

std::optional<LinkKind> classify_link(std::string_view absolute_url) {
  const auto url = parse_url(absolute_url);
  if (!url) return std::nullopt;
  if (url->scheme == "rtsp" || url->scheme == "rtmp") return LinkKind::VideoStream;
  if (iends_with(url->path, ".mjpg")) return LinkKind::VideoStream;
  if (iends_with(url->path, ".jpg") || iends_with(url->path, ".jpeg") || iends_with(url->path, ".png")) {
    return LinkKind::StillImage;
  }
  return std::nullopt;
}

std::vector<CandidateLink> extract_candidate_links(std::string_view html, std::string_view page_url,
                                                   Timestamp discovered_at) {
  const Url base = parse_page_url(page_url);
  std::vector<std::pair<std::size_t, std::string>> refs;
  for (auto& a : scan_attributes(html)) {
    if (is_link_attribute(a.name)) refs.emplace_back(a.position, std::move(a.value));
    if (a.name == "srcset") {
      // "url 1x, url 2x"
      std::string_view rest = a.value;
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        std::string_view item = rest.substr(0, comma);
        while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front()))) item.remove_prefix(1);
        refs.emplace_back(a.position, std::string(item.substr(0, item.find_first_of(" \t\n"))));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
      }
    }
  }
  for (auto& r : scan_raw_stream_urls(html)) refs.push_back(std::move(r));
  std::stable_sort(refs.begin(), refs.end(), [](const auto& x, const auto& y) { return x.first < y.first; });

  std::vector<CandidateLink> out;
  std::unordered_set<std::string> seen;
  const std::string source = strip_fragment(base);
  for (const auto& [pos, ref] : refs) {
    if (ref.empty()) continue;
    const auto resolved = resolve_url(base, ref);
    if (!resolved) continue;
    const std::string url = strip_fragment(*resolved);
    const auto kind = classify_link(url);
    if (!kind) continue;
    if (!seen.insert(url).second) continue;
    out.push_back({url, *kind, source, discovered_at});
  }
  return out;
}

std::vector<std::string> extract_page_links(std::string_view html, std::string_view page_url) {
  const Url base = parse_page_url(page_url);
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& a : scan_attributes(html)) {
    const bool anchor = (a.tag == "a" || a.tag == "area") && a.name == "href";
    const bool frame = (a.tag == "frame" || a.tag == "iframe") && a.name == "src";
    if (!anchor && !frame) continue;
    const auto resolved = resolve_url(base, a.value);
    if (!resolved || (resolved->scheme != "http" && resolved->scheme != "https")) continue;
    std::string url = strip_fragment(*resolved);
    if (classify_link(url)) continue;
    if (seen.insert(url).second) out.push_back(std::move(url));
  }
  return out;
}

RobotsRules RobotsRules::parse(std::string_view text, std::string_view user_agent) {
  RobotsRules rules;
  bool group_applies = false;
  bool in_agent_block = false;
  std::vector<std::pair<std::string, bool>> star, mine;
  bool saw_mine = false;
  std::vector<std::pair<std::string, bool>>* target = nullptr;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) continue;
    auto trim = [](std::string_view s) {
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
      return s;
    };
    const auto key = trim(line.substr(0, colon));
    const auto value = trim(line.substr(colon + 1));
    if (iequals(key, "user-agent")) {
      if (!in_agent_block) group_applies = false;
      in_agent_block = true;
      if (value == "*") {
        target = &star;
        group_applies = true;
      } else if (iequals(value, user_agent)) {
        target = &mine;
        saw_mine = true;
        group_applies = true;
      } else if (!group_applies) {
        target = nullptr;
      }
    } else {
      in_agent_block = false;
      if (!group_applies || !target) continue;
      if (iequals(key, "disallow")) {
        if (!value.empty()) target->emplace_back(std::string(value), false);
      } else if (iequals(key, "allow")) {
        target->emplace_back(std::string(value), true);
      }
    }
  }
  rules.rules_ = saw_mine ? std::move(mine) : std::move(star);
  return rules;
}

bool RobotsRules::allowed(std::string_view path) const {
  std::size_t best = 0;
  bool allow = true;
  for (const auto& [prefix, is_allow] : rules_) {
    if (path.substr(0, prefix.size()) == prefix && prefix.size() >= best) {
      if (prefix.size() > best || is_allow) allow = is_allow;
      best = prefix.size();
    }
  }
  return allow;
}

namespace {

// Serializes requests per host and enforces the politeness gap between the
// end of one request and the start of the next.
class HostGate {
 public:
  explicit HostGate(std::chrono::milliseconds delay) : delay_(delay) {}

  template <typename F>
  auto run(const std::string& host, F&& f) {
    std::shared_ptr<HostState> state;
    {
      std::lock_guard lock(mu_);
      auto& slot = hosts_[host];
      if (!slot) slot = std::make_shared<HostState>();
      state = slot;
    }
    std::lock_guard host_lock(state->mu);
    if (state->last_end) {
      const auto ready = *state->last_end + delay_;
      std::this_thread::sleep_until(ready);
    }
    auto result = f();
    state->last_end = std::chrono::steady_clock::now();
    return result;
  }

 private:
  struct HostState {
    std::mutex mu;
    std::optional<std::chrono::steady_clock::time_point> last_end;
  };
  std::chrono::milliseconds delay_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<HostState>> hosts_;
};

class RobotsCache {
 public:
  RobotsCache(PageFetcher& fetcher, HostGate& gate, std::string agent)
      : fetcher_(fetcher), gate_(gate), agent_(std::move(agent)) {}

  bool allowed(const Url& url) {
    const std::string origin = url.origin();
    std::shared_ptr<Entry> entry;
    {
      std::lock_guard lock(mu_);
      auto& slot = entries_[origin];
      if (!slot) slot = std::make_shared<Entry>();
      entry = slot;
    }
    std::call_once(entry->once, [&] {
      const FetchResult r = gate_.run(url.host_port(), [&] { return fetcher_.fetch(origin + "/robots.txt"); });
      entry->rules = r.ok ? RobotsRules::parse(r.text(), agent_) : RobotsRules{};
    });
    return entry->rules.allowed(url.path.empty() ? "/" : url.path);
  }

 private:
  struct Entry {
    std::once_flag once;
    RobotsRules rules;
  };
  PageFetcher& fetcher_;
  HostGate& gate_;
  std::string agent_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<Entry>> entries_;
};

struct PageOutcome {
  bool fetched = false;
  FetchResult result;
  std::string skip_cause;
};

template <typename F>
void parallel_for(std::size_t count, std::size_t workers, F&& body) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (std::size_t i = next++; i < count; i = next++) body(i);
  };
  if (workers == 1) {
    loop();
    return;
  }
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(loop);
}

bool looks_like_html(const FetchResult& r) {
  if (r.content_type.empty()) return true;
  return r.content_type.find("html") != std::string::npos || r.content_type.rfind("text/", 0) == 0;
}

}  // namespace

CrawlResult crawl(const std::vector<std::string>& seeds, const CrawlBudget& budget, PageFetcher& fetcher,
                  const CrawlOptions& options) {
  if (seeds.empty()) throw InvalidInput("crawl needs at least one seed");
  if (budget.max_pages < 1) throw InvalidInput("max_pages must be at least 1");
  if (budget.per_host_delay.count() < 0) throw InvalidInput("per_host_delay must be non-negative");

  CrawlResult result;
  std::set<std::string> domains;
  std::unordered_set<std::string> enqueued;
  std::vector<std::string> level;
  std::vector<std::pair<std::string, std::string>> seed_causes;

  for (const auto& seed : seeds) {
    auto url = parse_url(seed);
    if (!url || (url->scheme != "http" && url->scheme != "https")) {
      seed_causes.emplace_back(seed, "not an absolute http(s) URL");
      result.failures.push_back({seed, "not an absolute http(s) URL"});
      continue;
    }
    url->fragment.reset();
    const std::string s = url->to_string();
    domains.insert(registrable_domain(url->host));
    if (enqueued.insert(s).second) level.push_back(s);
  }

  HostGate gate(budget.per_host_delay);
  RobotsCache robots(fetcher, gate, options.user_agent);
  std::unordered_set<std::string> candidate_urls;
  std::size_t depth = 0;
  bool any_seed_ok = false;
  const std::unordered_set<std::string> seed_set(level.begin(), level.end());

  while (!level.empty() && result.fetched_pages.size() < budget.max_pages) {
    const std::size_t remaining = budget.max_pages - result.fetched_pages.size();
    std::vector<PageOutcome> outcomes(level.size());
    std::size_t reserved = 0;

    // Pages are offered in level order; a page consumes budget only when it
    // is actually fetched, so robots-skipped pages do not use up the budget.
    // Fetch admission is serialized to keep the taken set deterministic.
    std::mutex admit_mu;
    std::size_t admit_next = 0;
    std::vector<bool> admitted(level.size(), false);
    std::condition_variable admit_cv;

    parallel_for(level.size(), options.workers, [&](std::size_t i) {
      const auto url = parse_url(level[i]);
      bool allowed = true;
      if (options.respect_robots) allowed = robots.allowed(*url);
      {
        std::unique_lock lock(admit_mu);
        admit_cv.wait(lock, [&] { return admit_next == i; });
        if (allowed && reserved < remaining) {
          admitted[i] = true;
          ++reserved;
        }
        ++admit_next;
        admit_cv.notify_all();
      }
      if (!allowed) {
        outcomes[i].skip_cause = "disallowed by robots.txt";
        return;
      }
      if (!admitted[i]) return;
      outcomes[i].fetched = true;
      outcomes[i].result = gate.run(url->host_port(), [&] { return fetcher.fetch(level[i]); });
    });

    std::vector<std::string> next;
    for (std::size_t i = 0; i < level.size(); ++i) {
      const auto& page = level[i];
      auto& o = outcomes[i];
      if (!o.skip_cause.empty()) {
        result.failures.push_back({page, o.skip_cause});
        if (seed_set.count(page)) seed_causes.emplace_back(page, o.skip_cause);
        continue;
      }
      if (!o.fetched) continue;
      result.fetched_pages.push_back(page);
      if (!o.result.ok) {
        const std::string cause = o.result.error.empty() ? fmt::format("HTTP {}", o.result.status) : o.result.error;
        result.failures.push_back({page, cause});
        if (seed_set.count(page)) seed_causes.emplace_back(page, cause);
        continue;
      }
      if (seed_set.count(page)) any_seed_ok = true;
      if (!looks_like_html(o.result)) continue;
      const std::string body = o.result.text();
      for (auto& c : extract_candidate_links(body, page, options.clock())) {
        if (candidate_urls.insert(c.url).second) result.candidates.push_back(std::move(c));
      }
      if (depth < budget.max_depth) {
        for (auto& link : extract_page_links(body, page)) {
          const auto u = parse_url(link);
          if (!u || !domains.count(registrable_domain(u->host))) continue;
          if (enqueued.insert(link).second) next.push_back(std::move(link));
        }
      }
    }
    level = std::move(next);
    ++depth;
  }

  if (!any_seed_ok) throw CrawlFailed("no seed page could be fetched", seed_causes);
  return result;
}

const char* to_string(LinkKind kind) noexcept { return kind == LinkKind::StillImage ? "StillImage" : "VideoStream"; }

Json to_json(const CandidateLink& link) {
  return {{"url", link.url},
          {"kind", to_string(link.kind)},
          {"source_page", link.source_page},
          {"discovered_at", format_rfc3339(link.discovered_at)}};
}

CandidateLink candidate_from_json(const Json& j) {
  try {
    CandidateLink c;
    c.url = j.at("url").get<std::string>();
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "StillImage") {
      c.kind = LinkKind::StillImage;
    } else if (kind == "VideoStream") {
      c.kind = LinkKind::VideoStream;
    } else {
      throw SchemaError(fmt::format("unknown candidate kind '{}'", kind));
    }
    c.source_page = j.value("source_page", "");
    if (j.contains("discovered_at")) c.discovered_at = parse_rfc3339(j.at("discovered_at").get<std::string>());
    return c;
  } catch (const Json::exception& e) {
    throw SchemaError(fmt::format("candidate link: {}", e.what()));
  }
}

Json verdict_to_json(const CameraDescriptor& camera, const LivenessVerdict& v) {
  Json samples = Json::array();
  for (const auto t : v.sample_times) samples.push_back(format_rfc3339(t));
  return {{"camera_id", camera.camera_id},
          {"url", camera.url},
          {"status", to_string(v.status)},
          {"checksum_changed", v.checksum_changed},
          {"percent_diff", v.percent_diff},
          {"luminance_diff", v.luminance_diff},
          {"checksum", kDigestAlgorithm},
          {"decode_failures", v.decode_failures},
          {"samples", samples}};
}

std::vector<IdentifiedCamera> identify_candidates(const std::vector<CandidateLink>& candidates,
                                                  SnapshotRetriever& retriever, const LivenessConfig& config,
                                                  const IdentifyOptions& options) {
  if (config.samples < 2) throw InvalidInput("liveness sampling needs at least 2 samples");
  std::vector<IdentifiedCamera> out(candidates.size());
  parallel_for(candidates.size(), options.workers, [&](std::size_t i) {
    const CandidateLink& link = candidates[i];
    IdentifiedCamera& cam = out[i];
    if (link.kind == LinkKind::VideoStream) {
      const bool ok = retriever.probe_stream(link.url);
      cam.descriptor = make_descriptor(link.url, MediaKind::Video, ok ? CameraStatus::Live : CameraStatus::Unreachable);
      if (!ok) cam.descriptor.note = "no frame obtainable from stream";
      return;
    }
    std::vector<Retrieval> samples;
    std::string last_cause;
    const Timestamp t0 = options.virtual_time ? options.clock() : Timestamp{};
    for (int k = 0; k < config.samples; ++k) {
      if (k > 0 && config.spacing.count() > 0 && !options.virtual_time) options.sleep(config.spacing);
      FetchResult r = retriever.retrieve(link.url);
      if (r.ok && !r.body.empty()) {
        const Timestamp at = options.virtual_time ? t0 + k * config.spacing : options.clock();
        samples.push_back(make_retrieval(std::move(r.body), at));
      } else {
        last_cause = r.ok ? "empty body" : (r.error.empty() ? fmt::format("HTTP {}", r.status) : r.error);
      }
    }
    cam.descriptor = make_descriptor(link.url, MediaKind::Still, CameraStatus::Unreachable);
    if (samples.size() < 2) {
      cam.descriptor.note = samples.empty() ? last_cause : fmt::format("only 1 successful retrieval ({})", last_cause);
      return;
    }
    try {
      const LivenessVerdict v = classify_liveness(samples, config);
      cam.descriptor.status = v.status == LivenessStatus::Live ? CameraStatus::Live : CameraStatus::Static;
      cam.verdict = v;
    } catch (const InsufficientSamples& e) {
      cam.descriptor.status = CameraStatus::Static;
      cam.descriptor.note = fmt::format("not a decodable image: {}", e.what());
    }
  });
  return out;
}

}  // namespace camwatch
