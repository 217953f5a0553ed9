#include <atomic>
#include <map>
#include <mutex>

#include "camwatch/crawler.hpp"
#include "camwatch/error.hpp"
#include "camwatch/image.hpp"
#include "doctest.h"

using namespace camwatch;

namespace {

class FakeWeb : public PageFetcher {
 public:
  std::map<std::string, std::string> pages;
  std::map<std::string, int> hits;

  FetchResult fetch(const std::string& url) override {
    std::lock_guard lock(mu_);
    ++hits[url];
    auto it = pages.find(url);
    if (it == pages.end()) return FetchResult::failure("404", 404);
    FetchResult r;
    r.ok = true;
    r.status = 200;
    r.body.assign(it->second.begin(), it->second.end());
    r.content_type = "text/html";
    return r;
  }
  int total() const {
    int n = 0;
    for (const auto& [k, v] : hits) n += k.ends_with("/robots.txt") ? 0 : v;
    return n;
  }

 private:
  std::mutex mu_;
};

std::string html_links(std::initializer_list<std::string> hrefs) {
  std::string out = "<html><body>";
  for (const auto& h : hrefs) out += "<a href=\"" + h + "\">x</a>";
  return out + "</body></html>";
}

}  // namespace

TEST_CASE("link classification") {
  CHECK(classify_link("http://a.com/cam.JPG") == LinkKind::StillImage);
  CHECK(classify_link("http://a.com/snap.png?t=1") == LinkKind::StillImage);
  CHECK(classify_link("http://a.com/video.mjpg") == LinkKind::VideoStream);
  CHECK(classify_link("rtsp://a.com/live") == LinkKind::VideoStream);
  CHECK(classify_link("rtmp://a.com/live") == LinkKind::VideoStream);
  CHECK_FALSE(classify_link("http://a.com/page.html"));
}

TEST_CASE("candidate extraction") {
  const std::string html = R"(<img src="cams/a.jpg"><IMG SRC='/b.png'>
    <img data-src="c.jpeg" src="placeholder.gif"><video src="rtsp://x.com/s"></video>
    <a href="cams/a.jpg">dup</a><a href="page.html">p</a><img src=d.jpg>
    <!-- <img src="hidden.jpg"> -->)";
  const auto links = extract_candidate_links(html, "http://site.com/dir/index.html");
  std::vector<std::string> urls;
  for (const auto& l : links) urls.push_back(l.url);
  CHECK(urls == std::vector<std::string>{"http://site.com/dir/cams/a.jpg", "http://site.com/b.png",
                                         "http://site.com/dir/c.jpeg", "rtsp://x.com/s", "http://site.com/dir/d.jpg"});
  CHECK(links[3].kind == LinkKind::VideoStream);
  CHECK(links[0].source_page == "http://site.com/dir/index.html");
  CHECK(extract_page_links(html, "http://site.com/dir/index.html") == std::vector<std::string>{"http://site.com/dir/page.html"});
  CHECK_THROWS_AS(extract_candidate_links(html, "index.html"), InvalidInput);
}

TEST_CASE("robots rules") {
  const auto r = RobotsRules::parse("User-agent: other\nDisallow: /\n\nUser-agent: *\nDisallow: /private\nAllow: /private/ok\n", "camwatch");
  CHECK(r.allowed("/"));
  CHECK_FALSE(r.allowed("/private/x"));
  CHECK(r.allowed("/private/ok/y"));
  const auto mine = RobotsRules::parse("User-agent: camwatch\nDisallow: /cams\n", "camwatch");
  CHECK_FALSE(mine.allowed("/cams/1.jpg"));
  CHECK(RobotsRules::parse("", "camwatch").allowed("/anything"));
}

TEST_CASE("crawl stays on domain and honours budgets") {
  FakeWeb web;
  web.pages["http://a.com/"] = html_links({"/p1.html", "/p2.html", "http://other.org/x.html", "http://cams.a.com/q.html"}) +
                               "<img src=\"/c0.jpg\">";
  web.pages["http://a.com/p1.html"] = html_links({"/p3.html"}) + "<img src=\"/c1.jpg\">";
  web.pages["http://a.com/p2.html"] = html_links({"/p1.html"});
  web.pages["http://a.com/p3.html"] = "<img src=\"/c3.jpg\">";
  web.pages["http://cams.a.com/q.html"] = "<img src=\"/cq.jpg\">";
  web.pages["http://other.org/x.html"] = "<img src=\"/cx.jpg\">";
  CrawlBudget budget;
  budget.per_host_delay = std::chrono::milliseconds{0};
  CrawlOptions opts;
  opts.clock = [] { return Timestamp{std::chrono::seconds{7}}; };

  SUBCASE("depth 1") {
    budget.max_depth = 1;
    const auto r = crawl({"http://a.com/"}, budget, web, opts);
    CHECK(web.hits.count("http://other.org/x.html") == 0);
    CHECK(web.hits.count("http://a.com/p3.html") == 0);
    CHECK(web.hits["http://cams.a.com/q.html"] == 1);
    std::vector<std::string> urls;
    for (const auto& c : r.candidates) urls.push_back(c.url);
    CHECK(urls == std::vector<std::string>{"http://a.com/c0.jpg", "http://a.com/c1.jpg", "http://cams.a.com/cq.jpg"});
    CHECK(r.candidates[0].discovered_at == Timestamp{std::chrono::seconds{7}});
  }
  SUBCASE("page budget") {
    budget.max_pages = 2;
    crawl({"http://a.com/"}, budget, web, opts);
    CHECK(web.total() == 2);
  }
  SUBCASE("each page once") {
    budget.max_depth = 5;
    crawl({"http://a.com/"}, budget, web, opts);
    for (const auto& [url, n] : web.hits) CHECK_MESSAGE(n == 1, url);
  }
  SUBCASE("robots") {
    web.pages["http://a.com/robots.txt"] = "User-agent: *\nDisallow: /p1\n";
    crawl({"http://a.com/"}, budget, web, opts);
    CHECK(web.hits.count("http://a.com/p1.html") == 0);
    CHECK(web.hits["http://a.com/p2.html"] == 1);
  }
  SUBCASE("failed seeds") {
    try {
      crawl({"http://a.com/missing", "http://b.com/"}, budget, web, opts);
      FAIL("no throw");
    } catch (const CrawlFailed& e) {
      CHECK(e.causes().size() == 2);
    }
  }
}

TEST_CASE("crawl spaces requests to one host") {
  FakeWeb web;
  web.pages["http://a.com/"] = html_links({"/1.html", "/2.html", "/3.html"});
  for (int i = 1; i <= 3; ++i) web.pages["http://a.com/" + std::to_string(i) + ".html"] = "";
  CrawlBudget budget;
  budget.per_host_delay = std::chrono::milliseconds{40};
  CrawlOptions opts;
  opts.workers = 4;
  opts.respect_robots = false;
  const auto t0 = std::chrono::steady_clock::now();
  crawl({"http://a.com/"}, budget, web, opts);
  CHECK(std::chrono::steady_clock::now() - t0 >= std::chrono::milliseconds{3 * 40});
}

namespace {

class FakeCams : public SnapshotRetriever {
 public:
  std::map<std::string, std::vector<std::vector<std::uint8_t>>> frames;
  std::map<std::string, std::size_t> next;
  std::mutex mu;
  FetchResult retrieve(const std::string& url) override {
    std::lock_guard lock(mu);
    auto it = frames.find(url);
    if (it == frames.end()) return FetchResult::failure("connection refused");
    FetchResult r;
    r.ok = true;
    r.body = it->second[std::min(next[url]++, it->second.size() - 1)];
    return r;
  }
  bool probe_stream(const std::string& url) override { return url.find("good") != std::string::npos; }
};

}  // namespace

TEST_CASE("identify candidates") {
  FakeCams cams;
  const PixelImage a(8, 8, {0, 0, 0}), b(8, 8, {200, 200, 200});
  cams.frames["http://a.com/live.jpg"] = {encode_png(a), encode_png(b), encode_png(a)};
  cams.frames["http://a.com/still.jpg"] = {encode_png(a)};
  std::vector<CandidateLink> in = {{"http://a.com/live.jpg", LinkKind::StillImage, "", {}},
                                   {"http://a.com/still.jpg", LinkKind::StillImage, "", {}},
                                   {"http://a.com/gone.jpg", LinkKind::StillImage, "", {}},
                                   {"rtsp://a.com/good", LinkKind::VideoStream, "", {}},
                                   {"rtsp://a.com/bad", LinkKind::VideoStream, "", {}}};
  std::vector<std::chrono::seconds> slept;
  std::mutex mu;
  IdentifyOptions opts;
  opts.sleep = [&](std::chrono::seconds s) { std::lock_guard l(mu); slept.push_back(s); };
  const auto out = identify_candidates(in, cams, LivenessConfig{}, opts);
  REQUIRE(out.size() == 5);
  CHECK(out[0].descriptor.status == CameraStatus::Live);
  CHECK(out[1].descriptor.status == CameraStatus::Static);
  CHECK(out[2].descriptor.status == CameraStatus::Unreachable);
  CHECK(out[2].descriptor.note);
  CHECK(out[3].descriptor.status == CameraStatus::Live);
  CHECK(out[3].descriptor.kind == MediaKind::Video);
  CHECK(out[4].descriptor.status == CameraStatus::Unreachable);
  REQUIRE(out[0].verdict);
  CHECK(out[0].verdict->sample_times.size() == 3);
  for (auto s : slept) CHECK(s == std::chrono::seconds{10});

  IdentifyOptions virt;
  virt.virtual_time = true;
  virt.clock = [] { return Timestamp{std::chrono::seconds{100}}; };
  virt.sleep = [](std::chrono::seconds) { FAIL("slept in virtual time"); };
  cams.next.clear();
  const auto v = identify_candidates({in[0]}, cams, LivenessConfig{}, virt);
  CHECK(v[0].verdict->sample_times ==
        std::vector<Timestamp>{Timestamp{std::chrono::seconds{100}}, Timestamp{std::chrono::seconds{110}}, Timestamp{std::chrono::seconds{120}}});
}
