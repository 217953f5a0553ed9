#include <filesystem>
#include <fstream>
#include <thread>

#include "camwatch/error.hpp"
#include "camwatch/http_fetcher.hpp"
#include "camwatch/image.hpp"
#include "camwatch/mirror_fetcher.hpp"
#include "doctest.h"
#include "httplib.h"

using namespace camwatch;
namespace fs = std::filesystem;

namespace {

fs::path site() { return fs::path(CAMWATCH_FIXTURES) / "site"; }

// httplib server on an ephemeral loopback port for the life of the object.
struct LocalServer {
  httplib::Server server;
  int port = 0;
  std::thread thread;

  LocalServer() {
    server.Get("/page.html", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("<img src=\"cam.png\">", "text/html");
    });
    server.Get("/cam.png", [](const httplib::Request&, httplib::Response& res) {
      const auto png = encode_png(PixelImage(3, 3, {9, 9, 9}));
      res.set_content(std::string(png.begin(), png.end()), "image/png");
    });
    server.Get("/moved", [](const httplib::Request&, httplib::Response& res) { res.set_redirect("/page.html"); });
    server.Get("/ua", [](const httplib::Request& req, httplib::Response& res) {
      res.set_content(req.get_header_value("User-Agent"), "text/plain");
    });
    server.Get("/stream.mjpg", [](const httplib::Request&, httplib::Response& res) {
      res.set_chunked_content_provider("multipart/x-mixed-replace; boundary=frame", [](std::size_t, httplib::DataSink& sink) {
        const auto jpg = encode_jpeg(PixelImage(4, 4, {1, 2, 3}));
        const std::string head = "--frame\r\nContent-Type: image/jpeg\r\n\r\n";
        if (!sink.write(head.data(), head.size())) return false;
        if (!sink.write(reinterpret_cast<const char*>(jpg.data()), jpg.size())) return false;
        std::this_thread::sleep_for(std::chrono::milliseconds{50});
        return sink.write("\r\n", 2);
      });
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~LocalServer() {
    server.stop();
    thread.join();
  }
  std::string url(const std::string& path) const { return "http://127.0.0.1:" + std::to_string(port) + path; }
};

}  // namespace

TEST_CASE("mirror maps urls to files") {
  MirrorFetcher m({MirrorFetcher::parse_mapping("http://fixture.example/=" + site().string())});
  const auto index = m.fetch("http://fixture.example/");
  CHECK(index.ok);
  CHECK(index.text().find("<img") != std::string::npos);
  CHECK(m.fetch("http://fixture.example/index.html?x=1#y").ok);
  CHECK(m.fetch("http://fixture.example/missing.html").status == 404);
  CHECK_FALSE(m.fetch("http://fixture.example/../config.json").ok);
  CHECK_FALSE(m.fetch("http://elsewhere.example/").ok);
  CHECK_THROWS_AS(MirrorFetcher::parse_mapping("no-equals"), InvalidInput);
}

TEST_CASE("mirror camera directories advance per request") {
  MirrorFetcher m({{"http://fixture.example/", site()}});
  const std::string cam = "http://fixture.example/cams/plaza.jpg";
  std::vector<std::vector<std::uint8_t>> seen;
  for (int i = 0; i < 5; ++i) seen.push_back(m.retrieve(cam).body);
  CHECK(seen[0] != seen[1]);
  CHECK(seen[1] != seen[2]);
  CHECK(seen[3] == seen[2]);
  CHECK(seen[4] == seen[2]);
  CHECK(m.request_count(cam) == 5);
  CHECK(decode_image(seen[0]).width() > 0);
}

TEST_CASE("mirror falls back for unmapped urls") {
  struct Fallback : PageFetcher {
    int hits = 0;
    FetchResult fetch(const std::string&) override {
      ++hits;
      FetchResult r;
      r.ok = true;
      return r;
    }
  } fb;
  MirrorFetcher m({{"http://fixture.example/", site()}}, &fb);
  CHECK(m.fetch("http://other.example/").ok);
  CHECK(fb.hits == 1);
}

TEST_CASE("http fetcher against a local server") {
  LocalServer srv;
  HttpOptions opts;
  opts.user_agent = "camwatch-test";
  HttpFetcher http(opts);
  const auto page = http.fetch(srv.url("/page.html"));
  CHECK(page.ok);
  CHECK(page.status == 200);
  CHECK(page.content_type.starts_with("text/html"));
  CHECK(http.fetch(srv.url("/moved")).text() == page.text());
  CHECK(http.fetch(srv.url("/ua")).text() == "camwatch-test");
  const auto missing = http.fetch(srv.url("/nope"));
  CHECK_FALSE(missing.ok);
  CHECK(missing.status == 404);
  CHECK(decode_image(http.retrieve(srv.url("/cam.png")).body).width() == 3);
  CHECK(http.probe_stream(srv.url("/stream.mjpg")));
  CHECK_FALSE(http.probe_stream(srv.url("/nope")));
  const auto clip = http.fetch_clip(srv.url("/stream.mjpg"), std::chrono::seconds{1});
  CHECK(clip.ok);
  CHECK(clip.body.size() > 100);
  CHECK_FALSE(http.fetch_clip("rtsp://127.0.0.1:1/x", std::chrono::seconds{1}).ok);
  CHECK_FALSE(http.fetch("http://127.0.0.1:1/").ok);
}
