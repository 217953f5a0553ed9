#include <filesystem>
#include <fstream>
#include <sstream>

#include "camwatch/jsonl.hpp"
#include "camwatch/pipeline.hpp"
#include "doctest.h"

using namespace camwatch;
namespace fs = std::filesystem;

namespace {

struct Run {
  int rc;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int rc = run_subcommand(args, out, err);
  return {rc, out.str(), err.str()};
}

const fs::path kFx = CAMWATCH_FIXTURES;

// Warnings precede the error document on stderr.
Json last_json_line(const std::string& text) {
  std::istringstream in(text);
  std::string line, last;
  while (std::getline(in, line)) if (!line.empty()) last = line;
  return Json::parse(last);
}

}  // namespace

TEST_CASE("usage errors") {
  CHECK(run({}).rc == 2);
  CHECK(run({"no-such-stage"}).rc == 2);
  CHECK(run({"groups"}).rc == 2);
}

TEST_CASE("report without detections is an explicit no-input error") {
  const auto empty = fs::temp_directory_path() / "camwatch-unit-empty";
  fs::remove_all(empty);
  fs::create_directories(empty);
  const auto r = run({"report", "--detections", empty.string(), "--out", (empty / "out").string()});
  CHECK(r.rc == 1);
  const auto j = Json::parse(r.err);
  CHECK(j["error"] == "NoInput");
  CHECK_FALSE(fs::exists(empty / "out" / "manifest.json"));
  fs::remove_all(empty);
}

TEST_CASE("bad config is rejected naming the field") {
  const auto p = fs::temp_directory_path() / "camwatch-unit-badcfg.json";
  std::ofstream(p) << R"({"captures_per_day": 0, "surprise": true})";
  const auto v = run({"validate-config", p.string()});
  CHECK(v.rc == 1);
  const auto verdict = Json::parse(v.out);
  CHECK(verdict["valid"] == false);
  CHECK(verdict["errors"].dump().find("captures_per_day") != std::string::npos);
  CHECK(v.err.find("warning:") != std::string::npos);
  CHECK(v.err.find("surprise") != std::string::npos);
  const auto s = run({"--config", p.string(), "groups", "--violations", "x.jsonl"});
  CHECK(s.rc == 1);
  const auto e = last_json_line(s.err);
  CHECK(e["error"] == "ConfigError");
  CHECK(e["details"].dump().find("captures_per_day") != std::string::npos);
  fs::remove(p);
  CHECK(run({"validate-config", (kFx / "config.json").string()}).rc == 0);
}

TEST_CASE("crawl failure lists causes per seed") {
  const auto seeds = fs::temp_directory_path() / "camwatch-unit-seeds.txt";
  std::ofstream(seeds) << "# unreachable\nhttp://fixture.example/missing.html\n";
  const auto r = run({"--mirror", "http://fixture.example/=" + (kFx / "site").string(), "--offline", "discover", "--seeds",
                      seeds.string(), "--out", (fs::temp_directory_path() / "camwatch-unit-c.jsonl").string()});
  fs::remove(seeds);
  CHECK(r.rc == 1);
  const auto j = Json::parse(r.err);
  CHECK(j["error"] == "CrawlFailed");
  CHECK(j["details"].size() == 1);
}

TEST_CASE("distancing and groups stages") {
  const auto dir = fs::temp_directory_path() / "camwatch-unit-stages";
  fs::remove_all(dir);
  const auto v = (dir / "violations.jsonl").string();
  const auto d = run({"--config", (kFx / "config.json").string(), "distancing", "--detections", (kFx / "detections").string(), "--scenes", (kFx / "scenes.jsonl").string(), "--out", v});
  REQUIRE(d.rc == 0);
  const auto summary = Json::parse(d.out);
  CHECK(summary["frames"].get<int>() > 0);
  const auto g = run({"groups", "--violations", v});
  CHECK(g.rc == 0);
  for (const auto& line : read_jsonl(v)) {
    REQUIRE(line.value);
    CHECK((*line.value)["group_lower"] <= (*line.value)["group_upper"]);
    CHECK((*line.value)["violating_people"] != 1);
  }
  fs::remove_all(dir);
}
