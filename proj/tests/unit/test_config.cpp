#include <filesystem>
#include <fstream>

#include "camwatch/config.hpp"
#include "camwatch/error.hpp"
#include "doctest.h"

using namespace camwatch;
namespace fs = std::filesystem;

namespace {

bool mentions(const std::vector<std::string>& list, const std::string& needle) {
  for (const auto& s : list) if (s.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("fixture config loads") {
  const auto cfg = load_config(fs::path(CAMWATCH_FIXTURES) / "config.json");
  CHECK(cfg.captures_per_day == 5);
  CHECK(cfg.schedule_seed == 2020);
  CHECK(cfg.archive_root == fs::path(CAMWATCH_FIXTURES) / "archive");
  CHECK(cfg.crawl_budget.per_host_delay == std::chrono::milliseconds{0});
  CHECK(cfg.liveness.spacing == std::chrono::seconds{10});
  CHECK(cfg.people_scenes.count("plaza"));
  CHECK(cfg.min_people == 7);
  CHECK(cfg.distancing.violation_threshold == doctest::Approx(6.0 / 5.4));
}

TEST_CASE("validation errors name the field") {
  const Json doc = {{"captures_per_day", 0}, {"liveness", {{"min_percent", -1}}}, {"crawl", "nope"}, {"bogus", 1}};
  const auto v = validate_config(doc, "/tmp");
  CHECK_FALSE(v.config);
  CHECK(mentions(v.errors, "captures_per_day"));
  CHECK(mentions(v.errors, "liveness.min_percent"));
  CHECK(mentions(v.errors, "crawl"));
  CHECK(mentions(v.warnings, "bogus"));
  const auto typed = validate_config(Json{{"eval", {{"iou_threshold", "high"}}}}, "/tmp");
  CHECK(mentions(typed.errors, "eval.iou_threshold"));
}

TEST_CASE("empty people scene list warns") {
  const auto v = validate_config(Json::object(), "/tmp");
  REQUIRE(v.config);
  CHECK(mentions(v.warnings, "scenes.people"));
}

TEST_CASE("environment overrides") {
  const Environment env = {{"CAMWATCH_LIVENESS__MIN_PERCENT", "0.05"},
                           {"CAMWATCH_CAPTURES_PER_DAY", "3"},
                           {"CAMWATCH_REPORT__REGION_LEVEL", "state"},
                           {"CAMWATCH_OUTPUT_DIR", "out"}};
  const auto v = validate_config(Json{{"captures_per_day", 9}}, "/base", env);
  REQUIRE(v.config);
  CHECK(v.config->captures_per_day == 3);
  CHECK(v.config->liveness.min_percent == doctest::Approx(0.05));
  CHECK(v.config->region_level == RegionLevel::State);
  CHECK(v.config->output_dir == fs::path("/base/out"));
  const auto bad = validate_config(Json::object(), "/base", {{"CAMWATCH_CAPTURES_PER_DAY", "zero"}});
  CHECK(mentions(bad.errors, "captures_per_day"));
}

TEST_CASE("unreadable or invalid files") {
  CHECK_THROWS_AS(validate_config(fs::path("/nonexistent/camwatch.json")), IoError);
  const fs::path p = fs::temp_directory_path() / "camwatch-unit-config.json";
  std::ofstream(p) << R"({"captures_per_day": -2})";
  try {
    load_config(p);
    FAIL("no throw");
  } catch (const ConfigError& e) {
    CHECK(mentions(e.problems(), "captures_per_day"));
  }
  fs::remove(p);
}
