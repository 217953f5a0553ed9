#include <filesystem>
#include <fstream>

#include "camwatch/detections.hpp"
#include "camwatch/error.hpp"
#include "doctest.h"

using namespace camwatch;
namespace fs = std::filesystem;

namespace {

Json record() {
  return Json::parse(R"({"camera_id":"cam1","captured_at":"2020-03-01T10:00:00Z","image_width":640,"image_height":480,"source":{"kind":"still"},
    "detections":[{"box":[10,20,30,60],"class":"person","confidence":0.9}]})");
}

}  // namespace

TEST_CASE("detection schema") {
  const auto f = frame_from_json(record());
  CHECK(f.camera_id == "cam1");
  CHECK(f.detections.at(0).box == BoundingBox{10, 20, 30, 60});
  CHECK(frame_from_json(to_json(f)) == f);
  CHECK(frame_key(f) == "cam1@2020-03-01T10:00:00Z");

  auto j = record();
  j["detections"][0]["box"] = {30, 20, 10, 60};
  CHECK_THROWS_AS(frame_from_json(j), SchemaError);
  j = record();
  j["detections"][0]["box"] = {10, 20, 700, 60};
  CHECK_THROWS_AS(frame_from_json(j), SchemaError);
  j = record();
  j["detections"][0]["confidence"] = 1.5;
  CHECK_THROWS_AS(frame_from_json(j), SchemaError);
  j = record();
  j["detections"][0].erase("confidence");
  CHECK_THROWS_AS(frame_from_json(j), SchemaError);
  LoadOptions truth;
  truth.require_confidence = false;
  CHECK(frame_from_json(j, truth).detections[0].confidence == 1.0);
  j = record();
  j.erase("captured_at");
  CHECK_THROWS_AS(frame_from_json(j), SchemaError);
  j = record();
  j["source"] = {{"kind", "video"}, {"frame_index", 60}};
  CHECK(frame_key(frame_from_json(j)) == "cam1@2020-03-01T10:00:00Z#60");
}

TEST_CASE("loading reports bad lines") {
  const fs::path p = fs::temp_directory_path() / "camwatch-unit-det.jsonl";
  auto bad = record();
  bad["image_width"] = -1;
  std::ofstream(p) << record().dump() << "\n" << bad.dump() << "\nnot json\n" << record().dump() << "\n";
  const auto r = load_detection_file(p);
  CHECK(r.frames.size() == 2);
  REQUIRE(r.issues.size() == 2);
  CHECK(r.issues[0].line == 2);
  CHECK(r.issues[1].line == 3);
  LoadOptions strict;
  strict.strict = true;
  CHECK_THROWS_AS(load_detection_file(p, strict), SchemaError);
  std::ofstream(p) << "garbage\n";
  CHECK(load_detection_file(p).issues.size() == 1);
  CHECK_THROWS_AS(load_detection_file(p, strict), SchemaError);
  std::ofstream(p) << "";
  CHECK(load_detection_file(p).frames.empty());
  fs::remove(p);
  CHECK_THROWS_AS(load_detection_file(p), IoError);
}

TEST_CASE("confidence filter and counts") {
  FrameDetections f;
  f.detections = {{{0, 0, 1, 1}, "person", 0.3}, {{0, 0, 1, 1}, "person", 0.2999}, {{0, 0, 1, 1}, "car", 0.8},
                  {{0, 0, 1, 1}, "truck", 0.5},  {{0, 0, 1, 1}, "bus", 0.1},         {{0, 0, 1, 1}, "dog", 0.9},
                  {{0, 0, 1, 1}, "motorcycle", 0.4}};
  const auto kept = filter_confident(f);
  CHECK(kept.detections.size() == 5);
  CHECK(count_people(kept) == 1);
  CHECK(count_vehicles(kept) == 3);
  CHECK(persons_only(f).detections.size() == 2);
  CHECK(is_vehicle_label("bus"));
  CHECK_FALSE(is_vehicle_label("bicycle"));
}

TEST_CASE("scene assignment") {
  const std::set<std::string> people = {"plaza", "street"};
  using L = std::vector<SceneLabel>;
  auto assign = [&](L labels) { return assign_scene("c", labels, kDefaultVehicleScenes, people); };
  CHECK(assign({{"plaza", .2}, {"highway", .9}, {"plaza", .1}, {"park", .1}, {"plaza", .05}}).primary_scene == "plaza");
  // Two-way tie broken by the strongest member.
  const auto tie = assign({{"plaza", .3}, {"highway", .35}, {"plaza", .1}, {"highway", .05}, {"park", .2}});
  CHECK(tie.primary_scene == "highway");
  CHECK(tie.vehicles);
  CHECK(tie.people);  // any member label counts for a task
  CHECK_FALSE(assign({{"highway", .3}, {"road", .35}, {"park", .1}, {"x", .05}, {"y", .2}}).people);
  const auto p = assign({{"street", .5}, {"x", .1}, {"y", .1}, {"z", .1}, {"w", .1}});
  CHECK(p.primary_scene == "street");
  CHECK(p.people);
  CHECK_THROWS_AS(assign({{"plaza", 1}}), InvalidInput);
}

TEST_CASE("video sampling and clip reduction") {
  CHECK(sample_video_frames(61) == std::vector<std::int64_t>{0, 30, 60});
  CHECK(sample_video_frames(60) == std::vector<std::int64_t>{0, 30});
  CHECK(sample_video_frames(1) == std::vector<std::int64_t>{0});
  CHECK_THROWS_AS(sample_video_frames(0), InvalidInput);
  CHECK(clip_person_count({}) == 0);

  const Timestamp t = parse_rfc3339("2020-03-01T10:00:00Z");
  auto frame = [&](int people, std::int64_t idx, Timestamp at, FrameSource::Kind k = FrameSource::Kind::Video) {
    FrameDetections f;
    f.camera_id = "c";
    f.captured_at = at;
    f.source = {k, idx};
    for (int i = 0; i < people; ++i) f.detections.push_back({{0, 0, 1, 1}, "person", 0.9});
    f.detections.push_back({{0, 0, 1, 1}, "person", 0.1});
    return f;
  };
  const std::vector frames = {frame(2, 0, t), frame(5, 30, t), frame(1, 60, t), frame(3, 0, t + std::chrono::hours{1}, FrameSource::Kind::Still)};
  const auto obs = reduce_observations(frames);
  REQUIRE(obs.size() == 2);
  CHECK(obs[0].clip);
  CHECK(obs[0].people == 5);
  CHECK(obs[0].frames == 3);
  CHECK_FALSE(obs[1].clip);
  CHECK(obs[1].people == 3);
  CHECK(observation_from_json(to_json(obs[0])) == obs[0]);
}
