#include <filesystem>
#include <fstream>

#include "camwatch/camera.hpp"
#include "camwatch/csv.hpp"
#include "camwatch/digest.hpp"
#include "camwatch/error.hpp"
#include "camwatch/jsonl.hpp"
#include "camwatch/time.hpp"
#include "camwatch/url.hpp"
#include "doctest.h"

using namespace camwatch;
namespace fs = std::filesystem;

TEST_CASE("rfc3339 round trip and offsets") {
  const auto t = parse_rfc3339("2020-03-15T08:30:05Z");
  CHECK(format_rfc3339(t) == "2020-03-15T08:30:05Z");
  CHECK(parse_rfc3339("2020-03-15T10:30:05+02:00") == t);
  CHECK(parse_rfc3339("2020-03-15T08:30:05.999Z") == t);
  CHECK(format_hms(t) == "083005");
  CHECK(format_date(date_of(t)) == "2020-03-15");
  CHECK_THROWS_AS(parse_rfc3339("2020-03-15 08:30:05"), InvalidInput);
  CHECK_THROWS_AS(parse_rfc3339("2020-02-30T00:00:00Z"), InvalidInput);
  CHECK_THROWS_AS(parse_date("2020-13-01"), InvalidInput);
}

TEST_CASE("sha256 known vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("csv quoting") {
  const auto rows = parse_csv("a,\"b,c\",\"d\"\"e\"\r\n\"multi\nline\",,x\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == CsvRow{"a", "b,c", "d\"e"});
  CHECK(rows[1] == CsvRow{"multi\nline", "", "x"});
  CHECK(csv_line({"plain", "has,comma", "q\""}) == "plain,\"has,comma\",\"q\"\"\"\n");
  CHECK(parse_csv(csv_line({"x\ny", "z"}))[0] == CsvRow{"x\ny", "z"});
}

TEST_CASE("jsonl keeps line numbers for bad records") {
  const fs::path p = fs::temp_directory_path() / "camwatch-unit.jsonl";
  std::ofstream(p) << "{\"a\":1}\n\n{oops\n[2]\n";
  const auto lines = read_jsonl(p);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0].value->at("a") == 1);
  CHECK(lines[1].line_number == 3);
  CHECK_FALSE(lines[1].value);
  CHECK(lines[2].line_number == 4);
  write_jsonl(p, {Json{{"k", "v"}}, Json::array({1, 2})});
  CHECK(read_jsonl(p).size() == 2);
  fs::remove(p);
  CHECK_THROWS_AS(read_jsonl(p), IoError);
}

TEST_CASE("url parsing and resolution") {
  const auto u = parse_url("HTTP://User@Example.COM:8080/a/b?x=1#frag");
  REQUIRE(u);
  CHECK(u->scheme == "http");
  CHECK(u->host == "example.com");
  CHECK(u->userinfo == "User");
  CHECK(u->port == 8080);
  CHECK(u->path == "/a/b");
  CHECK(u->query == "x=1");
  CHECK(u->fragment == "frag");
  CHECK(u->origin() == "http://example.com:8080");
  CHECK_FALSE(parse_url("/relative/path"));
  CHECK_FALSE(parse_url("http://bad host/"));

  // RFC 3986 section 5.4 examples.
  const auto base = *parse_url("http://a/b/c/d;p?q");
  auto r = [&](const char* ref) { return resolve_url(base, ref)->to_string(); };
  CHECK(r("g") == "http://a/b/c/g");
  CHECK(r("./g") == "http://a/b/c/g");
  CHECK(r("g/") == "http://a/b/c/g/");
  CHECK(r("/g") == "http://a/g");
  CHECK(r("//g") == "http://g");
  CHECK(r("?y") == "http://a/b/c/d;p?y");
  CHECK(r("#s") == "http://a/b/c/d;p?q#s");
  CHECK(r("") == "http://a/b/c/d;p?q");
  CHECK(r("..") == "http://a/b/");
  CHECK(r("../..") == "http://a/");
  CHECK(r("../../../g") == "http://a/g");
  CHECK(r("g;x=1/../y") == "http://a/b/c/y");
}

TEST_CASE("canonical url and camera id") {
  CHECK(canonical_url("HTTP://Example.com:80") == "http://example.com/");
  CHECK(canonical_url("https://example.com:443/a/./b/../c#x") == "https://example.com/a/c");
  CHECK(canonical_url("http://example.com:8080/cam.jpg?s=1") == "http://example.com:8080/cam.jpg?s=1");
  CHECK(camera_id_for("http://EXAMPLE.com:80/cam.jpg#t") == camera_id_for("http://example.com/cam.jpg"));
  CHECK(camera_id_for("http://example.com/cam.jpg") == sha256_hex(std::string_view("http://example.com/cam.jpg")));
  CHECK(camera_id_for("http://example.com/a.jpg") != camera_id_for("http://example.com/b.jpg"));
  CHECK_THROWS_AS(camera_id_for("cam.jpg"), InvalidInput);
}

TEST_CASE("registrable domain") {
  CHECK(registrable_domain("cams.city.example.com") == "example.com");
  CHECK(registrable_domain("www.bbc.co.uk") == "bbc.co.uk");
  CHECK(registrable_domain("example.org") == "example.org");
  CHECK(registrable_domain("192.168.0.1") == "192.168.0.1");
}

TEST_CASE("camera descriptor json round trip") {
  auto c = make_descriptor("http://example.com/cam.jpg", MediaKind::Still, CameraStatus::Live);
  c.scene = "plaza";
  c.country = "US";
  CHECK(camera_from_json(to_json(c)) == c);
  auto bad = to_json(c);
  bad["status"] = "Sleeping";
  CHECK_THROWS_AS(camera_from_json(bad), SchemaError);
  bad = to_json(c);
  bad["camera_id"] = "0000";
  CHECK_THROWS_AS(camera_from_json(bad), SchemaError);
}
