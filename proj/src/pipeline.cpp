#include "camwatch/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "camwatch/analytics.hpp"
#include "camwatch/archiver.hpp"
#include "camwatch/camera.hpp"
#include "camwatch/config.hpp"
#include "camwatch/crawler.hpp"
#include "camwatch/detections.hpp"
#include "camwatch/distancing.hpp"
#include "camwatch/error.hpp"
#include "camwatch/eval.hpp"
#include "camwatch/groups.hpp"
#include "camwatch/http_fetcher.hpp"
#include "camwatch/identification.hpp"
#include "camwatch/image.hpp"
#include "camwatch/mirror_fetcher.hpp"

namespace camwatch {

namespace fs = std::filesystem;

namespace {

struct Globals {
  std::string config_path;
  std::vector<std::string> mirrors;
  bool offline = false;
  std::string now;
};

struct Context {
  PipelineConfig config;
  std::ostream& out;
  std::ostream& err;
  std::function<Timestamp()> clock = now_utc;
  std::unique_ptr<HttpFetcher> http;
  std::unique_ptr<MirrorFetcher> mirror;

  PageFetcher& pages() { return mirror ? static_cast<PageFetcher&>(*mirror) : *http; }
  SnapshotRetriever& snapshots() { return mirror ? static_cast<SnapshotRetriever&>(*mirror) : *http; }
  CaptureFetcher& captures() { return mirror ? static_cast<CaptureFetcher&>(*mirror) : *http; }

  void warn(const std::string& message) const { err << "warning: " << message << '\n'; }
};

fs::path required(const std::string& flag_value, const std::optional<fs::path>& from_config, const char* what) {
  if (!flag_value.empty()) return flag_value;
  if (from_config) return *from_config;
  throw ConfigError(fmt::format("{} not given", what), {fmt::format("{}: set it in the config or pass the flag", what)});
}

// Writes next to the target first so readers never see a partial file.
void write_jsonl_atomic(const fs::path& path, const std::vector<Json>& records) {
  const fs::path tmp = path.string() + ".tmp";
  write_jsonl(tmp, records);
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError(fmt::format("cannot replace '{}': {}", path.string(), ec.message()));
}

void write_text(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(fmt::format("cannot write '{}'", path.string()));
  f << text;
  if (!f) throw IoError(fmt::format("write failure on '{}'", path.string()));
}

std::vector<std::string> read_seed_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot read seeds '{}'", path.string()));
  std::vector<std::string> seeds;
  for (std::string line; std::getline(in, line);) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    seeds.push_back(line.substr(b, e - b + 1));
  }
  return seeds;
}

template <typename T, typename F>
std::vector<T> read_records(const fs::path& path, F&& parse) {
  std::vector<T> out;
  for (const auto& line : read_jsonl(path)) {
    if (!line.value) throw SchemaError(fmt::format("{}:{}: {}", path.string(), line.line_number, line.parse_error));
    try {
      out.push_back(parse(*line.value));
    } catch (const SchemaError& e) {
      throw SchemaError(fmt::format("{}:{}: {}", path.string(), line.line_number, e.what()));
    }
  }
  return out;
}

std::vector<FrameDetections> load_frames(const fs::path& path, const LoadOptions& options, const Context& ctx) {
  std::error_code ec;
  if (!fs::exists(path, ec)) throw NoInput(fmt::format("no input: '{}' does not exist", path.string()));
  const auto files = jsonl_inputs(path);
  if (files.empty()) throw NoInput(fmt::format("no input: no .jsonl files under '{}'", path.string()));
  std::vector<FrameDetections> frames;
  for (const auto& f : files) {
    auto r = load_detection_file(f, options);
    for (const auto& issue : r.issues) ctx.warn(fmt::format("{}:{}: {}", f.string(), issue.line, issue.message));
    std::move(r.frames.begin(), r.frames.end(), std::back_inserter(frames));
  }
  return frames;
}

std::map<std::string, SceneAssignment> load_assignments(const fs::path& path, const Context& ctx) {
  std::vector<LoadIssue> issues;
  const auto records = load_scene_file(path, &issues);
  for (const auto& i : issues) ctx.warn(fmt::format("{}:{}: {}", path.string(), i.line, i.message));
  std::map<std::string, SceneAssignment> out;
  for (const auto& r : records) {
    out.insert_or_assign(r.camera_id, assign_scene(r.camera_id, r.labels, ctx.config.vehicle_scenes, ctx.config.people_scenes));
  }
  return out;
}

Json summary(std::initializer_list<std::pair<const std::string, Json>> fields) { return Json(std::map<std::string, Json>(fields)); }

// ---- stages ----

struct DiscoverArgs {
  std::string seeds, out;
  std::optional<std::size_t> max_pages, max_depth, workers;
  std::optional<std::int64_t> delay_ms;
  bool no_robots = false;
};

void discover(const DiscoverArgs& a, Context& ctx) {
  const auto seeds = read_seed_file(required(a.seeds, ctx.config.seeds, "seeds"));
  if (a.out.empty()) throw InvalidInput("--out is required");
  CrawlBudget budget = ctx.config.crawl_budget;
  CrawlOptions options = ctx.config.crawl_options;
  if (a.max_pages) budget.max_pages = *a.max_pages;
  if (a.max_depth) budget.max_depth = *a.max_depth;
  if (a.delay_ms) budget.per_host_delay = std::chrono::milliseconds{*a.delay_ms};
  if (a.workers) options.workers = *a.workers;
  if (a.no_robots) options.respect_robots = false;
  options.clock = ctx.clock;

  const CrawlResult r = crawl(seeds, budget, ctx.pages(), options);
  std::vector<Json> rows;
  for (const auto& c : r.candidates) rows.push_back(to_json(c));
  write_jsonl_atomic(a.out, rows);
  Json failures = Json::array();
  for (const auto& f : r.failures) {
    ctx.warn(fmt::format("{}: {}", f.url, f.cause));
    failures.push_back({{"url", f.url}, {"cause", f.cause}});
  }
  ctx.out << summary({{"stage", "discover"},
                      {"pages_fetched", r.fetched_pages.size()},
                      {"candidates", r.candidates.size()},
                      {"failures", failures}})
                 .dump()
          << '\n';
}

struct IdentifyArgs {
  std::string candidates, out, verdicts;
  std::optional<std::size_t> workers;
  bool no_wait = false;
};

void identify(const IdentifyArgs& a, Context& ctx) {
  const auto candidates = read_records<CandidateLink>(a.candidates, candidate_from_json);
  IdentifyOptions options;
  options.workers = a.workers.value_or(ctx.config.crawl_options.workers);
  options.clock = ctx.clock;
  options.virtual_time = a.no_wait;
  const auto identified = identify_candidates(candidates, ctx.snapshots(), ctx.config.liveness, options);

  std::vector<CameraDescriptor> cameras;
  std::vector<Json> verdicts;
  std::map<std::string, std::size_t> by_status;
  std::set<std::string> seen;
  for (const auto& c : identified) {
    // Two spellings of one URL share an id; keep the first.
    if (!seen.insert(c.descriptor.camera_id).second) continue;
    cameras.push_back(c.descriptor);
    ++by_status[to_string(c.descriptor.status)];
    if (c.verdict) verdicts.push_back(verdict_to_json(c.descriptor, *c.verdict));
    if (c.descriptor.note) ctx.warn(fmt::format("{}: {}", c.descriptor.url, *c.descriptor.note));
  }
  write_cameras(a.out, cameras);
  if (!a.verdicts.empty()) write_jsonl_atomic(a.verdicts, verdicts);
  ctx.out << summary({{"stage", "identify"}, {"cameras", cameras.size()}, {"status", by_status}}).dump() << '\n';
}

struct FilterFrozenArgs {
  std::string cameras, archive, out;
};

void filter_frozen(const FilterFrozenArgs& a, Context& ctx) {
  auto cameras = read_cameras(a.cameras);
  const fs::path root = required(a.archive, ctx.config.archive_root, "archive_root");
  std::size_t checked = 0, frozen = 0;
  Json skipped = Json::array();
  for (auto& cam : cameras) {
    if (cam.status != CameraStatus::Live || cam.kind != MediaKind::Still) continue;
    std::vector<fs::path> images;
    for (const auto& p : list_camera_archive(root, cam.camera_id)) {
      const auto ext = p.extension().string();
      if (ext == ".jpg" || ext == ".jpeg" || ext == ".png") images.push_back(p);
    }
    if (images.size() < 4) {
      skipped.push_back({{"camera_id", cam.camera_id}, {"reason", fmt::format("{} archived images, need 4", images.size())}});
      continue;
    }
    const auto picked = select_equally_spaced<fs::path>(images);
    std::vector<PixelImage> decoded;
    try {
      for (const auto& p : picked) {
        std::ifstream in(p, std::ios::binary);
        const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
        decoded.push_back(decode_image(bytes));
      }
    } catch (const DecodeError& e) {
      skipped.push_back({{"camera_id", cam.camera_id}, {"reason", e.what()}});
      continue;
    }
    ++checked;
    bool is_fr = false;
    try {
      is_fr = is_frozen(decoded);
    } catch (const DimensionMismatch&) {
      is_fr = false;  // differently sized frames are not identical
    }
    if (is_fr) {
      cam.status = CameraStatus::Frozen;
      cam.note = "4 equally spaced archived images are pixelwise identical";
      ++frozen;
    }
  }
  for (const auto& s : skipped) ctx.warn(fmt::format("{}: not checked, {}", s["camera_id"].get<std::string>(), s["reason"].get<std::string>()));
  std::vector<Json> rows;
  for (const auto& c : cameras) rows.push_back(to_json(c));
  write_jsonl_atomic(a.out.empty() ? fs::path(a.cameras) : fs::path(a.out), rows);
  ctx.out << summary({{"stage", "filter-frozen"}, {"checked", checked}, {"frozen", frozen}, {"skipped", skipped}}).dump() << '\n';
}

struct ScheduleArgs {
  std::string cameras, day, out;
  std::optional<int> per_day;
  std::optional<std::uint64_t> seed;
};

std::vector<CaptureJob> make_schedule(const std::vector<CameraDescriptor>& all, const std::string& day, std::optional<int> per_day,
                                      std::optional<std::uint64_t> seed, const Context& ctx) {
  std::vector<CameraDescriptor> live;
  std::copy_if(all.begin(), all.end(), std::back_inserter(live), [](const auto& c) { return c.status == CameraStatus::Live; });
  const Date d = day.empty() ? date_of(ctx.clock()) : parse_date(day);
  auto jobs = build_daily_schedule(live, per_day.value_or(ctx.config.captures_per_day), d, seed.value_or(ctx.config.schedule_seed));
  for (auto& j : jobs) {
    if (j.kind == CaptureKind::Clip) j.clip_duration = ctx.config.clip_duration;
  }
  return jobs;
}

void schedule(const ScheduleArgs& a, Context& ctx) {
  const auto jobs = make_schedule(read_cameras(a.cameras), a.day, a.per_day, a.seed, ctx);
  std::vector<Json> rows;
  for (const auto& j : jobs) rows.push_back(to_json(j));
  write_jsonl_atomic(a.out, rows);
  ctx.out << summary({{"stage", "schedule"}, {"jobs", jobs.size()}}).dump() << '\n';
}

struct ArchiveArgs {
  std::string cameras, schedule, root, day, records;
  std::optional<int> per_day;
  std::optional<std::size_t> parallelism;
  bool due_only = false;
};

void archive(const ArchiveArgs& a, Context& ctx) {
  if (a.cameras.empty() == a.schedule.empty()) throw InvalidInput("give exactly one of --cameras or --schedule");
  const auto jobs = a.schedule.empty() ? make_schedule(read_cameras(a.cameras), a.day, a.per_day, std::nullopt, ctx)
                                       : read_records<CaptureJob>(a.schedule, job_from_json);
  ArchiverOptions options;
  options.parallelism = a.parallelism.value_or(ctx.config.archive_parallelism);
  if (a.due_only) options.now = ctx.clock;
  const auto root = required(a.root, ctx.config.archive_root, "archive_root");
  const auto s = run_archiver(jobs, ctx.captures(), root, options);
  for (const auto& r : s.records) {
    if (r.outcome == CaptureOutcome::Failed) ctx.warn(fmt::format("{} at {}: {}", r.job.url, format_rfc3339(r.job.scheduled_at), r.cause));
  }
  if (!a.records.empty()) {
    std::vector<Json> rows;
    for (const auto& r : s.records) rows.push_back(to_json(r));
    write_jsonl_atomic(a.records, rows);
  }
  ctx.out << summary({{"stage", "archive"},
                      {"attempted", s.attempted},
                      {"succeeded", s.succeeded},
                      {"failed", s.failed},
                      {"skipped", s.skipped}})
                 .dump()
          << '\n';
}

struct IngestArgs {
  std::string detections, scenes, out;
  std::optional<double> threshold;
  bool strict = false;
};

void ingest(const IngestArgs& a, Context& ctx) {
  const auto frames = load_frames(a.detections, {.strict = a.strict}, ctx);
  const double threshold = a.threshold.value_or(ctx.config.confidence_threshold);
  const auto observations = reduce_observations(frames, threshold);
  const fs::path out = required(a.out, ctx.config.output_dir, "output_dir");
  std::vector<Json> rows;
  for (const auto& o : observations) rows.push_back(to_json(o));
  write_jsonl_atomic(out / "observations.jsonl", rows);
  std::size_t assigned = 0;
  if (!a.scenes.empty()) {
    rows.clear();
    for (const auto& [id, asg] : load_assignments(a.scenes, ctx)) rows.push_back(to_json(asg));
    assigned = rows.size();
    write_jsonl_atomic(out / "assignments.jsonl", rows);
  }
  ctx.out << summary({{"stage", "ingest"}, {"frames", frames.size()}, {"observations", observations.size()}, {"assignments", assigned}})
                 .dump()
          << '\n';
}

std::string file_safe(std::string_view key) {
  std::string s;
  for (unsigned char c : key) s.push_back(std::isalnum(c) || c == '-' || c == '_' || c == '.' ? static_cast<char>(c) : '_');
  return s;
}

struct DistancingArgs {
  std::string detections, scenes, out, overlays;
  std::optional<double> threshold, height_ft, distance_ft, confidence;
};

void distancing(const DistancingArgs& a, Context& ctx) {
  const auto frames = load_frames(a.detections, {}, ctx);
  const DistancingConfig cfg = DistancingConfig::make(a.height_ft.value_or(ctx.config.distancing.assumed_height_ft),
                                                      a.distance_ft.value_or(ctx.config.distancing.distance_ft),
                                                      a.threshold.value_or(ctx.config.distancing.violation_threshold));
  std::optional<std::map<std::string, SceneAssignment>> scenes;
  if (!a.scenes.empty()) scenes = load_assignments(a.scenes, ctx);
  const double conf = a.confidence.value_or(ctx.config.confidence_threshold);
  std::vector<Json> rows;
  std::size_t violating_frames = 0;
  for (const auto& f : frames) {
    if (scenes) {
      const auto it = scenes->find(f.camera_id);
      if (it == scenes->end() || !it->second.people) continue;
    }
    const FrameDetections people = persons_only(filter_confident(f, conf));
    const ViolationReport report = violation_report(people, cfg);
    if (report.violating_pairs > 0) ++violating_frames;
    rows.push_back(to_json(report));
    if (!a.overlays.empty()) write_text(fs::path(a.overlays) / (file_safe(report.image_id) + ".svg"), violation_overlay_svg(people, report));
  }
  write_jsonl_atomic(a.out, rows);
  ctx.out << summary({{"stage", "distancing"},
                      {"frames", rows.size()},
                      {"frames_with_violations", violating_frames},
                      {"violation_threshold", cfg.violation_threshold}})
                 .dump()
          << '\n';
}

struct GroupsArgs {
  std::string violations, out;
};

void groups(const GroupsArgs& a, Context& ctx) {
  auto reports = read_records<ViolationReport>(a.violations, violation_report_from_json);
  std::vector<Json> rows;
  std::size_t largest = 0;
  for (auto& r : reports) {
    r.groups = group_bounds(r);
    largest = std::max(largest, r.groups->upper);
    rows.push_back(to_json(r));
  }
  write_jsonl_atomic(a.out.empty() ? fs::path(a.violations) : fs::path(a.out), rows);
  ctx.out << summary({{"stage", "groups"}, {"frames", rows.size()}, {"largest_upper_bound", largest}}).dump() << '\n';
}

struct EvaluateArgs {
  std::string predictions, truth, out;
  std::vector<std::string> classes;
  std::optional<double> iou, operating_confidence;
};

void evaluate_stage(const EvaluateArgs& a, Context& ctx) {
  const auto predictions = load_frames(a.predictions, {}, ctx);
  std::vector<GroundTruthFrame> truth;
  std::set<std::string> truth_classes;
  for (const auto& f : load_frames(a.truth, {.require_confidence = false}, ctx)) {
    truth.push_back(truth_from_frame(f));
    for (const auto& b : truth.back().boxes) truth_classes.insert(b.class_label);
  }
  std::vector<std::string> classes = a.classes;
  if (classes.empty()) classes.assign(truth_classes.begin(), truth_classes.end());
  EvalOptions options;
  options.iou_threshold = a.iou.value_or(ctx.config.iou_threshold);
  options.operating_confidence = a.operating_confidence.value_or(ctx.config.operating_confidence);
  const Json result = to_json(evaluate(predictions, truth, classes, options));
  if (a.out.empty()) {
    ctx.out << result.dump(2) << '\n';
  } else {
    write_text(a.out, result.dump(2) + "\n");
    ctx.out << summary({{"stage", "evaluate"}, {"classes", classes}, {"mean_average_precision", result["mean_average_precision"]}}).dump() << '\n';
  }
}

struct ReportArgs {
  std::string detections, scenes, violations, regions, phases, level, out;
  std::vector<std::string> week_starts;
  std::optional<std::uint64_t> min_people, min_vehicles;
  std::optional<double> threshold;
};

void report(const ReportArgs& a, Context& ctx) {
  if (a.detections.empty()) throw NoInput("no input: --detections is required");
  const auto frames = load_frames(a.detections, {}, ctx);
  if (frames.empty()) throw NoInput(fmt::format("no input: no detection records in '{}'", a.detections));
  auto observations = reduce_observations(frames, a.threshold.value_or(ctx.config.confidence_threshold));

  if (!a.scenes.empty()) {
    const auto scenes = load_assignments(a.scenes, ctx);
    std::set<std::string> missing;
    std::vector<Observation> kept;
    for (auto o : observations) {
      const auto it = scenes.find(o.camera_id);
      if (it == scenes.end()) {
        missing.insert(o.camera_id);
        continue;
      }
      if (!it->second.people) o.people = 0;
      if (!it->second.vehicles) o.vehicles = 0;
      if (it->second.people || it->second.vehicles) kept.push_back(std::move(o));
    }
    for (const auto& id : missing) ctx.warn(fmt::format("camera {} has no scene record, excluded", id));
    observations = std::move(kept);
  }

  const RegionMap regions = load_region_map(required(a.regions, ctx.config.region_map, "region_map"));
  const RegionLevel level = a.level.empty() ? ctx.config.region_level : parse_region_level(a.level);
  const auto daily = daily_camera_max(observations);
  RegionSums sums = region_daily_sum(daily, regions, level);
  for (const auto& id : sums.unmapped) ctx.warn(fmt::format("camera {} has no region mapping, excluded", id));

  std::vector<Date> starts = ctx.config.week_starts;
  if (!a.week_starts.empty()) {
    starts.clear();
    for (const auto& s : a.week_starts) starts.push_back(parse_date(s));
    std::sort(starts.begin(), starts.end());
    starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
  }
  ReportData data;
  data.daily = sums.series;
  for (const auto& s : sums.series) {
    if (s.points.empty()) continue;
    const auto ws = starts.empty() ? default_week_starts(s.points.front().date, s.points.back().date) : starts;
    data.weekly.push_back(weekly_max(s, ws));
  }
  data.presented = presentation_filter(data.weekly, a.min_people.value_or(ctx.config.min_people),
                                       a.min_vehicles.value_or(ctx.config.min_vehicles));

  std::vector<std::uint64_t> people;
  for (const auto& o : observations) people.push_back(o.people);
  std::vector<std::uint64_t> violating;
  std::vector<GroupBounds> bounds;
  if (!a.violations.empty()) {
    for (const auto& r : read_records<ViolationReport>(a.violations, violation_report_from_json)) {
      violating.push_back(r.violating_people);
      bounds.push_back(r.groups ? *r.groups : group_bounds(r));
    }
  }
  data.histograms = build_histograms(people, violating, bounds);
  const std::string phases = !a.phases.empty() ? a.phases : (ctx.config.phase_labels ? ctx.config.phase_labels->string() : "");
  if (!phases.empty()) data.phases = load_phase_labels(phases);

  const fs::path out = required(a.out, ctx.config.output_dir, "output_dir");
  const Manifest m = emit_reports(data, out, ctx.clock());
  ctx.out << summary({{"stage", "report"},
                      {"observations", observations.size()},
                      {"regions", data.daily.size()},
                      {"presented", data.presented.size()},
                      {"files", m.files.size()},
                      {"manifest", (out / "manifest.json").string()}})
                 .dump()
          << '\n';
}

int validate_config_stage(const std::string& path, Context& ctx) {
  const auto v = validate_config(path, prefixed_environment());
  for (const auto& w : v.warnings) ctx.warn(w);
  ctx.out << summary({{"valid", v.config.has_value()}, {"errors", v.errors}, {"warnings", v.warnings}}).dump() << '\n';
  return v.config ? 0 : 1;
}

Json error_json(const std::string& kind, const std::string& message, Json details = Json::array()) {
  return {{"error", kind}, {"message", message}, {"details", std::move(details)}};
}

}  // namespace

int run_subcommand(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Network camera discovery, archiving and crowd analytics", "camwatch"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "JSON config file (CAMWATCH_* variables override keys)");
  app.add_option("--mirror", g.mirrors, "Serve URLs under PREFIX from DIR (PREFIX=DIR, repeatable)");
  app.add_flag("--offline", g.offline, "Fail URLs outside every mirror instead of using the network");
  app.add_option("--now", g.now, "Pin the clock to this RFC 3339 time");

  DiscoverArgs da;
  auto* sc = app.add_subcommand("discover", "Crawl seed pages for candidate camera links");
  sc->add_option("--seeds", da.seeds, "File of seed URLs, one per line");
  sc->add_option("--max-pages", da.max_pages);
  sc->add_option("--max-depth", da.max_depth);
  sc->add_option("--delay-ms", da.delay_ms, "Per-host delay between requests");
  sc->add_option("--workers", da.workers);
  sc->add_flag("--no-robots", da.no_robots, "Ignore robots.txt");
  sc->add_option("--out", da.out, "Candidate links (JSON lines)")->required();

  IdentifyArgs ia;
  sc = app.add_subcommand("identify", "Sample candidates and decide which are live cameras");
  sc->add_option("--candidates", ia.candidates)->required();
  sc->add_option("--out", ia.out, "Camera descriptors (JSON lines)")->required();
  sc->add_option("--verdicts", ia.verdicts, "Liveness verdicts (JSON lines)");
  sc->add_option("--workers", ia.workers);
  sc->add_flag("--no-wait", ia.no_wait, "Do not wait between samples; stamp them at the configured spacing");

  FilterFrozenArgs fa;
  sc = app.add_subcommand("filter-frozen", "Mark live cameras whose archive is frozen");
  sc->add_option("--cameras", fa.cameras)->required();
  sc->add_option("--archive", fa.archive, "Archive root");
  sc->add_option("--out", fa.out, "Output descriptors (default: rewrite --cameras)");

  ScheduleArgs sa;
  sc = app.add_subcommand("schedule", "Build one day's capture schedule for the live cameras");
  sc->add_option("--cameras", sa.cameras)->required();
  sc->add_option("--day", sa.day, "UTC date, YYYY-MM-DD (default: today)");
  sc->add_option("--per-day", sa.per_day)->check(CLI::PositiveNumber);
  sc->add_option("--seed", sa.seed);
  sc->add_option("--out", sa.out)->required();

  ArchiveArgs aa;
  sc = app.add_subcommand("archive", "Capture scheduled images and clips into the archive");
  sc->add_option("--cameras", aa.cameras, "Camera descriptors to schedule for --day");
  sc->add_option("--schedule", aa.schedule, "Existing schedule file");
  sc->add_option("--root", aa.root, "Archive root");
  sc->add_option("--day", aa.day);
  sc->add_option("--per-day", aa.per_day)->check(CLI::PositiveNumber);
  sc->add_option("--parallelism", aa.parallelism)->check(CLI::PositiveNumber);
  sc->add_option("--records", aa.records, "Per-job records (JSON lines)");
  sc->add_flag("--due-only", aa.due_only, "Only run jobs scheduled at or before now");

  IngestArgs ga;
  sc = app.add_subcommand("ingest", "Load detections and scenes into per-capture observations");
  sc->add_option("--detections", ga.detections, "Detection file or directory of .jsonl files")->required();
  sc->add_option("--scenes", ga.scenes, "Scene classification file");
  sc->add_option("--out", ga.out, "Output directory");
  sc->add_option("--threshold", ga.threshold, "Confidence threshold")->check(CLI::Range(0.0, 1.0));
  sc->add_flag("--strict", ga.strict, "Fail on the first invalid record");

  DistancingArgs dsa;
  sc = app.add_subcommand("distancing", "Score person pairs for distancing violations");
  sc->add_option("--detections", dsa.detections)->required();
  sc->add_option("--scenes", dsa.scenes, "Only frames of cameras assigned to people counting");
  sc->add_option("--out", dsa.out, "Violation reports (JSON lines)")->required();
  sc->add_option("--overlays", dsa.overlays, "Directory for SVG overlays");
  sc->add_option("--threshold", dsa.threshold)->check(CLI::PositiveNumber);
  sc->add_option("--height-ft", dsa.height_ft)->check(CLI::PositiveNumber);
  sc->add_option("--distance-ft", dsa.distance_ft)->check(CLI::PositiveNumber);
  sc->add_option("--confidence", dsa.confidence)->check(CLI::Range(0.0, 1.0));

  GroupsArgs gra;
  sc = app.add_subcommand("groups", "Add group-size bounds to violation reports");
  sc->add_option("--violations", gra.violations)->required();
  sc->add_option("--out", gra.out, "Output (default: rewrite --violations)");

  EvaluateArgs ea;
  sc = app.add_subcommand("evaluate", "Score detections against ground truth");
  sc->add_option("--predictions", ea.predictions)->required();
  sc->add_option("--truth", ea.truth)->required();
  sc->add_option("--classes", ea.classes, "Classes to score (default: those in the truth)")->delimiter(',');
  sc->add_option("--iou", ea.iou)->check(CLI::Range(0.0, 1.0));
  sc->add_option("--operating-confidence", ea.operating_confidence)->check(CLI::Range(0.0, 1.0));
  sc->add_option("--out", ea.out, "Result file (default: stdout)");

  ReportArgs ra;
  sc = app.add_subcommand("report", "Aggregate counts into region series, histograms and plots");
  sc->add_option("--detections", ra.detections, "Detection file or directory of .jsonl files");
  sc->add_option("--scenes", ra.scenes);
  sc->add_option("--violations", ra.violations, "Violation reports, for the violation and group histograms");
  sc->add_option("--regions", ra.regions, "camera_id,country,state,city CSV");
  sc->add_option("--phases", ra.phases, "start_date,label CSV");
  sc->add_option("--level", ra.level, "country, state or city")->check(CLI::IsMember({"country", "state", "city"}));
  sc->add_option("--week-start", ra.week_starts, "Week boundary date (repeatable)");
  sc->add_option("--min-people", ra.min_people);
  sc->add_option("--min-vehicles", ra.min_vehicles);
  sc->add_option("--threshold", ra.threshold, "Confidence threshold")->check(CLI::Range(0.0, 1.0));
  sc->add_option("--out", ra.out, "Output directory");

  std::string config_to_check;
  sc = app.add_subcommand("validate-config", "Check a config file and list every problem");
  sc->add_option("path", config_to_check, "Config file (default: --config)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << error_json("UsageError", e.what()).dump() << '\n';
    return 2;
  }

  const auto* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  try {
    Context ctx{PipelineConfig{}, out, err, now_utc, nullptr, nullptr};
    if (name == "validate-config") {
      const std::string path = config_to_check.empty() ? g.config_path : config_to_check;
      if (path.empty()) throw InvalidInput("no config file given");
      return validate_config_stage(path, ctx);
    }
    // Config problems stop the run before any stage work.
    if (!g.config_path.empty()) {
      auto v = validate_config(fs::path(g.config_path), prefixed_environment());
      for (const auto& w : v.warnings) ctx.warn(w);
      if (!v.config) throw ConfigError(fmt::format("invalid config '{}'", g.config_path), v.errors);
      ctx.config = std::move(*v.config);
    }
    if (!g.now.empty()) {
      const Timestamp pinned = parse_rfc3339(g.now);
      ctx.clock = [pinned] { return pinned; };
    }
    ctx.http = std::make_unique<HttpFetcher>(HttpOptions{.user_agent = ctx.config.crawl_options.user_agent});
    if (!g.mirrors.empty()) {
      std::vector<MirrorFetcher::Mapping> maps;
      for (const auto& m : g.mirrors) maps.push_back(MirrorFetcher::parse_mapping(m));
      HttpFetcher* fb = g.offline ? nullptr : ctx.http.get();
      ctx.mirror = std::make_unique<MirrorFetcher>(std::move(maps), fb, fb, fb);
    }

    if (name == "discover") discover(da, ctx);
    else if (name == "identify") identify(ia, ctx);
    else if (name == "filter-frozen") filter_frozen(fa, ctx);
    else if (name == "schedule") schedule(sa, ctx);
    else if (name == "archive") archive(aa, ctx);
    else if (name == "ingest") ingest(ga, ctx);
    else if (name == "distancing") distancing(dsa, ctx);
    else if (name == "groups") groups(gra, ctx);
    else if (name == "evaluate") evaluate_stage(ea, ctx);
    else if (name == "report") report(ra, ctx);
    return 0;
  } catch (const ConfigError& e) {
    err << error_json(e.kind(), e.what(), e.problems()).dump() << '\n';
  } catch (const CrawlFailed& e) {
    Json details = Json::array();
    for (const auto& [seed, cause] : e.causes()) details.push_back({{"seed", seed}, {"cause", cause}});
    err << error_json(e.kind(), e.what(), details).dump() << '\n';
  } catch (const Error& e) {
    err << error_json(e.kind(), fmt::format("{}: {}", name, e.what())).dump() << '\n';
  } catch (const std::exception& e) {
    err << error_json("InternalError", fmt::format("{}: {}", name, e.what())).dump() << '\n';
  }
  return 1;
}

}  // namespace camwatch
