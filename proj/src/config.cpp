#include "camwatch/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "camwatch/error.hpp"

extern char** environ;

namespace camwatch {

namespace fs = std::filesystem;

namespace {

// Every recognised key, for the unknown-key warnings.
const std::set<std::string> kKnownKeys = {
    "seeds", "archive_root", "region_map", "phase_labels", "output_dir",
    "captures_per_day", "schedule_seed",
    "archiver.parallelism", "archiver.clip_seconds",
    "crawl.max_pages", "crawl.max_depth", "crawl.per_host_delay_ms", "crawl.workers", "crawl.respect_robots",
    "crawl.user_agent",
    "liveness.min_percent", "liveness.min_luminance", "liveness.channel_tolerance", "liveness.samples",
    "liveness.spacing_seconds",
    "distancing.assumed_height_ft", "distancing.distance_ft", "distancing.violation_threshold",
    "detection.confidence_threshold",
    "scenes.people", "scenes.vehicles",
    "presentation.min_people", "presentation.min_vehicles",
    "report.region_level", "report.week_starts",
    "eval.iou_threshold", "eval.operating_confidence",
};

class Reader {
 public:
  Reader(const Json& doc, fs::path base, std::vector<std::string>& errors)
      : doc_(doc), base_(std::move(base)), errors_(errors) {}

  const Json* find(const std::string& dotted) const {
    const Json* cur = &doc_;
    std::size_t start = 0;
    while (true) {
      const auto dot = dotted.find('.', start);
      const std::string key = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (!cur->is_object()) return nullptr;
      const auto it = cur->find(key);
      if (it == cur->end()) return nullptr;
      cur = &*it;
      if (dot == std::string::npos) return cur;
      start = dot + 1;
    }
  }

  template <typename T>
  void number(const std::string& key, T& out, double lo, double hi, bool lo_open = false) {
    const Json* v = find(key);
    if (!v) return;
    if (!v->is_number()) return fail(key, "must be a number");
    const double d = v->get<double>();
    if constexpr (std::is_integral_v<T>) {
      if (!v->is_number_integer() && !v->is_number_unsigned()) return fail(key, "must be an integer");
    }
    if (!std::isfinite(d) || d < lo || (lo_open && d == lo) || d > hi) {
      return fail(key, fmt::format("must be {} {:g}{}", lo_open ? ">" : ">=", lo,
                                   hi < std::numeric_limits<double>::max() ? fmt::format(" and <= {:g}", hi) : ""));
    }
    if constexpr (std::is_integral_v<T>) {
      out = v->is_number_unsigned() ? static_cast<T>(v->get<std::uint64_t>()) : static_cast<T>(v->get<std::int64_t>());
    } else {
      out = static_cast<T>(d);
    }
  }

  void boolean(const std::string& key, bool& out) {
    const Json* v = find(key);
    if (!v) return;
    if (!v->is_boolean()) return fail(key, "must be true or false");
    out = v->get<bool>();
  }

  void string(const std::string& key, std::string& out) {
    const Json* v = find(key);
    if (!v) return;
    if (!v->is_string() || v->get<std::string>().empty()) return fail(key, "must be a non-empty string");
    out = v->get<std::string>();
  }

  void path(const std::string& key, std::optional<fs::path>& out) {
    std::string s;
    string(key, s);
    if (s.empty()) return;
    const fs::path p(s);
    out = (p.is_absolute() ? p : base_ / p).lexically_normal();
  }

  void string_set(const std::string& key, std::set<std::string>& out) {
    const Json* v = find(key);
    if (!v) return;
    if (!v->is_array()) return fail(key, "must be a list of strings");
    std::set<std::string> items;
    for (const auto& e : *v) {
      if (!e.is_string() || e.get<std::string>().empty()) return fail(key, "must be a list of non-empty strings");
      items.insert(e.get<std::string>());
    }
    out = std::move(items);
  }

  void fail(const std::string& key, const std::string& problem) { errors_.push_back(key + ": " + problem); }

 private:
  const Json& doc_;
  fs::path base_;
  std::vector<std::string>& errors_;
};

void collect_unknown(const Json& node, const std::string& prefix, std::vector<std::string>& warnings,
                     std::vector<std::string>& errors) {
  for (auto it = node.begin(); it != node.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (kKnownKeys.contains(key)) continue;
    const bool is_section = std::any_of(kKnownKeys.begin(), kKnownKeys.end(),
                                        [&](const std::string& k) { return k.starts_with(key + "."); });
    if (is_section && it->is_object()) {
      collect_unknown(*it, key, warnings, errors);
    } else if (is_section) {
      errors.push_back(key + ": must be an object");
    } else {
      warnings.push_back(key + ": unknown key, ignored");
    }
  }
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

void apply_environment(Json& doc, const Environment& env, std::vector<std::string>& errors) {
  const std::string prefix = kEnvPrefix;
  for (const auto& [name, raw] : env) {
    if (!name.starts_with(prefix) || name.size() == prefix.size()) continue;
    std::vector<std::string> parts;
    std::string rest = name.substr(prefix.size());
    for (std::size_t pos; (pos = rest.find("__")) != std::string::npos; rest.erase(0, pos + 2)) {
      parts.push_back(lower(rest.substr(0, pos)));
    }
    parts.push_back(lower(rest));
    Json value = Json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    Json* cur = &doc;
    bool ok = true;
    for (std::size_t i = 0; i + 1 < parts.size() && ok; ++i) {
      Json& next = (*cur)[parts[i]];
      if (next.is_null()) next = Json::object();
      ok = next.is_object();
      cur = &next;
    }
    if (!ok) {
      errors.push_back(fmt::format("{}: cannot override a non-object section", name));
      continue;
    }
    (*cur)[parts.back()] = std::move(value);
  }
}

}  // namespace

Environment prefixed_environment() {
  Environment env;
  for (char** e = environ; e && *e; ++e) {
    const std::string_view kv(*e);
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos) continue;
    const std::string key(kv.substr(0, eq));
    if (key.starts_with(kEnvPrefix)) env[key] = std::string(kv.substr(eq + 1));
  }
  return env;
}

ConfigValidation validate_config(const Json& document, const fs::path& base_dir, const Environment& env) {
  ConfigValidation result;
  if (!document.is_object()) {
    result.errors.push_back("(root): config must be a JSON object");
    return result;
  }
  Json doc = document;
  apply_environment(doc, env, result.errors);
  collect_unknown(doc, "", result.warnings, result.errors);

  PipelineConfig c;
  Reader r(doc, base_dir, result.errors);
  constexpr double kMax = std::numeric_limits<double>::max();

  r.path("seeds", c.seeds);
  r.path("archive_root", c.archive_root);
  r.path("region_map", c.region_map);
  r.path("phase_labels", c.phase_labels);
  r.path("output_dir", c.output_dir);

  r.number("captures_per_day", c.captures_per_day, 1, 86400);
  r.number("schedule_seed", c.schedule_seed, 0, kMax);
  r.number("archiver.parallelism", c.archive_parallelism, 1, 1024);
  std::int64_t clip_seconds = c.clip_duration.count();
  r.number("archiver.clip_seconds", clip_seconds, 1, 3600);
  c.clip_duration = std::chrono::seconds{clip_seconds};

  r.number("crawl.max_pages", c.crawl_budget.max_pages, 1, kMax);
  r.number("crawl.max_depth", c.crawl_budget.max_depth, 0, 1000);
  std::int64_t delay_ms = c.crawl_budget.per_host_delay.count();
  r.number("crawl.per_host_delay_ms", delay_ms, 0, 3'600'000);
  c.crawl_budget.per_host_delay = std::chrono::milliseconds{delay_ms};
  r.number("crawl.workers", c.crawl_options.workers, 1, 1024);
  r.boolean("crawl.respect_robots", c.crawl_options.respect_robots);
  r.string("crawl.user_agent", c.crawl_options.user_agent);

  r.number("liveness.min_percent", c.liveness.min_percent, 0, 1);
  r.number("liveness.min_luminance", c.liveness.min_luminance, 0, 255);
  r.number("liveness.channel_tolerance", c.liveness.channel_tolerance, 0, 255);
  r.number("liveness.samples", c.liveness.samples, 2, 1000);
  std::int64_t spacing = c.liveness.spacing.count();
  r.number("liveness.spacing_seconds", spacing, 0, 86400);
  c.liveness.spacing = std::chrono::seconds{spacing};

  double height = c.distancing.assumed_height_ft;
  double distance = c.distancing.distance_ft;
  std::optional<double> threshold;
  r.number("distancing.assumed_height_ft", height, 0, kMax, true);
  r.number("distancing.distance_ft", distance, 0, kMax, true);
  if (const Json* t = r.find("distancing.violation_threshold"); t && !t->is_null()) {
    double v = 0;
    const std::size_t before = result.errors.size();
    r.number("distancing.violation_threshold", v, 0, kMax, true);
    if (result.errors.size() == before) threshold = v;
  }

  r.number("detection.confidence_threshold", c.confidence_threshold, 0, 1);
  r.string_set("scenes.people", c.people_scenes);
  r.string_set("scenes.vehicles", c.vehicle_scenes);
  if (c.people_scenes.empty()) result.warnings.push_back("scenes.people: empty, no camera will be counted for people");

  r.number("presentation.min_people", c.min_people, 0, kMax);
  r.number("presentation.min_vehicles", c.min_vehicles, 0, kMax);

  if (const Json* v = r.find("report.region_level")) {
    try {
      c.region_level = parse_region_level(v->is_string() ? v->get<std::string>() : std::string{});
    } catch (const InvalidInput&) {
      r.fail("report.region_level", "must be \"country\", \"state\" or \"city\"");
    }
  }
  if (const Json* v = r.find("report.week_starts")) {
    bool ok = v->is_array();
    std::vector<Date> starts;
    for (std::size_t i = 0; ok && i < v->size(); ++i) {
      ok = (*v)[i].is_string();
      if (!ok) break;
      try {
        starts.push_back(parse_date((*v)[i].get<std::string>()));
      } catch (const InvalidInput&) {
        ok = false;
      }
      ok = ok && (starts.size() < 2 || starts[starts.size() - 2] < starts.back());
    }
    if (ok) {
      c.week_starts = std::move(starts);
    } else {
      r.fail("report.week_starts", "must be a strictly increasing list of YYYY-MM-DD dates");
    }
  }

  r.number("eval.iou_threshold", c.iou_threshold, 0, 1, true);
  r.number("eval.operating_confidence", c.operating_confidence, 0, 1);

  if (result.errors.empty()) {
    c.distancing = DistancingConfig::make(height, distance, threshold);
    result.config = std::move(c);
  }
  return result;
}

ConfigValidation validate_config(const fs::path& path, const Environment& env) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read config '{}'", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  const Json doc = Json::parse(buf.str(), nullptr, false);
  if (doc.is_discarded()) {
    ConfigValidation v;
    v.errors.push_back("(root): not valid JSON");
    return v;
  }
  return validate_config(doc, fs::absolute(path).parent_path(), env);
}

PipelineConfig load_config(const fs::path& path, const Environment& env) {
  auto v = validate_config(path, env);
  if (!v.config) throw ConfigError(fmt::format("invalid config '{}'", path.string()), std::move(v.errors));
  return std::move(*v.config);
}

}  // namespace camwatch
