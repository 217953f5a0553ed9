#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "camwatch/analytics.hpp"
#include "camwatch/crawler.hpp"
#include "camwatch/distancing.hpp"
#include "camwatch/identification.hpp"
#include "camwatch/jsonl.hpp"

namespace camwatch {

struct PipelineConfig {
  // Paths, resolved against the config file's directory.
  std::optional<std::filesystem::path> seeds;
  std::optional<std::filesystem::path> archive_root;
  std::optional<std::filesystem::path> region_map;
  std::optional<std::filesystem::path> phase_labels;
  std::optional<std::filesystem::path> output_dir;

  int captures_per_day = 5;
  std::uint64_t schedule_seed = 0;
  std::size_t archive_parallelism = 4;
  std::chrono::seconds clip_duration{60};

  CrawlBudget crawl_budget;
  CrawlOptions crawl_options;
  LivenessConfig liveness;
  DistancingConfig distancing;

  double confidence_threshold = 0.3;
  std::set<std::string> people_scenes;  // no default: supply the list
  std::set<std::string> vehicle_scenes = {"highway", "road"};

  std::uint64_t min_people = kDefaultMinPeople;
  std::uint64_t min_vehicles = kDefaultMinVehicles;
  RegionLevel region_level = RegionLevel::Country;
  std::vector<Date> week_starts;  // empty: every 7 days from each series' start

  double iou_threshold = 0.5;
  double operating_confidence = 0.3;
};

struct ConfigValidation {
  std::optional<PipelineConfig> config;  // set iff errors is empty
  std::vector<std::string> errors;       // "field.path: problem"
  std::vector<std::string> warnings;
};

using Environment = std::map<std::string, std::string>;

inline constexpr const char* kEnvPrefix = "CAMWATCH_";

// The process environment restricted to kEnvPrefix variables.
Environment prefixed_environment();

// Checks a parsed config document. Environment entries such as
// CAMWATCH_LIVENESS__MIN_PERCENT=0.01 override the key liveness.min_percent;
// values are read as JSON, falling back to a plain string. Unknown keys are
// warnings.
ConfigValidation validate_config(const Json& document, const std::filesystem::path& base_dir, const Environment& env = {});

// Reads and validates a JSON config file. Throws IoError when unreadable.
ConfigValidation validate_config(const std::filesystem::path& path, const Environment& env = {});

// validate_config, throwing ConfigError with every problem on failure.
PipelineConfig load_config(const std::filesystem::path& path, const Environment& env = {});

}  // namespace camwatch
