#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "camwatch/detections.hpp"
#include "camwatch/distancing.hpp"
#include "camwatch/jsonl.hpp"
#include "camwatch/time.hpp"

namespace camwatch {

struct DailyCameraStat {
  std::string camera_id;
  Date date{};
  std::size_t max_people = 0;
  std::size_t max_vehicles = 0;
  std::size_t observations = 0;

  friend bool operator==(const DailyCameraStat&, const DailyCameraStat&) = default;
};

// One stat per (camera, UTC date) seen; sorted by (camera_id, date).
std::vector<DailyCameraStat> daily_camera_max(std::span<const Observation> observations);

struct RegionInfo {
  std::string country;
  std::string state;
  std::string city;
};

enum class RegionLevel { Country, State, City };

using RegionMap = std::map<std::string, RegionInfo>;

// CSV with header camera_id,country,state,city. Throws IoError/SchemaError.
RegionMap load_region_map(const std::filesystem::path& path);

// "US", "US/IN", "US/Chicago"; empty when the level's field is blank.
std::string region_key(const RegionInfo& info, RegionLevel level);
RegionLevel parse_region_level(std::string_view text);

struct SeriesPoint {
  Date date{};
  std::uint64_t people = 0;
  std::uint64_t vehicles = 0;

  friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

struct RegionSeries {
  std::string region;
  std::vector<SeriesPoint> points;  // strictly increasing dates

  friend bool operator==(const RegionSeries&, const RegionSeries&) = default;
};

struct RegionSums {
  std::vector<RegionSeries> series;       // sorted by region
  std::vector<std::string> unmapped;      // camera ids without a region
};

// Per region and date, the sum of the daily camera maxima of the cameras
// that reported that date. Dates without data are omitted.
RegionSums region_daily_sum(std::span<const DailyCameraStat> stats, const RegionMap& regions,
                            RegionLevel level = RegionLevel::Country);

// Windows [start_i, start_{i+1}), the last one open-ended; each window's
// point is dated at its start and holds the per-metric maxima. Empty windows
// and dates before the first start are dropped. Throws InvalidInput unless
// the boundaries strictly increase.
RegionSeries weekly_max(const RegionSeries& series, std::span<const Date> week_starts);

// Every 7 days from first through last, inclusive of the window holding last.
std::vector<Date> default_week_starts(Date first, Date last);

struct PresentedSeries {
  RegionSeries series;
  bool show_people = false;
  bool show_vehicles = false;
};

inline constexpr std::uint64_t kDefaultMinPeople = 40;
inline constexpr std::uint64_t kDefaultMinVehicles = 50;

// Keeps a region's people series iff its all-time maximum reaches
// min_people, likewise vehicles; values pass through untouched. Regions with
// neither series retained are dropped.
std::vector<PresentedSeries> presentation_filter(std::span<const RegionSeries> series,
                                                 std::uint64_t min_people = kDefaultMinPeople,
                                                 std::uint64_t min_vehicles = kDefaultMinVehicles);

struct HistogramBin {
  std::uint64_t start = 0;  // inclusive
  std::uint64_t end = 0;    // exclusive
  std::uint64_t count = 0;
};

// Zero values are tallied apart from the bins; unit bins cover 1..100 and
// larger values land in overflow.
struct Histogram {
  std::string name;
  std::uint64_t zero_count = 0;
  std::vector<HistogramBin> bins;
  std::uint64_t overflow = 0;

  std::uint64_t total() const noexcept;
  std::uint64_t range_count(std::uint64_t first, std::uint64_t last) const noexcept;  // inclusive value range
};

inline constexpr std::uint64_t kHistogramMax = 100;

Histogram build_histogram(std::string name, std::span<const std::uint64_t> values);

struct HistogramSet {
  Histogram people;
  Histogram violating_people;
  Histogram group_lower;
  Histogram group_upper;
};

HistogramSet build_histograms(std::span<const std::uint64_t> people, std::span<const std::uint64_t> violating_people,
                              std::span<const GroupBounds> groups);

// Phase labels: CSV "start_date,label"; a label holds until the next start.
struct PhaseLabels {
  std::vector<std::pair<Date, std::string>> starts;  // ascending
  std::string label_for(Date d) const;
};
PhaseLabels load_phase_labels(const std::filesystem::path& path);

struct ReportData {
  std::vector<RegionSeries> daily;
  std::vector<RegionSeries> weekly;
  std::vector<PresentedSeries> presented;  // weekly resolution
  HistogramSet histograms;
  PhaseLabels phases;
};

struct ManifestEntry {
  std::string path;  // relative to the output directory, '/' separated
  std::uintmax_t bytes = 0;
  std::string sha256;
};

struct Manifest {
  std::vector<ManifestEntry> files;  // sorted by path
  Timestamp generated_at{};
};

// File-name-safe form of a region key.
std::string region_slug(std::string_view region);

// Writes regions/<slug>.csv and regions/<slug>_weekly.csv
// (date,people_sum,vehicles_sum), scatter/<slug>.csv
// (date,people_sum,vehicles_sum,phase_label), histograms/<name>.csv
// (bin_start,bin_end,count), SVG plots under plots/, and manifest.json.
// Everything except manifest.json's generated_at is a pure function of data.
// Throws IoError.
Manifest emit_reports(const ReportData& data, const std::filesystem::path& out_dir, Timestamp generated_at);

Json to_json(const Manifest& m);
Json to_json(const DailyCameraStat& s);

}  // namespace camwatch
