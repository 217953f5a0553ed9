#include "camwatch/analytics.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "camwatch/csv.hpp"
#include "camwatch/digest.hpp"
#include "camwatch/error.hpp"
#include "camwatch/svg.hpp"

namespace camwatch {

namespace fs = std::filesystem;

std::vector<DailyCameraStat> daily_camera_max(std::span<const Observation> observations) {
  std::map<std::pair<std::string, Date>, DailyCameraStat> acc;
  for (const auto& o : observations) {
    const Date d = date_of(o.captured_at);
    auto& s = acc[{o.camera_id, d}];
    s.camera_id = o.camera_id;
    s.date = d;
    s.max_people = std::max(s.max_people, o.people);
    s.max_vehicles = std::max(s.max_vehicles, o.vehicles);
    ++s.observations;
  }
  std::vector<DailyCameraStat> out;
  out.reserve(acc.size());
  for (auto& [key, s] : acc) out.push_back(std::move(s));
  return out;
}

RegionMap load_region_map(const fs::path& path) {
  const auto rows = read_csv(path);
  if (rows.empty()) throw SchemaError(fmt::format("{}: empty region map", path.string()));
  const CsvRow expected = {"camera_id", "country", "state", "city"};
  std::size_t first = 0;
  if (!rows[0].empty() && rows[0][0] == "camera_id") {
    if (rows[0] != expected) throw SchemaError(fmt::format("{}: header must be camera_id,country,state,city", path.string()));
    first = 1;
  }
  RegionMap map;
  for (std::size_t i = first; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 4) throw SchemaError(fmt::format("{}: row {} has {} fields, expected 4", path.string(), i + 1, r.size()));
    if (r[0].empty()) throw SchemaError(fmt::format("{}: row {} has an empty camera_id", path.string(), i + 1));
    map[r[0]] = RegionInfo{r[1], r[2], r[3]};
  }
  return map;
}

std::string region_key(const RegionInfo& info, RegionLevel level) {
  if (info.country.empty()) return {};
  switch (level) {
    case RegionLevel::Country:
      return info.country;
    case RegionLevel::State:
      return info.state.empty() ? std::string{} : info.country + "/" + info.state;
    case RegionLevel::City:
      return info.city.empty() ? std::string{} : info.country + "/" + info.city;
  }
  return {};
}

RegionLevel parse_region_level(std::string_view text) {
  if (text == "country") return RegionLevel::Country;
  if (text == "state") return RegionLevel::State;
  if (text == "city") return RegionLevel::City;
  throw InvalidInput(fmt::format("region level must be country, state or city, got '{}'", text));
}

RegionSums region_daily_sum(std::span<const DailyCameraStat> stats, const RegionMap& regions, RegionLevel level) {
  std::map<std::string, std::map<Date, SeriesPoint>> acc;
  std::set<std::string> unmapped;
  for (const auto& s : stats) {
    const auto it = regions.find(s.camera_id);
    const std::string key = it == regions.end() ? std::string{} : region_key(it->second, level);
    if (key.empty()) {
      unmapped.insert(s.camera_id);
      continue;
    }
    auto& p = acc[key][s.date];
    p.date = s.date;
    p.people += s.max_people;
    p.vehicles += s.max_vehicles;
  }
  RegionSums out;
  for (auto& [region, points] : acc) {
    RegionSeries series{region, {}};
    for (auto& [d, p] : points) series.points.push_back(p);
    out.series.push_back(std::move(series));
  }
  out.unmapped.assign(unmapped.begin(), unmapped.end());
  return out;
}

RegionSeries weekly_max(const RegionSeries& series, std::span<const Date> week_starts) {
  for (std::size_t i = 1; i < week_starts.size(); ++i) {
    if (!(week_starts[i - 1] < week_starts[i])) throw InvalidInput("week boundaries must strictly increase");
  }
  RegionSeries out{series.region, {}};
  for (const auto& p : series.points) {
    const auto it = std::upper_bound(week_starts.begin(), week_starts.end(), p.date);
    if (it == week_starts.begin()) continue;
    const Date start = *std::prev(it);
    if (out.points.empty() || out.points.back().date != start) out.points.push_back({start, 0, 0});
    auto& w = out.points.back();
    w.people = std::max(w.people, p.people);
    w.vehicles = std::max(w.vehicles, p.vehicles);
  }
  return out;
}

std::vector<Date> default_week_starts(Date first, Date last) {
  std::vector<Date> out;
  for (Date d = first; d <= last; d += std::chrono::days{7}) out.push_back(d);
  return out;
}

std::vector<PresentedSeries> presentation_filter(std::span<const RegionSeries> series, std::uint64_t min_people,
                                                 std::uint64_t min_vehicles) {
  std::vector<PresentedSeries> out;
  for (const auto& s : series) {
    std::uint64_t max_people = 0, max_vehicles = 0;
    for (const auto& p : s.points) {
      max_people = std::max(max_people, p.people);
      max_vehicles = std::max(max_vehicles, p.vehicles);
    }
    PresentedSeries ps{s, !s.points.empty() && max_people >= min_people, !s.points.empty() && max_vehicles >= min_vehicles};
    if (ps.show_people || ps.show_vehicles) out.push_back(std::move(ps));
  }
  return out;
}

std::uint64_t Histogram::total() const noexcept {
  std::uint64_t t = zero_count + overflow;
  for (const auto& b : bins) t += b.count;
  return t;
}

std::uint64_t Histogram::range_count(std::uint64_t first, std::uint64_t last) const noexcept {
  std::uint64_t t = 0;
  if (first == 0) t += zero_count;
  for (const auto& b : bins) {
    if (b.start >= first && b.end - 1 <= last) t += b.count;
  }
  if (last > kHistogramMax) t += overflow;
  return t;
}

Histogram build_histogram(std::string name, std::span<const std::uint64_t> values) {
  Histogram h;
  h.name = std::move(name);
  for (std::uint64_t k = 1; k <= kHistogramMax; ++k) h.bins.push_back({k, k + 1, 0});
  for (const auto v : values) {
    if (v == 0) {
      ++h.zero_count;
    } else if (v > kHistogramMax) {
      ++h.overflow;
    } else {
      ++h.bins[v - 1].count;
    }
  }
  return h;
}

HistogramSet build_histograms(std::span<const std::uint64_t> people, std::span<const std::uint64_t> violating_people,
                              std::span<const GroupBounds> groups) {
  std::vector<std::uint64_t> lower, upper;
  for (const auto& g : groups) {
    lower.push_back(g.lower);
    upper.push_back(g.upper);
  }
  return {build_histogram("people", people), build_histogram("violating_people", violating_people),
          build_histogram("group_lower", lower), build_histogram("group_upper", upper)};
}

std::string PhaseLabels::label_for(Date d) const {
  std::string label;
  for (const auto& [start, name] : starts) {
    if (start <= d) label = name;
  }
  return label;
}

PhaseLabels load_phase_labels(const fs::path& path) {
  PhaseLabels phases;
  const auto rows = read_csv(path);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (i == 0 && !r.empty() && r[0] == "start_date") continue;
    if (r.size() != 2) throw SchemaError(fmt::format("{}: row {} must be start_date,label", path.string(), i + 1));
    try {
      phases.starts.emplace_back(parse_date(r[0]), r[1]);
    } catch (const InvalidInput& e) {
      throw SchemaError(fmt::format("{}: row {}: {}", path.string(), i + 1, e.what()));
    }
  }
  std::stable_sort(phases.starts.begin(), phases.starts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return phases;
}

std::string region_slug(std::string_view region) {
  std::string out;
  for (unsigned char c : region) {
    if (std::isalnum(c) || c == '-' || c == '_') {
      out.push_back(static_cast<char>(c));
    } else if (c == '/') {
      out.push_back('_');
    } else {
      out.push_back('-');
    }
  }
  return out.empty() ? "unnamed" : out;
}

namespace {

class ReportWriter {
 public:
  explicit ReportWriter(fs::path root) : root_(std::move(root)) {}

  void write(const std::string& rel, const std::string& content) {
    const fs::path p = root_ / rel;
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
    if (ec) throw IoError(fmt::format("cannot create '{}': {}", p.parent_path().string(), ec.message()));
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot write '{}'", p.string()));
    out << content;
    out.flush();
    if (!out) throw IoError(fmt::format("write failure on '{}'", p.string()));
    if (!written_.insert(rel).second) throw IoError(fmt::format("report file '{}' written twice", rel));
    entries_.push_back({rel, content.size(), sha256_hex(content)});
  }

  std::vector<ManifestEntry> take_entries() {
    std::sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
    return std::move(entries_);
  }

 private:
  fs::path root_;
  std::set<std::string> written_;
  std::vector<ManifestEntry> entries_;
};

std::string series_csv(const RegionSeries& s) {
  std::string out = csv_line({"date", "people_sum", "vehicles_sum"});
  for (const auto& p : s.points) out += csv_line({format_date(p.date), std::to_string(p.people), std::to_string(p.vehicles)});
  return out;
}

std::string histogram_csv(const Histogram& h) {
  std::string out = csv_line({"bin_start", "bin_end", "count"});
  out += csv_line({"0", "1", std::to_string(h.zero_count)});
  for (const auto& b : h.bins) out += csv_line({std::to_string(b.start), std::to_string(b.end), std::to_string(b.count)});
  out += csv_line({std::to_string(kHistogramMax + 1), "inf", std::to_string(h.overflow)});
  return out;
}

std::string histogram_svg(const Histogram& h, std::uint64_t first, std::uint64_t last) {
  std::vector<std::string> labels;
  std::vector<double> values;
  for (const auto& b : h.bins) {
    if (b.start < first || b.start > last) continue;
    labels.push_back(std::to_string(b.start));
    values.push_back(static_cast<double>(b.count));
  }
  return svg::bar_chart(fmt::format("{} ({}-{})", h.name, first, last), labels, values);
}

}  // namespace

Manifest emit_reports(const ReportData& data, const fs::path& out_dir, Timestamp generated_at) {
  ReportWriter w(out_dir);
  for (const auto& s : data.daily) {
    const std::string slug = region_slug(s.region);
    w.write("regions/" + slug + ".csv", series_csv(s));

    std::string scatter = csv_line({"date", "people_sum", "vehicles_sum", "phase_label"});
    std::vector<svg::ScatterPoint> points;
    for (const auto& p : s.points) {
      const std::string label = data.phases.label_for(p.date);
      scatter += csv_line({format_date(p.date), std::to_string(p.people), std::to_string(p.vehicles), label});
      points.push_back({static_cast<double>(p.vehicles), static_cast<double>(p.people), label});
    }
    w.write("scatter/" + slug + ".csv", scatter);
    w.write("plots/" + slug + "_scatter.svg", svg::scatter_plot(s.region + ": people vs vehicles", "vehicles", "people", points));
  }
  for (const auto& s : data.weekly) w.write("regions/" + region_slug(s.region) + "_weekly.csv", series_csv(s));
  for (const auto& ps : data.presented) {
    std::vector<std::string> x;
    svg::Series people{"people (weekly max)", "#1f77b4", {}};
    svg::Series vehicles{"vehicles (weekly max)", "#d62728", {}};
    for (const auto& p : ps.series.points) {
      x.push_back(format_date(p.date));
      people.values.push_back(static_cast<double>(p.people));
      vehicles.values.push_back(static_cast<double>(p.vehicles));
    }
    std::vector<svg::Series> lines;
    if (ps.show_people) lines.push_back(std::move(people));
    if (ps.show_vehicles) lines.push_back(std::move(vehicles));
    w.write("plots/" + region_slug(ps.series.region) + "_weekly.svg", svg::line_plot(ps.series.region, x, lines));
  }
  for (const Histogram* h : {&data.histograms.people, &data.histograms.violating_people, &data.histograms.group_lower,
                             &data.histograms.group_upper}) {
    w.write("histograms/" + h->name + ".csv", histogram_csv(*h));
    w.write("plots/" + h->name + "_1-10.svg", histogram_svg(*h, 1, 10));
    w.write("plots/" + h->name + "_11-100.svg", histogram_svg(*h, 11, 100));
  }

  Manifest m;
  m.files = w.take_entries();
  m.generated_at = generated_at;
  const fs::path manifest_path = out_dir / "manifest.json";
  std::ofstream out(manifest_path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write '{}'", manifest_path.string()));
  out << to_json(m).dump(2) << '\n';
  if (!out) throw IoError(fmt::format("write failure on '{}'", manifest_path.string()));
  return m;
}

Json to_json(const Manifest& m) {
  Json files = Json::array();
  for (const auto& f : m.files) files.push_back({{"path", f.path}, {"bytes", f.bytes}, {"sha256", f.sha256}});
  return {{"generated_at", format_rfc3339(m.generated_at)}, {"files", files}};
}

Json to_json(const DailyCameraStat& s) {
  return {{"camera_id", s.camera_id},
          {"date", format_date(s.date)},
          {"max_people", s.max_people},
          {"max_vehicles", s.max_vehicles},
          {"observations", s.observations}};
}

}  // namespace camwatch
