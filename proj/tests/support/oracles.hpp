#pragma once

// Independent reimplementations used as test oracles. They are written the
// slow, obvious way on purpose and share no code with the library.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "camwatch/analytics.hpp"
#include "camwatch/image.hpp"

namespace oracle {

// Changed-pixel count, channel by channel.
inline std::size_t changed_pixels(const camwatch::PixelImage& a, const camwatch::PixelImage& b, int tolerance) {
  std::size_t n = 0;
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      const auto p = a.at(x, y);
      const auto q = b.at(x, y);
      const int d[3] = {p.r - q.r, p.g - q.g, p.b - q.b};
      bool changed = false;
      for (int c : d) changed = changed || (c > tolerance || -c > tolerance);
      if (changed) ++n;
    }
  }
  return n;
}

inline double percent_difference(const camwatch::PixelImage& a, const camwatch::PixelImage& b, int tolerance) {
  return static_cast<double>(changed_pixels(a, b, tolerance)) / (static_cast<double>(a.width()) * a.height());
}

using Edges = std::vector<std::pair<std::size_t, std::size_t>>;

// 1 + the largest number of edges touching one node, counted from the edge list.
inline std::size_t hub_group(std::size_t n, const Edges& edges) {
  if (n == 0) return 0;
  std::size_t best = 0;
  for (std::size_t v = 0; v < n; ++v) {
    std::size_t deg = 0;
    for (const auto& [a, b] : edges) deg += (a == v || b == v) ? 1 : 0;
    best = std::max(best, deg);
  }
  return best + 1;
}

// Largest node subset that is connected, found by trying every subset.
inline std::size_t largest_connected_subset(std::size_t n, const Edges& edges) {
  std::size_t best = 0;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const auto size = static_cast<std::size_t>(__builtin_popcount(mask));
    if (size <= best) continue;
    const auto first = static_cast<std::size_t>(__builtin_ctz(mask));
    std::uint32_t reached = 1u << first;
    for (bool grew = true; grew;) {
      grew = false;
      for (const auto& [a, b] : edges) {
        const std::uint32_t ea = 1u << a, eb = 1u << b;
        if (!(mask & ea) || !(mask & eb)) continue;
        if ((reached & ea) && !(reached & eb)) reached |= eb, grew = true;
        if ((reached & eb) && !(reached & ea)) reached |= ea, grew = true;
      }
    }
    if (reached == mask) best = size;
  }
  return best;
}

struct RawCount {
  std::string camera;
  camwatch::Date date;
  std::uint64_t people;
  std::uint64_t vehicles;
};

// Region -> date -> (people, vehicles): for each region and date, the sum over
// the region's cameras of that camera's largest count that date.
inline std::map<std::string, std::map<camwatch::Date, std::pair<std::uint64_t, std::uint64_t>>> region_sums(
    const std::vector<RawCount>& raw, const std::map<std::string, std::string>& camera_region) {
  std::set<std::string> regions;
  std::set<std::string> cameras;
  std::set<camwatch::Date> dates;
  for (const auto& [c, r] : camera_region) regions.insert(r), cameras.insert(c);
  for (const auto& r : raw) dates.insert(r.date);
  std::map<std::string, std::map<camwatch::Date, std::pair<std::uint64_t, std::uint64_t>>> out;
  for (const auto& region : regions) {
    for (const auto& d : dates) {
      bool any = false;
      std::uint64_t ps = 0, vs = 0;
      for (const auto& c : cameras) {
        if (camera_region.at(c) != region) continue;
        std::optional<std::uint64_t> pm, vm;
        for (const auto& r : raw) {
          if (r.camera != c || r.date != d) continue;
          pm = std::max(pm.value_or(0), r.people);
          vm = std::max(vm.value_or(0), r.vehicles);
        }
        if (pm) {
          any = true;
          ps += *pm;
          vs += *vm;
        }
      }
      if (any) out[region][d] = {ps, vs};
    }
  }
  return out;
}

// Per window, the maxima of the daily points in [start_i, start_{i+1}).
inline std::vector<camwatch::SeriesPoint> weekly(const std::vector<camwatch::SeriesPoint>& daily,
                                                 const std::vector<camwatch::Date>& starts) {
  std::vector<camwatch::SeriesPoint> out;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    bool any = false;
    camwatch::SeriesPoint w{starts[i], 0, 0};
    for (const auto& p : daily) {
      if (p.date < starts[i]) continue;
      if (i + 1 < starts.size() && !(p.date < starts[i + 1])) continue;
      any = true;
      w.people = std::max(w.people, p.people);
      w.vehicles = std::max(w.vehicles, p.vehicles);
    }
    if (any) out.push_back(w);
  }
  return out;
}

// AP by brute force: precision and recall at every distinct confidence
// cut, then for each recall step the best precision reachable at or beyond it.
inline double average_precision(const std::vector<std::pair<double, bool>>& scored, std::size_t truth) {
  if (truth == 0) return 0.0;
  std::set<double> cuts;
  for (const auto& s : scored) cuts.insert(s.first);
  std::vector<std::pair<double, double>> pr;  // (recall, precision)
  for (double cut : cuts) {
    std::size_t kept = 0, tp = 0;
    for (const auto& [c, t] : scored) {
      if (c >= cut) ++kept, tp += t ? 1 : 0;
    }
    pr.emplace_back(static_cast<double>(tp) / truth, static_cast<double>(tp) / kept);
  }
  std::set<double> recalls;
  for (const auto& [r, p] : pr) recalls.insert(r);
  double ap = 0.0, prev = 0.0;
  for (double r : recalls) {
    double best = 0.0;
    for (const auto& [r2, p2] : pr) {
      if (r2 >= r) best = std::max(best, p2);
    }
    ap += (r - prev) * best;
    prev = r;
  }
  return ap;
}

}  // namespace oracle
