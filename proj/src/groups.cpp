#include "camwatch/groups.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "camwatch/error.hpp"

namespace camwatch {

ViolationGraph::ViolationGraph(std::size_t node_count, std::vector<std::pair<std::size_t, std::size_t>> edges)
    : node_count_(node_count), adjacency_(node_count) {
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (auto [a, b] : edges) {
    if (a >= node_count || b >= node_count) throw InvalidInput(fmt::format("edge ({}, {}) outside {} nodes", a, b, node_count));
    if (a == b) throw InvalidInput(fmt::format("self-loop on node {}", a));
    if (a > b) std::swap(a, b);
    if (!seen.insert({a, b}).second) throw InvalidInput(fmt::format("duplicate edge ({}, {})", a, b));
    edges_.emplace_back(a, b);
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
  }
}

ViolationGraph build_violation_graph(const ViolationReport& report) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (const auto& p : report.pairs) {
    if (p.violation) edges.emplace_back(p.index_a, p.index_b);
  }
  return ViolationGraph(report.person_count, std::move(edges));
}

std::size_t group_lower_bound(const ViolationGraph& g) {
  if (g.node_count() == 0) return 0;
  std::size_t max_degree = 0;
  for (const auto& adj : g.adjacency()) max_degree = std::max(max_degree, adj.size());
  return max_degree + 1;
}

std::size_t group_upper_bound(const ViolationGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::size_t> parent(n);
  std::vector<std::size_t> size(n, 1);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [a, b] : g.edges()) {
    std::size_t ra = find(a), rb = find(b);
    if (ra == rb) continue;
    if (size[ra] < size[rb]) std::swap(ra, rb);
    parent[rb] = ra;
    size[ra] += size[rb];
  }
  std::size_t best = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (find(v) == v) best = std::max(best, size[v]);
  }
  return best;
}

GroupBounds group_bounds(const ViolationReport& report) {
  const ViolationGraph g = build_violation_graph(report);
  return {group_lower_bound(g), group_upper_bound(g)};
}

}  // namespace camwatch
