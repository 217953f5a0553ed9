#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "camwatch/distancing.hpp"

namespace camwatch {

// Undirected simple graph over the detected people of one frame; an edge
// joins each violating pair.
class ViolationGraph {
 public:
  ViolationGraph() = default;
  // Throws InvalidInput on an out-of-range endpoint, a self-loop or a
  // duplicate edge.
  ViolationGraph(std::size_t node_count, std::vector<std::pair<std::size_t, std::size_t>> edges);

  std::size_t node_count() const noexcept { return node_count_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const noexcept { return edges_; }
  const std::vector<std::vector<std::size_t>>& adjacency() const noexcept { return adjacency_; }

 private:
  std::size_t node_count_ = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;  // (a, b) with a < b
  std::vector<std::vector<std::size_t>> adjacency_;
};

ViolationGraph build_violation_graph(const ViolationReport& report);

// 1 + max degree (a hub together with its neighbours); 0 for no nodes.
std::size_t group_lower_bound(const ViolationGraph& g);
// Node count of the largest connected component; 0 for no nodes.
std::size_t group_upper_bound(const ViolationGraph& g);
GroupBounds group_bounds(const ViolationReport& report);

}  // namespace camwatch
