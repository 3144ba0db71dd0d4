#pragma once

#include "gcl/graph.hpp"

#include <string>

namespace fixtures {

using gcl::ClusteredDigraph;
using gcl::Edge;

inline std::string scenario_path(const std::string& name) {
  return std::string(GCL_SCENARIO_DIR) + "/" + name + ".json";
}

// Agents 1..4 of the files are 0..3 here.

/// Two 2-cycles; agent 1 feeds 3 and agent 2 feeds 4 with weight 0.5.
inline ClusteredDigraph g_toy() {
  return gcl::build_graph(4, {{0, 1}, {2, 3}},
                          {{1, 0, 1.0}, {0, 1, 1.0}, {3, 2, 1.0}, {2, 3, 1.0}, {0, 2, 0.5}, {1, 3, 0.5}});
}

/// Two singleton leaders feeding a 2-cycle.
inline ClusteredDigraph g_toy2() {
  return gcl::build_graph(4, {{0}, {1}, {2, 3}},
                          {{0, 2, 0.3}, {0, 3, 0.3}, {1, 2, 0.2}, {1, 3, 0.2}, {2, 3, 1.0}, {3, 2, 1.0}});
}

/// Cluster {3, 4} has no internal edges and no common ancestor.
inline ClusteredDigraph g_toy_broken() {
  return gcl::build_graph(4, {{0, 1}, {2, 3}}, {{1, 0, 1.0}, {0, 1, 1.0}, {2, 0, 0.5}, {3, 1, 0.5}});
}

/**
 * Ten agents in five pairs. Clusters 1 -> 2 -> 4 -> 1 form a cycle, cluster 3
 * is an isolated source, cluster 5 listens to clusters 1 and 3. Intra weights
 * 1, inter weights 0.1.
 */
inline ClusteredDigraph surrogate() {
  std::vector<Edge> edges;
  for (gcl::Index c = 0; c < 5; ++c) {
    edges.push_back({2 * c, 2 * c + 1, 1.0});
    edges.push_back({2 * c + 1, 2 * c, 1.0});
  }
  const int inter[][2] = {{1, 3}, {2, 4}, {3, 7}, {4, 8}, {7, 1}, {8, 2}, {1, 9}, {2, 10}, {5, 9}, {6, 10}};
  for (const auto& e : inter) edges.push_back({e[0] - 1, e[1] - 1, 0.1});
  return gcl::build_graph(10, {{0, 1}, {2, 3}, {4, 5}, {6, 7}, {8, 9}}, edges);
}

}  // namespace fixtures
