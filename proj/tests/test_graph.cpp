#include "fixtures.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace gcl;

namespace {

// Independent reachability on an edge list: from -> to means `to` hears `from`.
std::set<Index> bfs(const std::vector<std::pair<Index, Index>>& arcs, Index start) {
  std::set<Index> seen{start};
  std::vector<Index> frontier{start};
  while (!frontier.empty()) {
    const Index v = frontier.back();
    frontier.pop_back();
    for (const auto& [from, to] : arcs) {
      if (from == v && seen.insert(to).second) frontier.push_back(to);
    }
  }
  return seen;
}

std::vector<std::pair<Index, Index>> arcs_of(const Eigen::MatrixXd& w) {
  std::vector<std::pair<Index, Index>> arcs;
  for (Index l = 0; l < w.rows(); ++l) {
    for (Index k = 0; k < w.cols(); ++k) {
      if (w(l, k) > 0.0) arcs.emplace_back(k, l);
    }
  }
  return arcs;
}

// Smallest number of roots whose reachable sets cover every node.
Index brute_force_forest(const Eigen::MatrixXd& w) {
  const Index n = w.rows();
  const auto arcs = arcs_of(w);
  std::vector<std::set<Index>> reach;
  for (Index v = 0; v < n; ++v) reach.push_back(bfs(arcs, v));
  for (Index k = 1; k <= n; ++k) {
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      if (__builtin_popcount(mask) != k) continue;
      std::set<Index> covered;
      for (Index v = 0; v < n; ++v) {
        if (mask & (1u << v)) covered.insert(reach[v].begin(), reach[v].end());
      }
      if (static_cast<Index>(covered.size()) == n) return k;
    }
  }
  return n;
}

Eigen::MatrixXd random_digraph(std::mt19937_64& rng, Index n, double p) {
  std::bernoulli_distribution edge(p);
  std::uniform_real_distribution<double> weight(0.1, 1.0);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (Index l = 0; l < n; ++l) {
    for (Index k = 0; k < n; ++k) {
      if (l != k && edge(rng)) w(l, k) = weight(rng);
    }
  }
  return w;
}

}  // namespace

TEST_CASE("G_toy Laplacian rows") {
  Eigen::MatrixXd expected(4, 4);
  expected << 1, -1, 0, 0, -1, 1, 0, 0, -0.5, 0, 1.5, -1, 0, -0.5, -1, 1.5;
  const Eigen::MatrixXd lap = laplacian(fixtures::g_toy()).matrix();
  CHECK(lap.isApprox(expected, 1e-15));
  CHECK(lap.rowwise().sum().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("laplacian_of works on other scalar types") {
  Eigen::Matrix3f w;
  w << 0, 1, 0, 0, 0, 2, 3, 0, 0;
  const Eigen::MatrixXf lap = laplacian_of(w);
  CHECK(lap(0, 0) == 1.0f);
  CHECK(lap(1, 2) == -2.0f);
  CHECK(lap(2, 2) == 3.0f);
}

TEST_CASE("build_graph validation") {
  CHECK_THROWS_AS(build_graph(3, {{0, 1}, {2}}, {{0, 1, 1.0}}), GraphError);               // not connected
  CHECK_THROWS_AS(build_graph(2, {{0, 1}}, {{0, 1, -1.0}}), GraphError);                   // negative weight
  CHECK_THROWS_AS(build_graph(2, {{0, 1}}, {{0, 0, 1.0}}), GraphError);                    // self-loop
  CHECK_THROWS_AS(build_graph(2, {{0, 1}}, {{0, 1, 1.0}, {0, 1, 2.0}}), GraphError);       // duplicate
  CHECK_THROWS_AS(build_graph(3, {{0, 1}, {1, 2}}, {{0, 1, 1.0}, {1, 2, 1.0}}), GraphError);  // overlap
  CHECK_THROWS_AS(build_graph(3, {{0, 1}}, {{0, 1, 1.0}}), GraphError);                    // agent missing
  CHECK_THROWS_AS(build_graph(2, {{0, 1}, {}}, {{0, 1, 1.0}}), GraphError);                // empty cluster
  CHECK_THROWS_AS(build_graph(2, {{0, 5}}, {{0, 1, 1.0}}), GraphError);                    // out of range
  CHECK_NOTHROW(build_graph(1, {{0}}, {}));
}

TEST_CASE("clusters are relabeled to a contiguous layout") {
  // Clusters {0, 2} and {1, 3}; edge 0 -> 1 in caller numbering.
  const ClusteredDigraph g = build_graph(4, {{2, 0}, {3, 1}}, {{0, 1, 0.5}, {2, 3, 0.5}, {0, 2, 1.0}, {1, 3, 1.0}});
  CHECK(g.relabeled());
  CHECK(g.cluster_offset(1) == 2);
  for (Index original = 0; original < 4; ++original) {
    CHECK(g.original_ids()[g.internal_index(original)] == original);
  }
  CHECK(g.weights()(g.internal_index(1), g.internal_index(0)) == 0.5);
  CHECK(g.cluster_of(g.internal_index(3)) == 1);
}

TEST_CASE("reachability and ancestors on G_toy") {
  const ClusteredDigraph g = fixtures::g_toy();
  CHECK(reachable_set(g, 0).members == std::vector<Index>{0, 1, 2, 3});
  CHECK(reachable_set(g, 2).members == std::vector<Index>{2, 3});
  CHECK(ancestors(g.weights(), 2).members == std::vector<Index>{0, 1, 2, 3});
  CHECK(ancestors(g.weights(), 0).members == std::vector<Index>{0, 1});
  CHECK(common_ancestors(g.weights(), {2, 3}).members == std::vector<Index>{0, 1, 2, 3});
}

TEST_CASE("condensation numbers components by smallest member") {
  const Condensation c = condensation(fixtures::g_toy2());
  REQUIRE(c.component_count() == 3);
  CHECK(c.components[2] == std::vector<Index>{2, 3});
  CHECK(c.sources() == std::vector<Index>{0, 1});
}

TEST_CASE("spanning forest size matches brute force") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const Index n = 1 + static_cast<Index>(trial % 8);
    const Eigen::MatrixXd w = random_digraph(rng, n, 0.1 + 0.05 * (trial % 10));
    CHECK(min_spanning_forest_size(w) == brute_force_forest(w));
  }
  CHECK(min_spanning_forest_size(fixtures::g_toy()) == 1);
  CHECK(min_spanning_forest_size(fixtures::g_toy2()) == 2);
}

TEST_CASE("cluster spanning trees match the definition") {
  std::mt19937_64 rng(12);
  int checked = 0;
  for (int trial = 0; trial < 400 && checked < 200; ++trial) {
    const Index n = 2 + static_cast<Index>(trial % 6);
    const Eigen::MatrixXd w = random_digraph(rng, n, 0.3);
    if (!weakly_connected(w)) continue;
    std::vector<Index> sizes;
    for (Index left = n; left > 0;) {
      const Index s = std::min<Index>(left, 1 + static_cast<Index>(rng() % 3));
      sizes.push_back(s);
      left -= s;
    }
    const ClusteredDigraph g = build_graph(w, sizes);
    const auto arcs = arcs_of(w);
    bool expected = true;
    for (Index i = 0; i < g.cluster_count(); ++i) {
      bool any = false;
      for (Index v = 0; v < n && !any; ++v) {
        const std::set<Index> r = bfs(arcs, v);
        bool covers = true;
        for (Index m : g.cluster_members(i)) covers &= r.count(m) > 0;
        any = covers;
      }
      expected &= any;
    }
    const ClusterSpanningTrees t = has_cluster_spanning_trees(g);
    CHECK(t.holds == expected);
    for (Index i = 0; i < g.cluster_count(); ++i) {
      if (!t.roots[i]) continue;
      const std::set<Index> r = bfs(arcs, *t.roots[i]);
      for (Index m : g.cluster_members(i)) CHECK(r.count(m) == 1);
    }
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("cluster spanning tree witnesses on the fixtures") {
  const ClusterSpanningTrees toy = has_cluster_spanning_trees(fixtures::g_toy());
  CHECK(toy.holds);
  CHECK(toy.roots[0] == Index{0});
  CHECK(toy.roots[1] == Index{0});

  // Without 3 -> 4 agent 2 still reaches 4, and agent 1 reaches 3.
  const ClusteredDigraph cut =
      build_graph(4, {{0, 1}, {2, 3}}, {{1, 0, 1.0}, {0, 1, 1.0}, {3, 2, 1.0}, {0, 2, 0.5}, {1, 3, 0.5}});
  CHECK(has_cluster_spanning_trees(cut).holds);
  const ClusterSpanningTrees broken = has_cluster_spanning_trees(fixtures::g_toy_broken());
  CHECK_FALSE(broken.holds);
  CHECK_FALSE(broken.roots[1].has_value());

  const ClusteredDigraph singles = build_graph(3, {{0}, {1}, {2}}, {{0, 1, 1.0}, {2, 1, 1.0}});
  const ClusterSpanningTrees s = has_cluster_spanning_trees(singles);
  CHECK(s.holds);
  // Roots may sit outside their cluster; a singleton always reaches itself.
  for (Index i = 0; i < 3; ++i) {
    REQUIRE(s.roots[i].has_value());
    CHECK(*s.roots[i] <= i);
  }
}

TEST_CASE("random generator is deterministic and connected") {
  RandomGraphParams p;
  p.cluster_sizes = {3, 2, 4};
  const ClusteredDigraph a = random_eep_graph(p, 99);
  const ClusteredDigraph b = random_eep_graph(p, 99);
  CHECK(a.weights() == b.weights());
  CHECK(weakly_connected(a.weights()));
  CHECK_FALSE(random_eep_graph(p, 100).weights() == a.weights());

  p.cluster_sizes = {4};
  const ClusteredDigraph single = random_eep_graph(p, 3);
  CHECK(single.cluster_count() == 1);

  p.cluster_sizes = {2, 0};
  CHECK_THROWS_AS(random_eep_graph(p, 1), GraphError);
  p.cluster_sizes = {1, 1, 1};
  p.inter_density = 0.01;
  p.max_attempts = 3;
  CHECK_THROWS_AS(random_eep_graph(p, 5), GraphError);
}

TEST_CASE("adding an edge never shrinks a reachable set") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd w = random_digraph(rng, 6, 0.25);
    const Index from = static_cast<Index>(rng() % 6), to = (from + 1 + static_cast<Index>(rng() % 5)) % 6;
    Eigen::MatrixXd more = w;
    more(to, from) = 1.0;
    for (Index v = 0; v < 6; ++v) CHECK(reachable_set(more, v).includes(reachable_set(w, v)));
  }
}
