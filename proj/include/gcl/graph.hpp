#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace gcl {

using Index = Eigen::Index;

class GraphError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A weighted link carrying information from agent `from` to agent `to`.
/// It is stored as w(to, from) in the weight matrix.
struct Edge {
  Index from;
  Index to;
  double weight;
};

/// Sorted set of node indices.
struct NodeSet {
  std::vector<Index> members;

  bool contains(Index v) const;
  bool includes(const NodeSet& other) const;
  std::size_t size() const { return members.size(); }
  bool empty() const { return members.empty(); }
  bool operator==(const NodeSet&) const = default;
};

/**
 * Nonnegative weighted digraph whose agents are split into clusters.
 *
 * Agents are stored in a contiguous cluster layout: cluster i occupies
 * internal indices [offset(i), offset(i) + size(i)). `original_ids()` maps each
 * internal index back to the index the caller used when building the graph.
 * Weight w(l, k) > 0 means agent k influences agent l.
 */
class ClusteredDigraph {
 public:
  Index agent_count() const { return weights_.rows(); }
  Index cluster_count() const { return static_cast<Index>(sizes_.size()); }
  Index cluster_size(Index i) const { return sizes_.at(i); }
  Index cluster_offset(Index i) const { return offsets_.at(i); }
  Index cluster_of(Index agent) const { return cluster_of_.at(agent); }
  const std::vector<Index>& cluster_sizes() const { return sizes_; }
  std::vector<Index> cluster_members(Index i) const;

  const Eigen::MatrixXd& weights() const { return weights_; }
  std::vector<Edge> edges() const;

  const std::vector<Index>& original_ids() const { return original_ids_; }
  Index internal_index(Index original) const { return internal_of_.at(original); }
  bool relabeled() const;

 private:
  friend ClusteredDigraph make_clustered_digraph(Eigen::MatrixXd, std::vector<Index>,
                                                 std::vector<Index>);

  Eigen::MatrixXd weights_;
  std::vector<Index> sizes_;
  std::vector<Index> offsets_;
  std::vector<Index> cluster_of_;
  std::vector<Index> original_ids_;
  std::vector<Index> internal_of_;
};

/// Validates and builds a graph from 0-based clusters and edges. Clusters may
/// list agents in any order; the result is relabeled to the contiguous layout.
ClusteredDigraph build_graph(Index agent_count, const std::vector<std::vector<Index>>& clusters,
                             const std::vector<Edge>& edges);

/// Builds a graph already in contiguous layout from a weight matrix.
ClusteredDigraph build_graph(const Eigen::MatrixXd& weights, const std::vector<Index>& cluster_sizes);

// Internal constructor shared by the builders; performs full validation.
ClusteredDigraph make_clustered_digraph(Eigen::MatrixXd weights, std::vector<Index> sizes,
                                        std::vector<Index> original_ids);

/// Laplacian of an adjacency matrix: l_kk = sum_j w_kj, l_kj = -w_kj.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> laplacian_of(
    const Eigen::MatrixBase<Derived>& weights) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> lap = -weights;
  for (Index r = 0; r < lap.rows(); ++r) {
    lap(r, r) = Scalar(0);
    Scalar diag(0);
    for (Index c = 0; c < lap.cols(); ++c) {
      if (c != r) diag -= lap(r, c);
    }
    lap(r, r) = diag;
  }
  return lap;
}

/// Laplacian with the cluster block grid attached.
class Laplacian {
 public:
  Laplacian(Eigen::MatrixXd entries, std::vector<Index> sizes);

  const Eigen::MatrixXd& matrix() const { return entries_; }
  Index size() const { return entries_.rows(); }
  Index block_count() const { return static_cast<Index>(sizes_.size()); }
  Eigen::Block<const Eigen::MatrixXd> block(Index i, Index j) const;

 private:
  Eigen::MatrixXd entries_;
  std::vector<Index> sizes_;
  std::vector<Index> offsets_;
};

Laplacian laplacian(const ClusteredDigraph& g);

// Connectivity on a raw adjacency matrix (w(l, k) > 0 means k -> l).

NodeSet reachable_set(const Eigen::MatrixXd& weights, Index node);
NodeSet ancestors(const Eigen::MatrixXd& weights, Index node);
/// Nodes that reach every node of `targets` (each node counts as reaching itself).
NodeSet common_ancestors(const Eigen::MatrixXd& weights, const std::vector<Index>& targets);
bool weakly_connected(const Eigen::MatrixXd& weights);

/// Strongly connected components and the DAG between them. Components are
/// numbered by their smallest member.
struct Condensation {
  std::vector<Index> component_of;
  std::vector<std::vector<Index>> components;
  std::vector<std::vector<Index>> successors;
  std::vector<bool> is_source;

  Index component_count() const { return static_cast<Index>(components.size()); }
  std::vector<Index> sources() const;
};

Condensation condensation(const Eigen::MatrixXd& weights);

/// Minimum number of directed trees that together span the digraph.
Index min_spanning_forest_size(const Eigen::MatrixXd& weights);
bool strongly_connected(const Eigen::MatrixXd& weights);

inline NodeSet reachable_set(const ClusteredDigraph& g, Index node) {
  return reachable_set(g.weights(), node);
}
inline Condensation condensation(const ClusteredDigraph& g) { return condensation(g.weights()); }
inline Index min_spanning_forest_size(const ClusteredDigraph& g) {
  return min_spanning_forest_size(g.weights());
}

struct ClusterSpanningTrees {
  bool holds = false;
  /// Smallest node reaching the whole cluster, per cluster.
  std::vector<std::optional<Index>> roots;
};

ClusterSpanningTrees has_cluster_spanning_trees(const ClusteredDigraph& g);

struct RandomGraphParams {
  std::vector<Index> cluster_sizes;
  double intra_density = 0.5;
  double inter_density = 0.5;
  double weight_min = 0.1;
  double weight_max = 1.0;
  int max_attempts = 1000;
};

/// Random weakly connected graph whose clustering is an external equitable
/// partition by construction. Deterministic in `seed`.
ClusteredDigraph random_eep_graph(const RandomGraphParams& params, std::uint64_t seed);

}  // namespace gcl
