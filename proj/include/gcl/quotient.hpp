#pragma once

#include "gcl/graph.hpp"

#include <vector>

namespace gcl {

struct EEPViolation {
  Index row_cluster;
  Index col_cluster;
  /// Agents (internal indices) whose block row sum leaves the block mean.
  std::vector<Index> rows;
  /// max - min of the block row sums.
  double spread;
};

/// Result of the inter-cluster common influence check: every Laplacian block
/// L_ij must have constant row sums beta_ij.
struct EEPReport {
  bool holds = false;
  Eigen::MatrixXd beta;  // block row-sum means
  double tolerance = 0.0;
  std::vector<EEPViolation> violations;
};

EEPReport check_common_influence(const ClusteredDigraph& g);

/// Cluster-level digraph: alpha(i, j) is the averaged weight from cluster j
/// into cluster i, (1 / l_i) * sum_{l in C_i, k in C_j} w_lk.
struct QuotientGraph {
  Eigen::MatrixXd alpha;
  Eigen::MatrixXd laplacian;

  Index size() const { return alpha.rows(); }
};

QuotientGraph quotient_graph(const ClusteredDigraph& g);

inline const Eigen::MatrixXd& quotient_laplacian(const QuotientGraph& q) { return q.laplacian; }

}  // namespace gcl
