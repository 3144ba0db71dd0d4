#pragma once

#include "gcl/graph.hpp"
#include "gcl/quotient.hpp"
#include "gcl/spectral.hpp"

#include <stdexcept>
#include <vector>

namespace gcl {

class ReductionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Certificate that sigma(L) equals sigma(L_G) joined with sigma(Lhat).
struct SpectrumSplit {
  bool verified = false;
  double max_deviation = 0.0;
  Spectrum full;
  Spectrum quotient;
  Spectrum reduced;
};

/**
 * Reduced Laplacian governing the intra-cluster disagreement dynamics.
 *
 * Agent rho_i (the first of cluster i) is the reference of its cluster; the
 * block (i, j) of `lhat` is L~_ij - 1 gamma_ij^T where L~_ij drops the first
 * row and column of L_ij and gamma_ij is the first row of L_ij minus its first
 * entry.
 */
struct ReductionReport {
  Eigen::MatrixXd lhat;
  std::vector<Index> block_offsets;                  // into lhat, per cluster
  std::vector<Index> block_sizes;                    // l_i - 1
  std::vector<std::vector<Eigen::VectorXd>> gamma;   // gamma[i][j], length l_j - 1
  SpectrumSplit split;

  Eigen::Block<const Eigen::MatrixXd> block(Index i, Index j) const {
    return lhat.block(block_offsets.at(i), block_offsets.at(j), block_sizes.at(i), block_sizes.at(j));
  }
};

/// Assembles Lhat blockwise from any Laplacian with a cluster block grid.
Eigen::MatrixXd assemble_reduced_laplacian(const Laplacian& lap);

/// Requires the clustering to be an external equitable partition.
ReductionReport reduced_laplacian(const ClusteredDigraph& g, const ZeroTolerance& tol = {});

/// Explicit S^{-1} L S with S = blkdiag([1 0; 1 I]) followed by the row and
/// column permutation that moves every cluster's reference coordinate first.
struct SimilarityDecomposition {
  Eigen::MatrixXd transform;
  Eigen::MatrixXd transformed;
  std::vector<Index> permutation;  // position -> coordinate of `transformed`
  Eigen::MatrixXd permuted;
  Eigen::MatrixXd quotient_block;  // N x N
  Eigen::MatrixXd gamma_block;     // N x (L - N)
  Eigen::MatrixXd lower_left;      // (L - N) x N, zero under the partition condition
  Eigen::MatrixXd reduced_block;   // (L - N) x (L - N)
  double max_deviation = 0.0;
};

SimilarityDecomposition similarity_decomposition(const ClusteredDigraph& g);

/**
 * Reaches of the quotient graph and the matching ordered Laplacian blocks.
 *
 * Clusters are reordered as V_1, ..., V_m, F so the permuted Laplacian reads
 * [[L_R, 0], [L_FR, L_F]] with L_R = blkdiag(L_1, ..., L_m).
 */
struct ReachDecomposition {
  Index reach_count = 0;
  std::vector<std::vector<Index>> reaches;
  std::vector<std::vector<Index>> exclusive;
  std::vector<Index> common;
  std::vector<Index> cluster_order;
  std::vector<Index> agent_order;  // position -> internal agent index
  std::vector<Index> reach_agent_counts;
  Index reach_agents = 0;
  Index common_agents = 0;
  Eigen::MatrixXd permuted_laplacian;
  std::vector<Eigen::MatrixXd> reach_laplacians;
  Eigen::MatrixXd lr;
  Eigen::MatrixXd lfr;
  Eigen::MatrixXd lf;
};

ReachDecomposition reach_decomposition(const QuotientGraph& q, const ClusteredDigraph& g);

}  // namespace gcl
