#pragma once

#include "gcl/graph.hpp"
#include "gcl/quotient.hpp"
#include "gcl/spectral.hpp"

namespace gcl {

/**
 * Group consensusability of a clustered digraph.
 *
 * `feasible` is decided from the exact tree counts of the graph and its
 * quotient. The spectral zero counts and the cluster-spanning-tree test are
 * independent routes to the same answer; any disagreement is flagged rather
 * than resolved.
 */
struct ConsensusVerdict {
  bool eep_holds = false;
  Index forest_graph = 0;
  Index forest_quotient = 0;
  Index zeros_graph = 0;
  Index zeros_quotient = 0;
  bool spectral_agrees = true;
  ClusterSpanningTrees cluster_trees;
  bool criteria_agree = true;
  bool feasible = false;
};

ConsensusVerdict group_consensus_verdict(const ClusteredDigraph& g, const ZeroTolerance& tol = {});

}  // namespace gcl
