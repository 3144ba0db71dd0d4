#include "gcl/verdict.hpp"

namespace gcl {

ConsensusVerdict group_consensus_verdict(const ClusteredDigraph& g, const ZeroTolerance& tol) {
  ConsensusVerdict v;
  v.eep_holds = check_common_influence(g).holds;
  const QuotientGraph q = quotient_graph(g);
  v.forest_graph = min_spanning_forest_size(g.weights());
  v.forest_quotient = min_spanning_forest_size(q.alpha);
  v.zeros_graph = zero_eig_count(eigenvalues(laplacian_of(g.weights()), tol));
  v.zeros_quotient = zero_eig_count(eigenvalues(q.laplacian, tol));
  v.spectral_agrees = v.zeros_graph == v.forest_graph && v.zeros_quotient == v.forest_quotient;
  v.cluster_trees = has_cluster_spanning_trees(g);
  const bool equal_forests = v.forest_graph == v.forest_quotient;
  // The equivalence with cluster spanning trees is only claimed under the
  // partition condition.
  v.criteria_agree = !v.eep_holds || equal_forests == v.cluster_trees.holds;
  v.feasible = v.eep_holds && equal_forests;
  return v;
}

}  // namespace gcl
