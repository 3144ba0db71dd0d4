#pragma once

#include "gcl/graph.hpp"
#include "gcl/spectral.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gcl {

/// Seeded corpus member: 1..6 clusters of 1..5 agents, partition condition by
/// construction, densities and weights drawn per seed.
ClusteredDigraph corpus_graph(std::uint64_t seed);

/// Deletes intra-cluster edges and possibly one whole inter-cluster block.
/// Both keep every block row sum constant. Empty if the result is not weakly
/// connected.
std::optional<ClusteredDigraph> mutate_graph(const ClusteredDigraph& g, std::uint64_t seed);

/// Mutated corpus graph whose tree counts differ between graph and quotient.
/// Each seed searches its own stream of candidates.
ClusteredDigraph infeasible_mutation(std::uint64_t seed);

struct PropertyOptions {
  /// Test fixture: negates Lhat before the spectrum split comparison.
  bool inject_sign_bug = false;
  ZeroTolerance tol;
};

struct PropertyOutcome {
  std::string suite;
  bool passed = true;
  std::string detail;
};

const std::vector<std::string>& property_suites();

/// Runs every suite on the corpus graph of `seed` and its mutations.
std::vector<PropertyOutcome> run_properties(std::uint64_t seed, const PropertyOptions& options = {});

}  // namespace gcl
