#include "gcl/properties.hpp"
#include "gcl/quotient.hpp"

#include <doctest.h>

using namespace gcl;

TEST_CASE("corpus graphs respect the size limits and are reproducible") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const ClusteredDigraph g = corpus_graph(seed);
    CHECK(g.cluster_count() >= 1);
    CHECK(g.cluster_count() <= 6);
    for (Index s : g.cluster_sizes()) CHECK((s >= 1 && s <= 5));
    CHECK(g.agent_count() <= 30);
    CHECK(check_common_influence(g).holds);
  }
  CHECK(corpus_graph(17).weights() == corpus_graph(17).weights());
}

TEST_CASE("mutations keep the partition condition and connectivity") {
  int produced = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const ClusteredDigraph g = corpus_graph(seed);
    const auto m = mutate_graph(g, seed);
    if (!m) continue;
    ++produced;
    CHECK(check_common_influence(*m).holds);
    CHECK(weakly_connected(m->weights()));
    CHECK((m->weights().array() <= g.weights().array()).all());
  }
  CHECK(produced > 50);
}

TEST_CASE("infeasible mutations are infeasible") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ClusteredDigraph g = infeasible_mutation(seed);
    CHECK(check_common_influence(g).holds);
    CHECK(min_spanning_forest_size(g.weights()) != min_spanning_forest_size(quotient_graph(g).alpha));
  }
}

TEST_CASE("every suite passes on a handful of seeds") {
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const auto outcomes = run_properties(seed);
    REQUIRE(outcomes.size() == property_suites().size());
    for (const PropertyOutcome& o : outcomes) {
      INFO(o.suite << ": " << o.detail);
      CHECK(o.passed);
    }
  }
}

TEST_CASE("the injected sign bug is caught") {
  PropertyOptions options;
  options.inject_sign_bug = true;
  int caught = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (const PropertyOutcome& o : run_properties(seed, options)) {
      if (o.suite == "spectrum-split" && !o.passed) ++caught;
    }
  }
  CHECK(caught > 0);
}
