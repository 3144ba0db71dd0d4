#include "gcl/properties.hpp"

#include "gcl/control.hpp"
#include "gcl/quotient.hpp"
#include "gcl/reduction.hpp"
#include "gcl/scenario.hpp"
#include "gcl/simulate.hpp"
#include "gcl/verdict.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

namespace gcl {

namespace {

// Mixes a seed with a stream tag so derived draws stay independent.
std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

struct Suite {
  std::string name;
  std::ostringstream failures;
  bool passed = true;

  void fail(const std::string& what) {
    if (!passed) failures << "; ";
    failures << what;
    passed = false;
  }
  void expect(bool ok, const std::string& what) {
    if (!ok) fail(what);
  }
};

const Dynamics& oscillator() {
  static const Dynamics dyn = make_dynamics(oscillator_a(), oscillator_b());
  return dyn;
}

const Dynamics& single_integrator() {
  static const Dynamics dyn = make_dynamics(Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Ones(1, 1));
  return dyn;
}

std::vector<Index> agents_of(const ClusteredDigraph& g, const std::vector<Index>& clusters) {
  std::vector<Index> agents;
  for (Index c : clusters) {
    for (Index a : g.cluster_members(c)) agents.push_back(a);
  }
  std::sort(agents.begin(), agents.end());
  return agents;
}

// Checks on one graph; `tag` names the graph in failure messages.
using Check = std::function<void(Suite&, const ClusteredDigraph&, const std::string&)>;

void laplacian_rows(Suite& s, const ClusteredDigraph& g, const std::string& tag) {
  const Eigen::MatrixXd lap = laplacian_of(g.weights());
  for (Index r = 0; r < lap.rows(); ++r) {
    double sum = 0.0;
    for (Index c = 0; c < lap.cols(); ++c) {
      sum += lap(r, c);
      if (r != c && lap(r, c) > 0.0) s.fail(tag + ": positive off-diagonal");
    }
    s.expect(lap(r, r) >= 0.0, tag + ": negative diagonal");
    s.expect(std::abs(sum) <= 1e-12 * (1.0 + lap(r, r)), tag + ": nonzero row sum");
  }
}

void reachability_monotone(Suite& s, const ClusteredDigraph& g, std::uint64_t seed) {
  const Index n = g.agent_count();
  if (n < 2) return;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> pick(0, n - 1);
  Index from = pick(rng), to = pick(rng);
  if (from == to) to = (to + 1) % n;
  Eigen::MatrixXd w = g.weights();
  w(to, from) += 0.5;
  for (Index v = 0; v < n; ++v) {
    s.expect(reachable_set(w, v).includes(reachable_set(g.weights(), v)), "adding an edge shrank a reachable set");
  }
}

void forest_zeros(Suite& s, const ClusteredDigraph& g, const std::string& tag, const ZeroTolerance& tol) {
  const QuotientGraph q = quotient_graph(g);
  const Index mg = min_spanning_forest_size(g.weights());
  const Index mq = min_spanning_forest_size(q.alpha);
  const Index zg = zero_eig_count(eigenvalues(laplacian_of(g.weights()), tol));
  const Index zq = zero_eig_count(eigenvalues(q.laplacian, tol));
  s.expect(mg == zg, tag + ": graph forest " + std::to_string(mg) + " vs zeros " + std::to_string(zg));
  s.expect(mq == zq, tag + ": quotient forest " + std::to_string(mq) + " vs zeros " + std::to_string(zq));
  if (mg == 1) s.expect(has_cluster_spanning_trees(g).holds, tag + ": spanning tree without cluster trees");
}

void spectrum_split(Suite& s, const ClusteredDigraph& g, const std::string& tag, const ZeroTolerance& tol,
                    bool sign_bug) {
  const Eigen::MatrixXd lhat = assemble_reduced_laplacian(laplacian(g));
  const Spectrum reduced = eigenvalues(sign_bug ? Eigen::MatrixXd(-lhat) : lhat, tol);
  const Spectrum full = eigenvalues(laplacian_of(g.weights()), tol);
  const Spectrum quotient = eigenvalues(quotient_graph(g).laplacian, tol);
  const SpectrumMatch m = match_spectra(full, merge(quotient, reduced));
  s.expect(m.matched, tag + ": split deviation " + std::to_string(m.max_deviation));
  s.expect(zero_eig_count(full) == zero_eig_count(quotient) + zero_eig_count(reduced),
           tag + ": zero counts do not add up");
}

void reduced_positive(Suite& s, const ClusteredDigraph& g, const std::string& tag, const ZeroTolerance& tol) {
  const Spectrum reduced = eigenvalues(assemble_reduced_laplacian(laplacian(g)), tol);
  const bool positive = zero_eig_count(reduced) == 0 && min_real_part(reduced) > 0.0;
  const bool equal = min_spanning_forest_size(g.weights()) == min_spanning_forest_size(quotient_graph(g).alpha);
  s.expect(positive == equal, tag + (equal ? ": equal forests but singular Lhat" : ": unequal forests but Lhat positive"));
}

void tree_equivalence(Suite& s, const ClusteredDigraph& g, const std::string& tag, const ZeroTolerance& tol) {
  const bool equal = min_spanning_forest_size(g.weights()) == min_spanning_forest_size(quotient_graph(g).alpha);
  const bool trees = has_cluster_spanning_trees(g).holds;
  s.expect(equal == trees, tag + ": forest equality " + std::to_string(equal) + " vs cluster trees " +
                               std::to_string(trees));
  s.expect(group_consensus_verdict(g, tol).criteria_agree, tag + ": verdict flags disagreement");
}

void tree_transfer(Suite& s, const ClusteredDigraph& g, const std::string& tag) {
  const QuotientGraph q = quotient_graph(g);
  const Index mg = min_spanning_forest_size(g.weights());
  const Index mq = min_spanning_forest_size(q.alpha);
  if (mg == 1) s.expect(mq == 1, tag + ": spanning tree lost in the quotient");
  if (strongly_connected(g.weights())) s.expect(strongly_connected(q.alpha), tag + ": strong connectivity lost");

  if (mq == 1) {
    const Condensation cq = condensation(q.alpha);
    for (Index root : cq.components[cq.sources().front()]) {
      const std::vector<Index> members = g.cluster_members(root);
      const Eigen::MatrixXd local = g.weights().block(members.front(), members.front(), members.size(), members.size());
      if (min_spanning_forest_size(local) == 1) {
        s.expect(mg == 1, tag + ": rooted cluster " + std::to_string(root) + " spans but graph does not");
      }
    }
  }

  const ReachDecomposition rd = reach_decomposition(q, g);
  bool spanned = true;
  for (const auto& part : rd.exclusive) {
    if (common_ancestors(g.weights(), agents_of(g, part)).empty()) spanned = false;
  }
  s.expect(spanned == has_cluster_spanning_trees(g).holds, tag + ": exclusive-part trees disagree with cluster trees");
}

void similarity(Suite& s, const ClusteredDigraph& g, const std::string& tag, const ZeroTolerance& tol) {
  try {
    const SimilarityDecomposition d = similarity_decomposition(g);
    s.expect(d.lower_left.size() == 0 || d.lower_left.cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + d.permuted.cwiseAbs().maxCoeff()),
             tag + ": lower-left block not zero");
    s.expect((d.quotient_block - quotient_graph(g).laplacian).cwiseAbs().maxCoeff() <= 1e-10,
             tag + ": quotient block differs from L_G");
  } catch (const ReductionError& e) {
    s.fail(tag + ": " + e.what());
    return;
  }
  const ReachDecomposition rd = reach_decomposition(quotient_graph(g), g);
  const Eigen::MatrixXd lap = laplacian_of(g.weights());
  const Index total = g.agent_count();
  bool exact = true;
  for (Index r = 0; r < total; ++r) {
    for (Index c = 0; c < total; ++c) exact &= rd.permuted_laplacian(r, c) == lap(rd.agent_order[r], rd.agent_order[c]);
  }
  s.expect(exact, tag + ": reach permutation is not exact");
  if (rd.reach_agents < total) {
    s.expect(rd.permuted_laplacian.topRightCorner(rd.reach_agents, total - rd.reach_agents).isZero(0.0),
             tag + ": upper-right reach block not zero");
  }
  if (has_cluster_spanning_trees(g).holds) {
    for (const Eigen::MatrixXd& lp : rd.reach_laplacians) {
      s.expect(zero_eig_count(eigenvalues(lp, tol)) == 1, tag + ": reach Laplacian without a simple zero");
    }
    if (rd.common_agents > 0) {
      const Spectrum lf = eigenvalues(rd.lf, tol);
      s.expect(zero_eig_count(lf) == 0 && min_real_part(lf) > 0.0, tag + ": L_F not positive stable");
    }
  }
}

double max_disagreement(const Trajectory& t) {
  return *std::max_element(t.disagreement.begin(), t.disagreement.end());
}

void group_consensus(Suite& s, const ClusteredDigraph& g, const std::string& tag, const ZeroTolerance& tol,
              std::uint64_t seed) {
  const Dynamics& dyn = oscillator();
  const Eigen::MatrixXd k = gain(solve_riccati(dyn).p, dyn.b);
  const CouplingThresholds th = coupling_thresholds(g, tol);
  const Spectrum lhat = eigenvalues(assemble_reduced_laplacian(laplacian(g)), tol);
  if (th.group) {
    if (lhat.empty()) return;
    const HurwitzResult h = hurwitz_check(dyn.a, dyn.b, k, *th.group, lhat);
    s.expect(h.hurwitz, tag + ": not Hurwitz at the group threshold");
    Scenario sc{g, dyn, k, *th.group, random_initial_state(2, g.agent_count(), seed)};
    sc.dt = 1e-2;
    sc.max_samples = 50;
    const Trajectory t = simulate(sc);
    s.expect(!t.diverged && t.disagreement.back() <= 1e-3,
             tag + ": D(T) = " + std::to_string(t.disagreement.back()) + " at the group threshold");
  } else {
    const HurwitzResult h = hurwitz_check(dyn.a, dyn.b, k, 1.0, lhat);
    s.expect(!h.hurwitz && h.margin <= 1e-9, tag + ": infeasible topology but transversal blocks are Hurwitz");
  }
}

void lyapunov(Suite& s, const ClusteredDigraph& g, const std::string& tag, const ZeroTolerance& tol) {
  const Dynamics& dyn = oscillator();
  const Eigen::MatrixXd p = solve_riccati(dyn).p;
  const Eigen::MatrixXd k = gain(p, dyn.b);
  const CouplingThresholds th = coupling_thresholds(g, tol);
  const Eigen::MatrixXcd a = dyn.a.cast<Complex>();
  const Eigen::MatrixXcd bk = (dyn.b * k).cast<Complex>();
  const Eigen::MatrixXcd pc = p.cast<Complex>();
  const double scale = 1e-8 * (1.0 + p.norm());
  if (th.group) {
    for (const Complex& lambda : eigenvalues(assemble_reduced_laplacian(laplacian(g)), tol).values) {
      const Eigen::MatrixXcd m = a - *th.group * lambda * bk;
      const Eigen::MatrixXcd h = m.adjoint() * pc + pc * m + dyn.q.cast<Complex>();
      const double top = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h).eigenvalues().maxCoeff();
      s.expect(top <= scale, tag + ": Lyapunov form not negative semidefinite");
    }
  }
  if (th.pattern && *th.pattern > 0.0) {
    const Spectrum full = eigenvalues(laplacian_of(g.weights()), tol);
    Spectrum nonzero;
    for (const Complex& lambda : full.values) {
      if (std::abs(lambda) > full.zero_tolerance) nonzero.values.push_back(lambda);
    }
    s.expect(hurwitz_check(dyn.a, dyn.b, k, *th.pattern, nonzero).hurwitz,
             tag + ": not Hurwitz at the pattern threshold");
  }
}

void limit_pattern(Suite& s, const ClusteredDigraph& g, const std::string& tag, const ZeroTolerance& tol,
              std::uint64_t seed) {
  if (!has_cluster_spanning_trees(g).holds) return;
  const Dynamics& dyn = single_integrator();
  const Eigen::MatrixXd k = gain(solve_riccati(dyn).p, dyn.b);
  const CouplingThresholds th = coupling_thresholds(g, tol);
  const Eigen::VectorXd x0 = random_initial_state(1, g.agent_count(), seed);
  const LimitPrediction pred = predict_limit(g, dyn, x0, tol);

  const Eigen::MatrixXd& w = pred.convex_weights;
  if (w.size() > 0) {
    s.expect((w.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-8, tag + ": convex weights rows do not sum to 1");
    s.expect(w.minCoeff() >= -1e-10, tag + ": negative convex weight");
  }

  const double horizon = th.lambda_min ? 40.0 / *th.lambda_min : 1.0;
  Scenario sc{g, dyn, k, 1.0, x0};
  sc.t_final = horizon;
  sc.dt = horizon / 4000.0;
  sc.max_samples = 400;
  const Trajectory t = simulate(sc);
  const PredictionCheck check = verify_prediction(t, pred, sc, th.pattern);
  s.expect(check.applicable && check.passed,
           tag + ": prediction deviation " + std::to_string(check.tail_max_deviation));

  const Eigen::VectorXd& x = t.states.back();
  const double scale = 1.0 + x.cwiseAbs().maxCoeff();
  for (const auto& part : pred.reaches.exclusive) {
    const std::vector<Index> agents = agents_of(g, part);
    for (Index a : agents) {
      s.expect(std::abs(x(a) - x(agents.front())) <= 1e-3 * scale, tag + ": exclusive part did not merge");
    }
  }
}

void manifold(Suite& s, const ClusteredDigraph& g, const std::string& tag, std::uint64_t seed) {
  const Dynamics& dyn = oscillator();
  const Eigen::MatrixXd k = gain(solve_riccati(dyn).p, dyn.b);
  const Eigen::VectorXd per_cluster = random_initial_state(2, g.cluster_count(), seed);
  Eigen::VectorXd x0(2 * g.agent_count());
  for (Index a = 0; a < g.agent_count(); ++a) x0.segment(2 * a, 2) = per_cluster.segment(2 * g.cluster_of(a), 2);
  Scenario sc{g, dyn, k, 1.0, x0};
  sc.t_final = 20.0;
  sc.dt = 1e-2;
  sc.max_samples = 200;
  const Trajectory t = simulate(sc);
  s.expect(max_disagreement(t) <= 1e-8, tag + ": left the consensus manifold, D = " +
                                             std::to_string(max_disagreement(t)));
}

}  // namespace

ClusteredDigraph corpus_graph(std::uint64_t seed) {
  std::mt19937_64 rng(derive(seed, 1));
  std::uniform_int_distribution<Index> clusters(1, 6);
  std::uniform_int_distribution<Index> size(1, 5);
  std::uniform_real_distribution<double> intra(0.15, 0.9);
  std::uniform_real_distribution<double> inter(0.2, 0.8);
  for (int attempt = 0;; ++attempt) {
    RandomGraphParams p;
    p.cluster_sizes.resize(static_cast<std::size_t>(clusters(rng)));
    for (Index& s : p.cluster_sizes) s = size(rng);
    p.intra_density = intra(rng);
    p.inter_density = inter(rng);
    try {
      return random_eep_graph(p, derive(seed, 100 + attempt));
    } catch (const GraphError&) {
      // Sparse draws on many clusters can exhaust the budget; redraw the shape.
    }
  }
}

std::optional<ClusteredDigraph> mutate_graph(const ClusteredDigraph& g, std::uint64_t seed) {
  std::mt19937_64 rng(derive(seed, 2));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double p = 0.2 + 0.6 * unit(rng);
  Eigen::MatrixXd w = g.weights();
  for (Index l = 0; l < w.rows(); ++l) {
    for (Index k = 0; k < w.cols(); ++k) {
      if (w(l, k) > 0.0 && g.cluster_of(l) == g.cluster_of(k) && unit(rng) < p) w(l, k) = 0.0;
    }
  }
  if (g.cluster_count() > 1 && unit(rng) < 0.3) {
    std::vector<std::pair<Index, Index>> blocks;
    for (Index i = 0; i < g.cluster_count(); ++i) {
      for (Index j = 0; j < g.cluster_count(); ++j) {
        if (i == j) continue;
        if (w.block(g.cluster_offset(i), g.cluster_offset(j), g.cluster_size(i), g.cluster_size(j)).sum() > 0.0) {
          blocks.emplace_back(i, j);
        }
      }
    }
    if (!blocks.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, blocks.size() - 1);
      const auto [i, j] = blocks[pick(rng)];
      w.block(g.cluster_offset(i), g.cluster_offset(j), g.cluster_size(i), g.cluster_size(j)).setZero();
    }
  }
  if (!weakly_connected(w)) return std::nullopt;
  return build_graph(w, g.cluster_sizes());
}

ClusteredDigraph infeasible_mutation(std::uint64_t seed) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    const ClusteredDigraph base = corpus_graph(derive(seed, 1000 + attempt));
    const auto m = mutate_graph(base, derive(seed, 2000 + attempt));
    if (m && min_spanning_forest_size(m->weights()) != min_spanning_forest_size(quotient_graph(*m).alpha)) {
      return *m;
    }
  }
}

const std::vector<std::string>& property_suites() {
  static const std::vector<std::string> names = {
      "laplacian",     "forest-zeros",  "spectrum-split",  "reduced-positive", "tree-equivalence", "tree-transfer",
      "similarity",    "group-consensus", "lyapunov",      "limit-pattern",    "manifold"};
  return names;
}

std::vector<PropertyOutcome> run_properties(std::uint64_t seed, const PropertyOptions& options) {
  const ClusteredDigraph g = corpus_graph(seed);
  std::vector<std::pair<std::string, ClusteredDigraph>> graphs{{"seed " + std::to_string(seed), g}};
  if (auto m = mutate_graph(g, seed)) graphs.emplace_back("seed " + std::to_string(seed) + " mutated", *m);
  const ZeroTolerance& tol = options.tol;

  const std::vector<Check> checks = {
      [&](Suite& s, const ClusteredDigraph& h, const std::string& tag) {
        laplacian_rows(s, h, tag);
        reachability_monotone(s, h, seed);
      },
      [&](Suite& s, const ClusteredDigraph& h, const std::string& tag) { forest_zeros(s, h, tag, tol); },
      [&](Suite& s, const ClusteredDigraph& h, const std::string& tag) {
        spectrum_split(s, h, tag, tol, options.inject_sign_bug);
      },
      [&](Suite& s, const ClusteredDigraph& h, const std::string& tag) { reduced_positive(s, h, tag, tol); },
      [&](Suite& s, const ClusteredDigraph& h, const std::string& tag) { tree_equivalence(s, h, tag, tol); },
      [&](Suite& s, const ClusteredDigraph& h, const std::string& tag) { tree_transfer(s, h, tag); },
      [&](Suite& s, const ClusteredDigraph& h, const std::string& tag) { similarity(s, h, tag, tol); },
      [&](Suite& s, const ClusteredDigraph& h, const std::string& tag) { group_consensus(s, h, tag, tol, seed); },
      [&](Suite& s, const ClusteredDigraph& h, const std::string& tag) { lyapunov(s, h, tag, tol); },
      [&](Suite& s, const ClusteredDigraph& h, const std::string& tag) { limit_pattern(s, h, tag, tol, seed); },
      [&](Suite& s, const ClusteredDigraph& h, const std::string& tag) { manifold(s, h, tag, seed); },
  };

  std::vector<PropertyOutcome> outcomes;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    Suite suite;
    suite.name = property_suites()[i];
    for (const auto& [tag, h] : graphs) {
      try {
        checks[i](suite, h, tag);
      } catch (const std::exception& e) {
        suite.fail(tag + ": exception: " + e.what());
      }
    }
    outcomes.push_back({suite.name, suite.passed, suite.failures.str()});
  }
  return outcomes;
}

}  // namespace gcl
