// One PASS/FAIL line per acceptance criterion. Exit status is the failure count.

#include "fixtures.hpp"

#include "gcl/control.hpp"
#include "gcl/properties.hpp"
#include "gcl/quotient.hpp"
#include "gcl/reduction.hpp"
#include "gcl/report.hpp"
#include "gcl/scenario.hpp"
#include "gcl/simulate.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace gcl;

namespace {

constexpr std::uint64_t kCorpus = 1000;
constexpr std::size_t kMutated = 500;
constexpr std::uint64_t kInfeasible = 100;

struct Result {
  bool passed = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string num(double v) { return format_number(v); }

const Dynamics& oscillator() {
  static const Dynamics dyn = make_dynamics(oscillator_a(), oscillator_b());
  return dyn;
}

Eigen::MatrixXd oscillator_gain() { return gain(solve_riccati(oscillator()).p, oscillator().b); }

Result riccati() {
  const auto start = Clock::now();
  const Eigen::MatrixXd k = oscillator_gain();
  const double elapsed = seconds_since(start);
  const double err = std::max(std::abs(k(0, 0) - 0.4142), std::abs(k(0, 1) - 1.3522));
  return {err <= 1e-3 && elapsed < 1.0,
          "K = [" + num(k(0, 0)) + ", " + num(k(0, 1)) + "], max error " + num(err) + " (tol 1e-3), " +
              num(elapsed) + " s (limit 1 s)"};
}

Result spectrum_split() {
  const auto start = Clock::now();
  std::uint64_t failures = 0;
  double worst = 0.0;
  for (std::uint64_t s = 0; s < kCorpus; ++s) {
    const ClusteredDigraph g = corpus_graph(s);
    const Spectrum full = eigenvalues(laplacian_of(g.weights()));
    const Spectrum q = eigenvalues(quotient_graph(g).laplacian);
    const Spectrum r = eigenvalues(assemble_reduced_laplacian(laplacian(g)));
    const SpectrumMatch m = match_spectra(full, merge(q, r), 1e-6);
    worst = std::max(worst, m.max_deviation);
    if (!m.matched) ++failures;
  }
  const double elapsed = seconds_since(start);
  return {failures == 0 && elapsed < 120.0,
          std::to_string(kCorpus) + " graphs, " + std::to_string(failures) + " mismatches, max pairing deviation " +
              num(worst) + " (tol 1e-6), " + num(elapsed) + " s (limit 120 s)"};
}

Result forest_zeros() {
  std::uint64_t graph_bad = 0, quotient_bad = 0;
  for (std::uint64_t s = 0; s < kCorpus; ++s) {
    const ClusteredDigraph g = corpus_graph(s);
    const QuotientGraph q = quotient_graph(g);
    if (min_spanning_forest_size(g.weights()) != zero_eig_count(eigenvalues(laplacian_of(g.weights())))) ++graph_bad;
    if (min_spanning_forest_size(q.alpha) != zero_eig_count(eigenvalues(q.laplacian))) ++quotient_bad;
  }
  return {graph_bad == 0 && quotient_bad == 0,
          std::to_string(kCorpus) + " graphs, disagreements: graph " + std::to_string(graph_bad) + ", quotient " +
              std::to_string(quotient_bad)};
}

Result tree_equivalence() {
  std::uint64_t checked = 0, disagreements = 0, mutated = 0, infeasible = 0;
  auto check = [&](const ClusteredDigraph& g) {
    const bool equal = min_spanning_forest_size(g.weights()) == min_spanning_forest_size(quotient_graph(g).alpha);
    if (equal != has_cluster_spanning_trees(g).holds) ++disagreements;
    if (!equal) ++infeasible;
    ++checked;
  };
  for (std::uint64_t s = 0; s < kCorpus; ++s) check(corpus_graph(s));
  for (std::uint64_t s = 0; mutated < kMutated; ++s) {
    if (auto m = mutate_graph(corpus_graph(s % kCorpus), s)) {
      check(*m);
      ++mutated;
    }
  }
  return {disagreements == 0, std::to_string(checked) + " graphs (" + std::to_string(mutated) + " mutated, " +
                                  std::to_string(infeasible) + " with unequal tree counts), " +
                                  std::to_string(disagreements) + " disagreements"};
}

struct SurrogateRun {
  CouplingThresholds th;
  Scenario scenario;
  Trajectory traj;
  LimitPrediction pred;
  PredictionCheck check;
  double elapsed = 0.0;
};

SurrogateRun run_surrogate(bool pattern) {
  SurrogateRun run{coupling_thresholds(fixtures::surrogate()),
                   Scenario{fixtures::surrogate(), oscillator(), oscillator_gain(), 1.0,
                            random_initial_state(2, 10, 2024)},
                   {}, {}, {}, 0.0};
  const auto start = Clock::now();
  run.scenario.delta = pattern ? *run.th.pattern : *run.th.group;
  run.traj = simulate(run.scenario);
  run.elapsed = seconds_since(start);
  run.pred = predict_limit(run.scenario.graph, oscillator(), run.scenario.x0);
  run.check = verify_prediction(run.traj, run.pred, run.scenario, run.th.pattern);
  return run;
}

Result surrogate_consensus(const SurrogateRun& run) {
  const double d = run.traj.disagreement.back();
  return {!run.traj.diverged && d <= 1e-3 && run.elapsed < 30.0,
          "delta = deltaPattern = " + num(run.scenario.delta) + ", D(200) = " + num(d) + " (tol 1e-3), " +
              num(run.elapsed) + " s (limit 30 s)"};
}

Result surrogate_pattern(const SurrogateRun& run) {
  const ClusteredDigraph& g = run.scenario.graph;
  const Eigen::VectorXd& x = run.traj.states.back();
  double merge_gap = 0.0;
  for (const auto& part : run.pred.reaches.exclusive) {
    std::vector<Index> agents;
    for (Index c : part) {
      for (Index a : g.cluster_members(c)) agents.push_back(a);
    }
    for (Index a : agents) {
      for (Index b : agents) merge_gap = std::max(merge_gap, (x.segment(2 * a, 2) - x.segment(2 * b, 2)).norm());
    }
  }
  const Eigen::MatrixXd& w = run.pred.convex_weights;
  const double row_err = (w.rowwise().sum().array() - 1.0).abs().maxCoeff();
  const double min_entry = w.minCoeff();

  const ClusteredDigraph toy2 = fixtures::g_toy2();
  const Dynamics si = make_dynamics(Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Ones(1, 1));
  const Eigen::MatrixXd limit = predict_limit(toy2, si, Eigen::VectorXd::Zero(4)).limit_operator();
  double toy_err = 0.0;
  for (Index agent : {2, 3}) {
    const Index l = toy2.internal_index(agent);
    toy_err = std::max({toy_err, std::abs(limit(l, toy2.internal_index(0)) - 0.6),
                        std::abs(limit(l, toy2.internal_index(1)) - 0.4),
                        std::abs(limit(l, toy2.internal_index(2))), std::abs(limit(l, toy2.internal_index(3)))});
  }

  const bool ok = run.check.applicable && run.check.passed && run.check.tail_max_deviation <= 1e-2 &&
                  merge_gap <= 1e-3 && row_err <= 1e-8 && min_entry >= -1e-10 && toy_err <= 1e-9;
  return {ok, "tail deviation " + num(run.check.tail_max_deviation) + " (tol 1e-2), exclusive-part gap " +
                  num(merge_gap) + " (tol 1e-3), weight row error " + num(row_err) + " (tol 1e-8), min weight " +
                  num(min_entry) + " (>= -1e-10), toy2 weight error " + num(toy_err) + " (tol 1e-9)"};
}

Result necessity() {
  const Eigen::MatrixXd k = oscillator_gain();
  std::uint64_t hurwitz = 0, converged = 0;
  double worst_margin = -std::numeric_limits<double>::infinity();
  double smallest_d = std::numeric_limits<double>::infinity();
  for (std::uint64_t s = 0; s < kInfeasible; ++s) {
    const ClusteredDigraph g = infeasible_mutation(s);
    const CouplingThresholds th = coupling_thresholds(g);
    const double delta = th.lambda_min ? 1.0 / (2.0 * *th.lambda_min) : 1.0;
    const HurwitzResult h = hurwitz_check(oscillator().a, oscillator().b, k, delta,
                                          eigenvalues(assemble_reduced_laplacian(laplacian(g))));
    worst_margin = std::max(worst_margin, h.margin);
    if (h.margin > 1e-9) ++hurwitz;

    Scenario sc{g, oscillator(), k, delta, random_initial_state(2, g.agent_count(), 7000 + s)};
    sc.dt = 1e-2;
    sc.max_samples = 0;
    const Trajectory t = simulate(sc);
    const double d = *std::min_element(t.disagreement.begin(), t.disagreement.end());
    smallest_d = std::min(smallest_d, d);
    if (!t.diverged && d < 1e-3) ++converged;
  }
  return {hurwitz == 0 && converged == 0,
          std::to_string(kInfeasible) + " infeasible mutations, Hurwitz " + std::to_string(hurwitz) +
              ", largest -maxRe " + num(worst_margin) + " (need <= 1e-9), reached D < 1e-3: " +
              std::to_string(converged) + ", smallest D(t) " + num(smallest_d)};
}

Result weak_coupling(const SurrogateRun& run) {
  const double d = run.traj.disagreement.back();
  const bool below = *run.th.group < *run.th.pattern;
  return {below && run.pred.reaches.reach_count >= 2 && !run.traj.diverged && d <= 1e-3 && !run.check.applicable,
          "m = " + std::to_string(run.pred.reaches.reach_count) + ", deltaGroup " + num(*run.th.group) +
              " < deltaPattern " + num(*run.th.pattern) + ", D(200) = " + num(d) + " (tol 1e-3), prediction " +
              (run.check.applicable ? "applicable" : "not applicable")};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const std::string& name, const std::function<Result()>& fn) {
    Result r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    if (!r.passed) ++failures;
    std::cout << (r.passed ? "PASS" : "FAIL") << "  criterion " << id << "  " << name << ": " << r.detail
              << std::endl;
  };

  report(1, "Riccati gain of the oscillator", riccati);
  report(2, "spectrum split over the random corpus", spectrum_split);
  report(3, "tree count equals zero-eigenvalue count", forest_zeros);
  report(4, "tree-count equality iff cluster spanning trees", tree_equivalence);
  std::optional<SurrogateRun> strong, weak;
  report(5, "group consensus on the surrogate at deltaPattern", [&] {
    strong = run_surrogate(true);
    return surrogate_consensus(*strong);
  });
  report(6, "reach pattern prediction", [&] {
    if (!strong) throw std::runtime_error("surrogate run unavailable");
    return surrogate_pattern(*strong);
  });
  report(7, "infeasible topologies never reach group consensus", necessity);
  report(8, "group consensus below the pattern threshold", [&] {
    weak = run_surrogate(false);
    return weak_coupling(*weak);
  });
  std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures;
}
