#include "cli.hpp"

#include "gcl/control.hpp"
#include "gcl/properties.hpp"
#include "gcl/report.hpp"
#include "gcl/scenario.hpp"
#include "gcl/simulate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

namespace gcl::cli {

namespace {

using json = nlohmann::ordered_json;

struct InfeasibleCoupling : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ScenarioError("cannot write '" + path.string() + "'");
  file << text;
  if (!file) throw ScenarioError("failed writing '" + path.string() + "'");
}

json rounded(double v) {
  if (!std::isfinite(v)) return v > 0 ? json("inf") : json("nan");
  return std::stod(format_number(v));
}

json rounded(const std::optional<double>& v) { return v ? rounded(*v) : json(nullptr); }

std::string text_or_undefined(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string("undefined");
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::string file;
  std::string format = "text";
  std::string out;
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
  const ScenarioFile file = load_scenario(a.file);
  const ClusteredDigraph g = to_graph(file);
  const AnalysisReport report = analyze(g, to_dynamics(file), zero_tolerance_from_env());
  const std::string text = a.format == "json" ? to_json(report) : to_text(report);
  if (a.out.empty()) {
    out << text;
  } else {
    write_file(a.out, text);
  }
  return report.verdict.feasible ? kOk : kInfeasible;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string file;
  std::optional<double> t_final;
  std::optional<double> dt;
  std::optional<std::string> delta;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> integrator;
  std::string out_dir = ".";
  std::string format = "text";
};

// Resolves the coupling spec against the topology's thresholds.
double resolve_delta(const CouplingSpec& spec, const CouplingThresholds& th) {
  std::optional<double> value;
  switch (spec.mode) {
    case CouplingSpec::Mode::Value:
      return spec.value;
    case CouplingSpec::Mode::AutoGroup:
      if (!th.group) throw InfeasibleCoupling("auto-group: topology is not group consensusable");
      value = th.group;
      break;
    case CouplingSpec::Mode::AutoPattern:
      if (!th.pattern) throw InfeasibleCoupling("auto-pattern: graph lacks cluster spanning trees");
      value = th.pattern;
      break;
  }
  // A zero threshold admits any positive coupling.
  return *value > 0.0 ? *value : 1.0;
}

std::string csv(const Trajectory& traj, const ClusteredDigraph& g, Index n) {
  std::ostringstream s;
  const Index agents = g.agent_count();
  s << "t";
  for (Index a = 1; a <= agents; ++a) {
    for (Index d = 1; d <= n; ++d) s << ",x" << a << "_" << d;
  }
  s << "\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    s << format_number(traj.times[i]);
    for (Index a = 0; a < agents; ++a) {
      const Index internal = g.internal_index(a);
      for (Index d = 0; d < n; ++d) s << "," << format_number(traj.states[i](internal * n + d));
    }
    s << "\n";
  }
  return s.str();
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  ScenarioFile file = load_scenario(a.file);
  if (a.t_final) file.sim.t_final = *a.t_final;
  if (a.dt) file.sim.dt = *a.dt;
  if (a.seed) file.sim.seed = *a.seed;
  if (a.delta) file.coupling = parse_coupling(*a.delta);
  if (a.integrator) file.sim.integrator = *a.integrator == "rk4" ? Integrator::Rk4 : Integrator::Expm;

  const ZeroTolerance tol = zero_tolerance_from_env();
  const ClusteredDigraph g = to_graph(file);
  const Dynamics dyn = to_dynamics(file);
  const ControlDesign design = design_control(g, dyn, tol);
  CouplingThresholds th;
  th.group = design.delta_group;
  th.pattern = design.delta_pattern;
  const double delta = resolve_delta(file.coupling, th);

  Scenario sc{g, dyn, design.k, delta, initial_state(file, g)};
  sc.t_final = file.sim.t_final;
  sc.dt = file.sim.dt;
  sc.integrator = file.sim.integrator;
  validate(sc);
  const Trajectory traj = simulate(sc);

  PredictionCheck check;
  if (check_common_influence(g).holds && has_cluster_spanning_trees(g).holds) {
    check = verify_prediction(traj, predict_limit(g, dyn, sc.x0, tol), sc, design.delta_pattern);
  } else {
    check.note = "not applicable: graph lacks cluster spanning trees";
  }

  const double final_d = traj.disagreement.back();
  const bool consensus = !traj.diverged && final_d <= 1e-3;
  std::filesystem::create_directories(a.out_dir);
  const std::filesystem::path dir(a.out_dir);
  write_file(dir / "trajectory.csv", csv(traj, g, dyn.state_dim()));

  std::string summary;
  if (a.format == "json") {
    json doc;
    doc["delta"] = rounded(delta);
    doc["delta_group"] = rounded(design.delta_group);
    doc["delta_pattern"] = rounded(design.delta_pattern);
    doc["integrator"] = sc.integrator == Integrator::Expm ? "expm" : "rk4";
    doc["t_final"] = rounded(sc.t_final);
    doc["dt"] = rounded(sc.dt);
    doc["seed"] = file.sim.seed;
    doc["steps"] = traj.steps;
    doc["samples"] = traj.times.size();
    doc["diverged"] = traj.diverged;
    doc["final_disagreement"] = rounded(final_d);
    json per_cluster = json::array();
    for (Index i = 0; i < traj.cluster_disagreement.back().size(); ++i) {
      per_cluster.push_back(rounded(traj.cluster_disagreement.back()(i)));
    }
    doc["cluster_disagreement"] = per_cluster;
    doc["group_consensus"] = consensus;
    doc["prediction"] = {{"applicable", check.applicable},
                         {"passed", check.passed},
                         {"tail_max_deviation", check.applicable ? rounded(check.tail_max_deviation) : json(nullptr)},
                         {"final_deviation", check.applicable ? rounded(check.final_deviation) : json(nullptr)},
                         {"tolerance", rounded(check.tolerance)},
                         {"note", check.note}};
    summary = doc.dump(2) + "\n";
  } else {
    std::ostringstream s;
    s << "delta: " << format_number(delta) << "\n";
    s << "delta_group: " << text_or_undefined(design.delta_group) << "\n";
    s << "delta_pattern: " << text_or_undefined(design.delta_pattern) << "\n";
    s << "integrator: " << (sc.integrator == Integrator::Expm ? "expm" : "rk4") << "\n";
    s << "t_final: " << format_number(sc.t_final) << "\n";
    s << "dt: " << format_number(sc.dt) << "\n";
    s << "seed: " << file.sim.seed << "\n";
    s << "steps: " << traj.steps << "\n";
    s << "samples: " << traj.times.size() << "\n";
    s << "diverged: " << (traj.diverged ? "yes" : "no") << "\n";
    s << "final_disagreement: " << format_number(final_d) << "\n";
    s << "group_consensus: " << (consensus ? "yes" : "no") << "\n";
    s << "prediction: " << (check.applicable ? (check.passed ? "pass" : "fail") : "not applicable") << "\n";
    if (check.applicable) {
      s << "prediction_tail_deviation: " << format_number(check.tail_max_deviation) << "\n";
      s << "prediction_final_deviation: " << format_number(check.final_deviation) << "\n";
    }
    s << "prediction_note: " << check.note << "\n";
    summary = s.str();
  }
  write_file(dir / (a.format == "json" ? "summary.json" : "summary.txt"), summary);
  out << summary;
  return kOk;
}

// ---------------------------------------------------------------- gen

struct GenArgs {
  std::vector<long long> clusters{3, 3, 3};
  double intra_density = 0.5;
  double inter_density = 0.5;
  double weight_min = 0.1;
  double weight_max = 1.0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
  RandomGraphParams p;
  for (long long s : a.clusters) {
    if (s < 1) throw GraphError("cluster sizes must be at least 1");
    p.cluster_sizes.push_back(static_cast<Index>(s));
  }
  p.intra_density = a.intra_density;
  p.inter_density = a.inter_density;
  p.weight_min = a.weight_min;
  p.weight_max = a.weight_max;
  const ClusteredDigraph g = random_eep_graph(p, a.seed);

  ScenarioFile file;
  file.agents = g.agent_count();
  for (Index i = 0; i < g.cluster_count(); ++i) {
    std::vector<Index> ids;
    for (Index agent : g.cluster_members(i)) ids.push_back(agent + 1);
    file.clusters.push_back(std::move(ids));
  }
  for (const Edge& e : g.edges()) file.edges.push_back({e.from + 1, e.to + 1, e.weight});
  file.a = oscillator_a();
  file.b = oscillator_b();
  file.coupling = {CouplingSpec::Mode::AutoPattern, 0.0};
  file.sim.seed = a.seed;
  const std::string text = serialize_scenario(file);
  if (a.out.empty()) {
    out << text;
  } else {
    write_file(a.out, text);
  }
  return kOk;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  std::uint64_t seeds = 100;
  unsigned threads = 0;
  bool inject_sign_bug = false;
  std::string format = "text";
};

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  const unsigned threads =
      std::max(1u, std::min<unsigned>(a.threads ? a.threads : std::thread::hardware_concurrency(),
                                      static_cast<unsigned>(std::max<std::uint64_t>(a.seeds, 1))));
  PropertyOptions options;
  options.inject_sign_bug = a.inject_sign_bug;
  options.tol = zero_tolerance_from_env();

  std::vector<std::vector<PropertyOutcome>> results(a.seeds);
  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::uint64_t s = next++; s < a.seeds; s = next++) results[s] = run_properties(s, options);
    });
  }
  for (auto& th : pool) th.join();

  struct Tally {
    std::uint64_t passed = 0;
    std::uint64_t failed = 0;
    std::string first_failure;
  };
  std::map<std::string, Tally> tally;
  for (const auto& name : property_suites()) tally[name];
  for (const auto& seed_results : results) {
    for (const PropertyOutcome& o : seed_results) {
      Tally& t = tally[o.suite];
      if (o.passed) {
        ++t.passed;
      } else if (t.failed++ == 0) {
        t.first_failure = o.detail;
      }
    }
  }

  bool all = true;
  if (a.format == "json") {
    json suites = json::array();
    for (const auto& name : property_suites()) {
      const Tally& t = tally[name];
      all &= t.failed == 0;
      suites.push_back({{"suite", name}, {"passed", t.passed}, {"failed", t.failed},
                        {"first_failure", t.first_failure}});
    }
    out << json{{"seeds", a.seeds}, {"suites", suites}, {"ok", all}}.dump(2) << "\n";
  } else {
    out << "suite             passed  failed  result\n";
    for (const auto& name : property_suites()) {
      const Tally& t = tally[name];
      all &= t.failed == 0;
      char line[128];
      std::snprintf(line, sizeof line, "%-16s  %6llu  %6llu  %s\n", name.c_str(),
                    static_cast<unsigned long long>(t.passed), static_cast<unsigned long long>(t.failed),
                    t.failed ? "FAIL" : "PASS");
      out << line;
      if (t.failed) out << "  first failure: " << t.first_failure << "\n";
    }
    out << (all ? "all suites passed" : "property failures detected") << " over " << a.seeds << " seeds\n";
  }
  return all ? kOk : kPropertyFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Group consensus analysis and simulation for clustered multi-agent networks"};
  app.require_subcommand(1);
  const std::vector<std::string> formats{"text", "json"};

  AnalyzeArgs analyze_args;
  auto* analyze_cmd = app.add_subcommand("analyze", "Feasibility, spectra, gains and thresholds of a scenario");
  analyze_cmd->add_option("file", analyze_args.file, "Scenario JSON")->required();
  analyze_cmd->add_option("--format", analyze_args.format)->check(CLI::IsMember(formats));
  analyze_cmd->add_option("--out", analyze_args.out, "Write the report here instead of stdout");

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Integrate the closed loop and check the predicted limit");
  sim_cmd->add_option("file", sim_args.file, "Scenario JSON")->required();
  sim_cmd->add_option("--t-final", sim_args.t_final);
  sim_cmd->add_option("--dt", sim_args.dt);
  sim_cmd->add_option("--delta", sim_args.delta, "Number, auto-group or auto-pattern");
  sim_cmd->add_option("--seed", sim_args.seed);
  sim_cmd->add_option("--integrator", sim_args.integrator)->check(CLI::IsMember({"expm", "rk4"}));
  sim_cmd->add_option("--out-dir", sim_args.out_dir);
  sim_cmd->add_option("--format", sim_args.format)->check(CLI::IsMember(formats));

  GenArgs gen_args;
  auto* gen_cmd = app.add_subcommand("gen", "Random scenario whose clustering satisfies the partition condition");
  gen_cmd->add_option("--clusters", gen_args.clusters, "Cluster sizes, e.g. 3,3,3")->delimiter(',');
  gen_cmd->add_option("--intra-density", gen_args.intra_density);
  gen_cmd->add_option("--inter-density", gen_args.inter_density);
  gen_cmd->add_option("--weight-min", gen_args.weight_min);
  gen_cmd->add_option("--weight-max", gen_args.weight_max);
  gen_cmd->add_option("--seed", gen_args.seed)->required();
  gen_cmd->add_option("--out", gen_args.out, "Output file; stdout if omitted");

  VerifyArgs verify_args;
  auto* verify_cmd = app.add_subcommand("verify", "Run the property suites over seeded random graphs");
  verify_cmd->add_option("--seeds", verify_args.seeds)->required();
  verify_cmd->add_option("--threads", verify_args.threads, "0 uses every hardware thread");
  verify_cmd->add_flag("--inject-sign-bug", verify_args.inject_sign_bug, "Harness self-test");
  verify_cmd->add_option("--format", verify_args.format)->check(CLI::IsMember(formats));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*analyze_cmd) return cmd_analyze(analyze_args, out);
    if (*sim_cmd) return cmd_simulate(sim_args, out);
    if (*gen_cmd) return cmd_gen(gen_args, out);
    return cmd_verify(verify_args, out);
  } catch (const InfeasibleCoupling& e) {
    err << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace gcl::cli
