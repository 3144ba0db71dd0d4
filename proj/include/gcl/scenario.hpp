#pragma once

#include "gcl/control.hpp"
#include "gcl/graph.hpp"
#include "gcl/simulate.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gcl {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CouplingSpec {
  enum class Mode { Value, AutoGroup, AutoPattern };
  Mode mode = Mode::AutoPattern;
  double value = 0.0;

  bool operator==(const CouplingSpec&) const = default;
};

/// Parses a number or one of "auto-group" / "auto-pattern".
CouplingSpec parse_coupling(const std::string& text);
std::string to_string(const CouplingSpec& c);

struct SimSpec {
  double t_final = 200.0;
  double dt = 1e-3;
  Integrator integrator = Integrator::Expm;
  std::uint64_t seed = 0;
  std::optional<std::vector<double>> x0;  // flat, agent-major in the file's agent numbering

  bool operator==(const SimSpec&) const = default;
};

/**
 * In-memory form of the JSON scenario document. Agent ids are 1-based as in
 * the file; matrices are stored row-major as arrays of rows.
 */
struct ScenarioFile {
  Index agents = 0;
  std::vector<std::vector<Index>> clusters;
  std::vector<Edge> edges;
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  std::optional<Eigen::MatrixXd> q;
  CouplingSpec coupling;
  SimSpec sim;

  bool operator==(const ScenarioFile& other) const;
};

/// Throws ScenarioError with a line/column or field path in the message.
ScenarioFile parse_scenario(const std::string& text);
ScenarioFile load_scenario(const std::filesystem::path& path);
std::string serialize_scenario(const ScenarioFile& s);

ClusteredDigraph to_graph(const ScenarioFile& s);
Dynamics to_dynamics(const ScenarioFile& s);

/// Initial state in internal agent order: the file's x0 if present, else a
/// seeded standard normal draw.
Eigen::VectorXd initial_state(const ScenarioFile& s, const ClusteredDigraph& g);

/// The standard harmonic oscillator x1' = x2, x2' = -x1 + u.
Eigen::MatrixXd oscillator_a();
Eigen::MatrixXd oscillator_b();

}  // namespace gcl
