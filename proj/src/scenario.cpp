#include "gcl/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace gcl {

using json = nlohmann::json;

namespace {

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw ScenarioError("field '" + path + "': " + what);
}

const json& member(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.contains(key)) field_error(path + key, "missing");
  return obj.at(key);
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) field_error(path, "expected a number");
  return j.get<double>();
}

Index integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) field_error(path, "expected an integer");
  return j.get<Index>();
}

Eigen::MatrixXd matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) field_error(path, "expected a nonempty array of rows");
  const Index rows = static_cast<Index>(j.size());
  Index cols = -1;
  Eigen::MatrixXd m;
  for (Index r = 0; r < rows; ++r) {
    const json& row = j[r];
    const std::string rp = path + "[" + std::to_string(r) + "]";
    if (!row.is_array() || row.empty()) field_error(rp, "expected a nonempty array of numbers");
    if (cols == -1) {
      cols = static_cast<Index>(row.size());
      m.resize(rows, cols);
    } else if (static_cast<Index>(row.size()) != cols) {
      field_error(rp, "row length differs from the first row");
    }
    for (Index c = 0; c < cols; ++c) m(r, c) = number(row[c], rp + "[" + std::to_string(c) + "]");
  }
  return m;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string location(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

CouplingSpec parse_coupling(const std::string& text) {
  if (text == "auto-group") return {CouplingSpec::Mode::AutoGroup, 0.0};
  if (text == "auto-pattern") return {CouplingSpec::Mode::AutoPattern, 0.0};
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !(v > 0.0) || !std::isfinite(v)) {
    throw ScenarioError("coupling must be a positive number, auto-group or auto-pattern (got '" + text + "')");
  }
  return {CouplingSpec::Mode::Value, v};
}

std::string to_string(const CouplingSpec& c) {
  switch (c.mode) {
    case CouplingSpec::Mode::AutoGroup:
      return "auto-group";
    case CouplingSpec::Mode::AutoPattern:
      return "auto-pattern";
    case CouplingSpec::Mode::Value:
      break;
  }
  std::ostringstream out;
  out.precision(17);
  out << c.value;
  return out.str();
}

bool ScenarioFile::operator==(const ScenarioFile& o) const {
  if (agents != o.agents || clusters != o.clusters || edges.size() != o.edges.size()) return false;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges[i].from != o.edges[i].from || edges[i].to != o.edges[i].to ||
        edges[i].weight != o.edges[i].weight) {
      return false;
    }
  }
  auto same = [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() && x == y;
  };
  if (!same(a, o.a) || !same(b, o.b) || q.has_value() != o.q.has_value()) return false;
  if (q && !same(*q, *o.q)) return false;
  return coupling == o.coupling && sim == o.sim;
}

ScenarioFile parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError("malformed JSON at " + location(text, e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) throw ScenarioError("scenario must be a JSON object");

  ScenarioFile s;
  s.agents = integer(member(doc, "agents", ""), "agents");
  if (s.agents < 1) field_error("agents", "must be positive");

  const json& clusters = member(doc, "clusters", "");
  if (!clusters.is_array() || clusters.empty()) field_error("clusters", "expected a nonempty array");
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const std::string path = "clusters[" + std::to_string(i) + "]";
    if (!clusters[i].is_array()) field_error(path, "expected an array of agent ids");
    std::vector<Index> ids;
    for (std::size_t k = 0; k < clusters[i].size(); ++k) {
      ids.push_back(integer(clusters[i][k], path + "[" + std::to_string(k) + "]"));
    }
    s.clusters.push_back(std::move(ids));
  }

  const json& edges = member(doc, "edges", "");
  if (!edges.is_array()) field_error("edges", "expected an array");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string path = "edges[" + std::to_string(i) + "]";
    if (!edges[i].is_object()) field_error(path, "expected an object");
    Edge e;
    e.from = integer(member(edges[i], "from", path + "."), path + ".from");
    e.to = integer(member(edges[i], "to", path + "."), path + ".to");
    e.weight = number(member(edges[i], "weight", path + "."), path + ".weight");
    s.edges.push_back(e);
  }

  const json& dyn = member(doc, "dynamics", "");
  if (!dyn.is_object()) field_error("dynamics", "expected an object");
  s.a = matrix(member(dyn, "A", "dynamics."), "dynamics.A");
  s.b = matrix(member(dyn, "B", "dynamics."), "dynamics.B");
  if (dyn.contains("Q") && !dyn.at("Q").is_null()) s.q = matrix(dyn.at("Q"), "dynamics.Q");

  if (doc.contains("coupling")) {
    const json& c = doc.at("coupling");
    if (!c.is_object()) field_error("coupling", "expected an object");
    const json& d = member(c, "delta", "coupling.");
    if (d.is_string()) {
      try {
        s.coupling = parse_coupling(d.get<std::string>());
      } catch (const ScenarioError& e) {
        field_error("coupling.delta", e.what());
      }
    } else {
      const double v = number(d, "coupling.delta");
      if (!(v > 0.0)) field_error("coupling.delta", "must be positive");
      s.coupling = {CouplingSpec::Mode::Value, v};
    }
  }

  if (doc.contains("sim")) {
    const json& sim = doc.at("sim");
    if (!sim.is_object()) field_error("sim", "expected an object");
    if (sim.contains("t_final")) s.sim.t_final = number(sim.at("t_final"), "sim.t_final");
    if (sim.contains("dt")) s.sim.dt = number(sim.at("dt"), "sim.dt");
    if (sim.contains("integrator")) {
      const json& integ = sim.at("integrator");
      if (integ == "expm") {
        s.sim.integrator = Integrator::Expm;
      } else if (integ == "rk4") {
        s.sim.integrator = Integrator::Rk4;
      } else {
        field_error("sim.integrator", "expected \"expm\" or \"rk4\"");
      }
    }
    if (sim.contains("seed")) {
      const json& seed = sim.at("seed");
      if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
        field_error("sim.seed", "expected a nonnegative integer");
      }
      s.sim.seed = seed.get<std::uint64_t>();
    }
    if (sim.contains("x0") && !sim.at("x0").is_null()) {
      const json& x0 = sim.at("x0");
      if (!x0.is_array()) field_error("sim.x0", "expected an array of numbers");
      std::vector<double> values;
      for (std::size_t i = 0; i < x0.size(); ++i) {
        values.push_back(number(x0[i], "sim.x0[" + std::to_string(i) + "]"));
      }
      s.sim.x0 = std::move(values);
    }
  }
  return s;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot read scenario file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string serialize_scenario(const ScenarioFile& s) {
  json doc;
  doc["agents"] = s.agents;
  doc["clusters"] = s.clusters;
  json edges = json::array();
  for (const Edge& e : s.edges) edges.push_back({{"from", e.from}, {"to", e.to}, {"weight", e.weight}});
  doc["edges"] = std::move(edges);
  json dyn;
  dyn["A"] = matrix_json(s.a);
  dyn["B"] = matrix_json(s.b);
  if (s.q) dyn["Q"] = matrix_json(*s.q);
  doc["dynamics"] = std::move(dyn);
  if (s.coupling.mode == CouplingSpec::Mode::Value) {
    doc["coupling"] = {{"delta", s.coupling.value}};
  } else {
    doc["coupling"] = {{"delta", to_string(s.coupling)}};
  }
  json sim;
  sim["t_final"] = s.sim.t_final;
  sim["dt"] = s.sim.dt;
  sim["integrator"] = s.sim.integrator == Integrator::Expm ? "expm" : "rk4";
  sim["seed"] = s.sim.seed;
  if (s.sim.x0) sim["x0"] = *s.sim.x0;
  doc["sim"] = std::move(sim);
  return doc.dump(2) + "\n";
}

ClusteredDigraph to_graph(const ScenarioFile& s) {
  std::vector<std::vector<Index>> clusters;
  for (const auto& c : s.clusters) {
    std::vector<Index> ids;
    for (Index id : c) ids.push_back(id - 1);
    clusters.push_back(std::move(ids));
  }
  std::vector<Edge> edges;
  for (const Edge& e : s.edges) edges.push_back({e.from - 1, e.to - 1, e.weight});
  return build_graph(s.agents, clusters, edges);
}

Dynamics to_dynamics(const ScenarioFile& s) {
  return make_dynamics(s.a, s.b, s.q.value_or(Eigen::MatrixXd{}));
}

Eigen::VectorXd initial_state(const ScenarioFile& s, const ClusteredDigraph& g) {
  const Index n = s.a.rows();
  const Index agents = g.agent_count();
  Eigen::VectorXd file_order;
  if (s.sim.x0) {
    if (static_cast<Index>(s.sim.x0->size()) != n * agents) {
      throw ScenarioError("field 'sim.x0': expected " + std::to_string(n * agents) + " entries");
    }
    file_order = Eigen::Map<const Eigen::VectorXd>(s.sim.x0->data(), n * agents);
  } else {
    file_order = random_initial_state(n, agents, s.sim.seed);
  }
  Eigen::VectorXd x(n * agents);
  for (Index i = 0; i < agents; ++i) x.segment(i * n, n) = file_order.segment(g.original_ids()[i] * n, n);
  return x;
}

Eigen::MatrixXd oscillator_a() {
  Eigen::MatrixXd a(2, 2);
  a << 0.0, 1.0, -1.0, 0.0;
  return a;
}

Eigen::MatrixXd oscillator_b() {
  Eigen::MatrixXd b(2, 1);
  b << 0.0, 1.0;
  return b;
}

}  // namespace gcl
