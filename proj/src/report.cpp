#include "gcl/report.hpp"

#include <json.hpp>

#include <cstdio>
#include <sstream>

namespace gcl {

using json = nlohmann::ordered_json;

namespace {

double rounded(double v) {
  if (!std::isfinite(v)) return v;
  return std::stod(format_number(v));
}

json number_json(double v) {
  if (!std::isfinite(v)) return v > 0 ? json("inf") : (v < 0 ? json("-inf") : json("nan"));
  return rounded(v);
}

// Values classified as zero print as exact zeros.
Complex shown(const Spectrum& s, const Complex& z) { return std::abs(z) <= s.zero_tolerance ? Complex(0.0) : z; }

json optional_json(const std::optional<double>& v) { return v ? number_json(*v) : json(nullptr); }

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(number_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json spectrum_json(const Spectrum& s) {
  json values = json::array();
  for (const Complex& value : s.values) {
    const Complex z = shown(s, value);
    values.push_back({number_json(z.real()), number_json(z.imag())});
  }
  return values;
}

// 1-based cluster ids.
json clusters_json(const std::vector<Index>& clusters) {
  json out = json::array();
  for (Index c : clusters) out.push_back(c + 1);
  return out;
}

std::string spectrum_text(const Spectrum& s) {
  std::ostringstream out;
  out << "[";
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    if (i) out << ", ";
    const Complex z = shown(s, s.values[i]);
    out << format_number(z.real());
    if (z.imag() != 0.0) out << (z.imag() < 0 ? " - " : " + ") << format_number(std::abs(z.imag())) << "i";
  }
  out << "]";
  return out.str();
}

std::string matrix_text(const Eigen::MatrixXd& m) {
  std::ostringstream out;
  out << "[";
  for (Index r = 0; r < m.rows(); ++r) {
    if (r) out << "; ";
    for (Index c = 0; c < m.cols(); ++c) out << (c ? ", " : "") << format_number(m(r, c));
  }
  out << "]";
  return out.str();
}

std::string clusters_text(const std::vector<Index>& clusters) {
  std::ostringstream out;
  out << "{";
  for (std::size_t i = 0; i < clusters.size(); ++i) out << (i ? ", " : "") << clusters[i] + 1;
  out << "}";
  return out.str();
}

std::string optional_text(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string("undefined");
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
  return buf;
}

AnalysisReport analyze(const ClusteredDigraph& g, const Dynamics& dyn, const ZeroTolerance& tol) {
  AnalysisReport r;
  r.original_ids = g.original_ids();
  r.cluster_sizes = g.cluster_sizes();
  r.eep = check_common_influence(g);
  r.quotient = quotient_graph(g);
  r.verdict = group_consensus_verdict(g, tol);
  r.full = eigenvalues(laplacian_of(g.weights()), tol);
  r.quotient_spectrum = eigenvalues(r.quotient.laplacian, tol);
  if (r.eep.holds) {
    r.reduced = reduced_laplacian(g, tol).split.reduced;
    r.reaches = reach_decomposition(r.quotient, g);
    if (r.verdict.cluster_trees.holds && r.reaches->common_agents > 0) {
      r.convex_weights = -r.reaches->lf.partialPivLu().solve(r.reaches->lfr);
    }
  }
  const RiccatiSolution sol = solve_riccati(dyn);
  r.p = sol.p;
  r.k = gain(sol.p, dyn.b);
  r.riccati_residual = sol.residual_norm;
  const CouplingThresholds th = coupling_thresholds(g, tol);
  r.delta_group = th.group;
  r.delta_pattern = th.pattern;
  return r;
}

std::string to_text(const AnalysisReport& r) {
  std::ostringstream out;
  const ConsensusVerdict& v = r.verdict;
  out << "feasible: " << (v.feasible ? "yes" : "no") << "\n";
  out << "common_influence: " << (r.eep.holds ? "holds" : "violated") << "\n";
  for (const EEPViolation& bad : r.eep.violations) {
    out << "  violation: block (" << bad.row_cluster + 1 << ", " << bad.col_cluster + 1
        << ") spread " << format_number(bad.spread) << " rows";
    for (Index row : bad.rows) out << " " << r.original_ids[row] + 1;
    out << "\n";
  }
  out << "quotient_weights: " << matrix_text(r.quotient.alpha) << "\n";
  out << "quotient_laplacian: " << matrix_text(r.quotient.laplacian) << "\n";
  out << "forest_size_graph: " << v.forest_graph << "\n";
  out << "forest_size_quotient: " << v.forest_quotient << "\n";
  out << "spectral_zeros_graph: " << v.zeros_graph << "\n";
  out << "spectral_zeros_quotient: " << v.zeros_quotient << "\n";
  if (!v.spectral_agrees) out << "warning: spectral zero counts disagree with the tree counts\n";
  out << "cluster_spanning_trees: " << (v.cluster_trees.holds ? "yes" : "no") << "\n";
  for (std::size_t i = 0; i < v.cluster_trees.roots.size(); ++i) {
    out << "  cluster " << i + 1 << " root: ";
    if (v.cluster_trees.roots[i]) {
      out << r.original_ids[*v.cluster_trees.roots[i]] + 1;
    } else {
      out << "none";
    }
    out << "\n";
  }
  if (!v.criteria_agree) out << "error: tree-count and cluster-spanning-tree criteria disagree\n";
  out << "spectrum_L: " << spectrum_text(r.full) << "\n";
  out << "spectrum_LG: " << spectrum_text(r.quotient_spectrum) << "\n";
  out << "spectrum_Lhat: " << (r.reduced ? spectrum_text(*r.reduced) : std::string("undefined")) << "\n";
  out << "riccati_P: " << matrix_text(r.p) << "\n";
  out << "gain_K: " << matrix_text(r.k) << "\n";
  out << "riccati_residual: " << format_number(r.riccati_residual) << "\n";
  out << "delta_group: " << optional_text(r.delta_group) << "\n";
  out << "delta_pattern: " << optional_text(r.delta_pattern) << "\n";
  if (r.reaches) {
    out << "reach_count: " << r.reaches->reach_count << "\n";
    for (std::size_t p = 0; p < r.reaches->reaches.size(); ++p) {
      out << "  reach " << p + 1 << ": " << clusters_text(r.reaches->reaches[p]) << " exclusive "
          << clusters_text(r.reaches->exclusive[p]) << "\n";
    }
    out << "common_part: " << clusters_text(r.reaches->common) << "\n";
  }
  out << "convex_weights: " << (r.convex_weights ? matrix_text(*r.convex_weights) : std::string("none"))
      << "\n";
  return out.str();
}

std::string to_json(const AnalysisReport& r) {
  const ConsensusVerdict& v = r.verdict;
  json doc;
  doc["feasible"] = v.feasible;
  json eep;
  eep["holds"] = r.eep.holds;
  eep["beta"] = matrix_json(r.eep.beta);
  json violations = json::array();
  for (const EEPViolation& bad : r.eep.violations) {
    json rows = json::array();
    for (Index row : bad.rows) rows.push_back(r.original_ids[row] + 1);
    violations.push_back({{"block", {bad.row_cluster + 1, bad.col_cluster + 1}},
                          {"rows", rows},
                          {"spread", number_json(bad.spread)}});
  }
  eep["violations"] = violations;
  doc["common_influence"] = eep;
  doc["quotient_weights"] = matrix_json(r.quotient.alpha);
  doc["quotient_laplacian"] = matrix_json(r.quotient.laplacian);
  doc["forest_size_graph"] = v.forest_graph;
  doc["forest_size_quotient"] = v.forest_quotient;
  doc["spectral_zeros_graph"] = v.zeros_graph;
  doc["spectral_zeros_quotient"] = v.zeros_quotient;
  doc["spectral_agrees"] = v.spectral_agrees;
  json roots = json::array();
  for (const auto& root : v.cluster_trees.roots) {
    roots.push_back(root ? json(r.original_ids[*root] + 1) : json(nullptr));
  }
  doc["cluster_spanning_trees"] = {{"holds", v.cluster_trees.holds}, {"roots", roots}};
  doc["criteria_agree"] = v.criteria_agree;
  doc["spectrum_L"] = spectrum_json(r.full);
  doc["spectrum_LG"] = spectrum_json(r.quotient_spectrum);
  doc["spectrum_Lhat"] = r.reduced ? spectrum_json(*r.reduced) : json(nullptr);
  doc["riccati_P"] = matrix_json(r.p);
  doc["gain_K"] = matrix_json(r.k);
  doc["riccati_residual"] = number_json(r.riccati_residual);
  doc["delta_group"] = optional_json(r.delta_group);
  doc["delta_pattern"] = optional_json(r.delta_pattern);
  if (r.reaches) {
    json reaches = json::array();
    for (std::size_t p = 0; p < r.reaches->reaches.size(); ++p) {
      reaches.push_back({{"clusters", clusters_json(r.reaches->reaches[p])},
                         {"exclusive", clusters_json(r.reaches->exclusive[p])}});
    }
    doc["reaches"] = {{"count", r.reaches->reach_count},
                      {"reaches", reaches},
                      {"common", clusters_json(r.reaches->common)}};
  } else {
    doc["reaches"] = nullptr;
  }
  doc["convex_weights"] = r.convex_weights ? matrix_json(*r.convex_weights) : json(nullptr);
  return doc.dump(2) + "\n";
}

}  // namespace gcl
