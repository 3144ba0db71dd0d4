#pragma once

#include "gcl/control.hpp"
#include "gcl/quotient.hpp"
#include "gcl/reduction.hpp"
#include "gcl/simulate.hpp"
#include "gcl/verdict.hpp"

#include <optional>
#include <string>

namespace gcl {

/// Everything `analyze` reports about one scenario.
struct AnalysisReport {
  std::vector<Index> original_ids;      // internal index -> 0-based file agent id
  std::vector<Index> cluster_sizes;
  EEPReport eep;
  QuotientGraph quotient;
  ConsensusVerdict verdict;
  Spectrum full;
  Spectrum quotient_spectrum;
  std::optional<Spectrum> reduced;      // only under the partition condition
  Eigen::MatrixXd p;
  Eigen::MatrixXd k;
  double riccati_residual = 0.0;
  std::optional<double> delta_group;
  std::optional<double> delta_pattern;
  std::optional<ReachDecomposition> reaches;
  std::optional<Eigen::MatrixXd> convex_weights;
};

AnalysisReport analyze(const ClusteredDigraph& g, const Dynamics& dyn, const ZeroTolerance& tol = {});

/// Fixed field order; floating point values carry 12 significant digits.
std::string to_text(const AnalysisReport& r);
std::string to_json(const AnalysisReport& r);

/// "%.12g" rendering used by every report and CSV.
std::string format_number(double v);

}  // namespace gcl
