#include "gcl/quotient.hpp"

#include <algorithm>
#include <cmath>

namespace gcl {

EEPReport check_common_influence(const ClusteredDigraph& g) {
  const Laplacian lap = laplacian(g);
  const Index n = g.cluster_count();

  // Row sums of every block, gathered first so the tolerance can scale with them.
  std::vector<Eigen::VectorXd> sums(static_cast<std::size_t>(n * n));
  double scale = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      Eigen::VectorXd s = lap.block(i, j).rowwise().sum();
      scale = std::max(scale, s.cwiseAbs().maxCoeff());
      sums[i * n + j] = std::move(s);
    }
  }

  EEPReport report;
  report.tolerance = 1e-9 * (1.0 + scale);
  report.beta = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const Eigen::VectorXd& s = sums[i * n + j];
      const double mean = s.mean();
      report.beta(i, j) = mean;
      const double spread = s.maxCoeff() - s.minCoeff();
      bool bad = false;
      EEPViolation v{i, j, {}, spread};
      for (Index r = 0; r < s.size(); ++r) {
        if (std::abs(s(r) - mean) > report.tolerance) {
          v.rows.push_back(g.cluster_offset(i) + r);
          bad = true;
        }
      }
      if (bad) report.violations.push_back(std::move(v));
    }
  }
  report.holds = report.violations.empty();
  return report;
}

QuotientGraph quotient_graph(const ClusteredDigraph& g) {
  const Index n = g.cluster_count();
  const Eigen::MatrixXd& w = g.weights();
  QuotientGraph q;
  q.alpha = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      q.alpha(i, j) = w.block(g.cluster_offset(i), g.cluster_offset(j), g.cluster_size(i),
                              g.cluster_size(j))
                          .sum() /
                      static_cast<double>(g.cluster_size(i));
    }
  }
  q.laplacian = laplacian_of(q.alpha);
  return q;
}

}  // namespace gcl
