#include "gcl/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace gcl {

Eigen::MatrixXd assemble_reduced_laplacian(const Laplacian& lap) {
  const Index n = lap.block_count();
  Index total = 0;
  std::vector<Index> offsets, sizes;
  for (Index i = 0; i < n; ++i) {
    offsets.push_back(total);
    sizes.push_back(lap.block(i, i).rows() - 1);
    total += sizes.back();
  }
  Eigen::MatrixXd lhat(total, total);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const auto lij = lap.block(i, j);
      const Index ri = sizes[i], cj = sizes[j];
      if (ri == 0 || cj == 0) continue;
      const Eigen::RowVectorXd gamma = lij.row(0).tail(cj);
      lhat.block(offsets[i], offsets[j], ri, cj) =
          lij.bottomRightCorner(ri, cj) - Eigen::VectorXd::Ones(ri) * gamma;
    }
  }
  return lhat;
}

ReductionReport reduced_laplacian(const ClusteredDigraph& g, const ZeroTolerance& tol) {
  const EEPReport eep = check_common_influence(g);
  if (!eep.holds) {
    throw ReductionError("clustering is not an external equitable partition");
  }
  const Laplacian lap = laplacian(g);
  const Index n = g.cluster_count();

  ReductionReport report;
  report.lhat = assemble_reduced_laplacian(lap);
  Index offset = 0;
  report.gamma.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    report.block_offsets.push_back(offset);
    report.block_sizes.push_back(g.cluster_size(i) - 1);
    offset += g.cluster_size(i) - 1;
    for (Index j = 0; j < n; ++j) {
      report.gamma[i].push_back(lap.block(i, j).row(0).tail(g.cluster_size(j) - 1).transpose());
    }
  }

  const QuotientGraph q = quotient_graph(g);
  SpectrumSplit& split = report.split;
  split.full = eigenvalues(lap.matrix(), tol);
  split.quotient = eigenvalues(q.laplacian, tol);
  split.reduced = eigenvalues(report.lhat, tol);
  const SpectrumMatch m = match_spectra(split.full, merge(split.quotient, split.reduced), 1e-6);
  split.verified = m.matched;
  split.max_deviation = m.max_deviation;
  if (!split.verified) {
    std::ostringstream msg;
    msg << "spectrum of L does not split into quotient and reduced parts (deviation "
        << m.max_deviation << ")";
    throw ReductionError(msg.str());
  }
  return report;
}

SimilarityDecomposition similarity_decomposition(const ClusteredDigraph& g) {
  const EEPReport eep = check_common_influence(g);
  if (!eep.holds) {
    throw ReductionError("clustering is not an external equitable partition");
  }
  const Index total = g.agent_count();
  const Index n = g.cluster_count();
  const Eigen::MatrixXd lap = laplacian_of(g.weights());

  SimilarityDecomposition d;
  d.transform = Eigen::MatrixXd::Identity(total, total);
  Eigen::MatrixXd inverse = Eigen::MatrixXd::Identity(total, total);
  for (Index i = 0; i < n; ++i) {
    const Index o = g.cluster_offset(i);
    for (Index r = 1; r < g.cluster_size(i); ++r) {
      d.transform(o + r, o) = 1.0;
      inverse(o + r, o) = -1.0;
    }
  }
  d.transformed = inverse * lap * d.transform;

  for (Index i = 0; i < n; ++i) d.permutation.push_back(g.cluster_offset(i));
  for (Index i = 0; i < n; ++i) {
    for (Index r = 1; r < g.cluster_size(i); ++r) d.permutation.push_back(g.cluster_offset(i) + r);
  }
  d.permuted.resize(total, total);
  for (Index r = 0; r < total; ++r) {
    for (Index c = 0; c < total; ++c) d.permuted(r, c) = d.transformed(d.permutation[r], d.permutation[c]);
  }
  const Index rest = total - n;
  d.quotient_block = d.permuted.topLeftCorner(n, n);
  d.gamma_block = d.permuted.topRightCorner(n, rest);
  d.lower_left = d.permuted.bottomLeftCorner(rest, n);
  d.reduced_block = d.permuted.bottomRightCorner(rest, rest);

  // Compare against the independently assembled pieces.
  const QuotientGraph q = quotient_graph(g);
  const Eigen::MatrixXd lhat = assemble_reduced_laplacian(Laplacian(lap, g.cluster_sizes()));
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(total, total);
  expected.topLeftCorner(n, n) = q.laplacian;
  expected.bottomRightCorner(rest, rest) = lhat;
  Index col = n;
  for (Index j = 0; j < n; ++j) {
    const Index width = g.cluster_size(j) - 1;
    for (Index i = 0; i < n; ++i) {
      for (Index c = 0; c < width; ++c) {
        expected(i, col + c) = lap(g.cluster_offset(i), g.cluster_offset(j) + 1 + c);
      }
    }
    col += width;
  }
  d.max_deviation = total == 0 ? 0.0 : (d.permuted - expected).cwiseAbs().maxCoeff();
  const double norm_inf = lap.cwiseAbs().rowwise().sum().maxCoeff();
  if (d.max_deviation > 1e-10 * std::max(norm_inf, 1.0)) {
    std::ostringstream msg;
    msg << "similarity transform disagrees with the reduced Laplacian (deviation " << d.max_deviation
        << ")";
    throw ReductionError(msg.str());
  }
  return d;
}

ReachDecomposition reach_decomposition(const QuotientGraph& q, const ClusteredDigraph& g) {
  if (q.size() != g.cluster_count()) throw ReductionError("quotient does not match the graph");
  const Condensation cond = condensation(q.alpha);

  ReachDecomposition r;
  for (Index source : cond.sources()) {
    r.reaches.push_back(reachable_set(q.alpha, cond.components[source].front()).members);
  }
  r.reach_count = static_cast<Index>(r.reaches.size());

  std::vector<int> hits(static_cast<std::size_t>(q.size()), 0);
  for (const auto& reach : r.reaches) {
    for (Index c : reach) ++hits[c];
  }
  for (const auto& reach : r.reaches) {
    std::vector<Index> v;
    for (Index c : reach) {
      if (hits[c] == 1) v.push_back(c);
    }
    r.exclusive.push_back(std::move(v));
  }
  for (Index c = 0; c < q.size(); ++c) {
    if (hits[c] > 1) r.common.push_back(c);
  }

  for (const auto& v : r.exclusive) r.cluster_order.insert(r.cluster_order.end(), v.begin(), v.end());
  r.cluster_order.insert(r.cluster_order.end(), r.common.begin(), r.common.end());
  if (static_cast<Index>(r.cluster_order.size()) != q.size()) {
    throw ReductionError("reaches do not cover the quotient graph");
  }

  for (const auto& v : r.exclusive) {
    Index count = 0;
    for (Index c : v) {
      for (Index a : g.cluster_members(c)) r.agent_order.push_back(a);
      count += g.cluster_size(c);
    }
    r.reach_agent_counts.push_back(count);
    r.reach_agents += count;
  }
  for (Index c : r.common) {
    for (Index a : g.cluster_members(c)) r.agent_order.push_back(a);
    r.common_agents += g.cluster_size(c);
  }

  const Eigen::MatrixXd lap = laplacian_of(g.weights());
  const Index total = g.agent_count();
  r.permuted_laplacian.resize(total, total);
  for (Index i = 0; i < total; ++i) {
    for (Index j = 0; j < total; ++j) r.permuted_laplacian(i, j) = lap(r.agent_order[i], r.agent_order[j]);
  }

  const Index nr = r.reach_agents, nf = r.common_agents;
  r.lr = r.permuted_laplacian.topLeftCorner(nr, nr);
  r.lfr = r.permuted_laplacian.bottomLeftCorner(nf, nr);
  r.lf = r.permuted_laplacian.bottomRightCorner(nf, nf);
  if (nf > 0 && nr > 0 && (r.permuted_laplacian.topRightCorner(nr, nf).array() != 0.0).any()) {
    throw ReductionError("reach ordering leaves links from the common part into a reach");
  }
  Index offset = 0;
  for (Index count : r.reach_agent_counts) {
    r.reach_laplacians.push_back(r.lr.block(offset, offset, count, count));
    // Off-diagonal blocks of L_R must vanish exactly.
    Eigen::MatrixXd rows = r.lr.middleRows(offset, count);
    rows.middleCols(offset, count).setZero();
    if ((rows.array() != 0.0).any()) {
      throw ReductionError("reach ordering couples two exclusive parts");
    }
    offset += count;
  }
  return r;
}

}  // namespace gcl
