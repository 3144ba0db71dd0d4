#include "gcl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <string>

namespace gcl {

namespace {

// out[k] lists every l with w(l, k) > 0.
std::vector<std::vector<Index>> out_lists(const Eigen::MatrixXd& w) {
  std::vector<std::vector<Index>> out(static_cast<std::size_t>(w.rows()));
  for (Index k = 0; k < w.cols(); ++k) {
    for (Index l = 0; l < w.rows(); ++l) {
      if (l != k && w(l, k) > 0.0) out[k].push_back(l);
    }
  }
  return out;
}

NodeSet search(const std::vector<std::vector<Index>>& adj, Index start) {
  std::vector<bool> seen(adj.size(), false);
  std::vector<Index> stack{start};
  seen[start] = true;
  while (!stack.empty()) {
    const Index v = stack.back();
    stack.pop_back();
    for (Index u : adj[v]) {
      if (!seen[u]) {
        seen[u] = true;
        stack.push_back(u);
      }
    }
  }
  NodeSet result;
  for (std::size_t v = 0; v < seen.size(); ++v) {
    if (seen[v]) result.members.push_back(static_cast<Index>(v));
  }
  return result;
}

void check_square(const Eigen::MatrixXd& w) {
  if (w.rows() != w.cols()) throw GraphError("adjacency matrix must be square");
}

void check_node(const Eigen::MatrixXd& w, Index node) {
  if (node < 0 || node >= w.rows()) {
    throw GraphError("node " + std::to_string(node) + " out of range");
  }
}

}  // namespace

bool NodeSet::contains(Index v) const {
  return std::binary_search(members.begin(), members.end(), v);
}

bool NodeSet::includes(const NodeSet& other) const {
  return std::includes(members.begin(), members.end(), other.members.begin(), other.members.end());
}

std::vector<Index> ClusteredDigraph::cluster_members(Index i) const {
  std::vector<Index> m(static_cast<std::size_t>(cluster_size(i)));
  std::iota(m.begin(), m.end(), cluster_offset(i));
  return m;
}

std::vector<Edge> ClusteredDigraph::edges() const {
  std::vector<Edge> result;
  for (Index k = 0; k < agent_count(); ++k) {
    for (Index l = 0; l < agent_count(); ++l) {
      if (weights_(l, k) > 0.0) result.push_back({k, l, weights_(l, k)});
    }
  }
  return result;
}

bool ClusteredDigraph::relabeled() const {
  for (std::size_t i = 0; i < original_ids_.size(); ++i) {
    if (original_ids_[i] != static_cast<Index>(i)) return true;
  }
  return false;
}

ClusteredDigraph make_clustered_digraph(Eigen::MatrixXd weights, std::vector<Index> sizes,
                                        std::vector<Index> original_ids) {
  check_square(weights);
  const Index n = weights.rows();
  if (n < 1) throw GraphError("graph needs at least one agent");
  if (!weights.allFinite()) throw GraphError("weights must be finite");
  if ((weights.array() < 0.0).any()) throw GraphError("weights must be nonnegative");
  if ((weights.diagonal().array() != 0.0).any()) throw GraphError("self-loops are not allowed");
  if (sizes.empty()) throw GraphError("clustering must contain at least one cluster");
  Index total = 0;
  for (Index s : sizes) {
    if (s < 1) throw GraphError("clusters must be nonempty");
    total += s;
  }
  if (total != n) throw GraphError("cluster sizes must sum to the agent count");
  if (static_cast<Index>(original_ids.size()) != n) throw GraphError("relabel map size mismatch");
  if (!weakly_connected(weights)) throw GraphError("graph is not weakly connected");

  ClusteredDigraph g;
  g.weights_ = std::move(weights);
  g.sizes_ = std::move(sizes);
  g.offsets_.resize(g.sizes_.size());
  g.cluster_of_.resize(static_cast<std::size_t>(n));
  Index offset = 0;
  for (std::size_t i = 0; i < g.sizes_.size(); ++i) {
    g.offsets_[i] = offset;
    for (Index a = 0; a < g.sizes_[i]; ++a) g.cluster_of_[offset + a] = static_cast<Index>(i);
    offset += g.sizes_[i];
  }
  g.original_ids_ = std::move(original_ids);
  g.internal_of_.assign(static_cast<std::size_t>(n), -1);
  for (Index i = 0; i < n; ++i) g.internal_of_.at(g.original_ids_[i]) = i;
  return g;
}

ClusteredDigraph build_graph(Index agent_count, const std::vector<std::vector<Index>>& clusters,
                             const std::vector<Edge>& edges) {
  if (agent_count < 1) throw GraphError("agent count must be positive");
  std::vector<Index> internal(static_cast<std::size_t>(agent_count), -1);
  std::vector<Index> original;
  std::vector<Index> sizes;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    if (clusters[c].empty()) throw GraphError("cluster " + std::to_string(c) + " is empty");
    for (Index a : clusters[c]) {
      if (a < 0 || a >= agent_count) {
        throw GraphError("cluster " + std::to_string(c) + " lists unknown agent " + std::to_string(a));
      }
      if (internal[a] != -1) throw GraphError("agent " + std::to_string(a) + " is in several clusters");
      internal[a] = static_cast<Index>(original.size());
      original.push_back(a);
    }
    sizes.push_back(static_cast<Index>(clusters[c].size()));
  }
  if (static_cast<Index>(original.size()) != agent_count) {
    throw GraphError("clusters do not cover every agent");
  }

  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(agent_count, agent_count);
  for (const Edge& e : edges) {
    if (e.from < 0 || e.from >= agent_count || e.to < 0 || e.to >= agent_count) {
      throw GraphError("edge endpoint out of range");
    }
    if (e.from == e.to) throw GraphError("self-loop on agent " + std::to_string(e.from));
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw GraphError("edge weights must be positive and finite");
    }
    double& slot = w(internal[e.to], internal[e.from]);
    if (slot != 0.0) {
      throw GraphError("duplicate edge " + std::to_string(e.from) + " -> " + std::to_string(e.to));
    }
    slot = e.weight;
  }
  return make_clustered_digraph(std::move(w), std::move(sizes), std::move(original));
}

ClusteredDigraph build_graph(const Eigen::MatrixXd& weights, const std::vector<Index>& cluster_sizes) {
  std::vector<Index> ids(static_cast<std::size_t>(weights.rows()));
  std::iota(ids.begin(), ids.end(), Index{0});
  return make_clustered_digraph(weights, cluster_sizes, std::move(ids));
}

Laplacian::Laplacian(Eigen::MatrixXd entries, std::vector<Index> sizes)
    : entries_(std::move(entries)), sizes_(std::move(sizes)) {
  Index offset = 0;
  for (Index s : sizes_) {
    offsets_.push_back(offset);
    offset += s;
  }
  if (offset != entries_.rows()) throw GraphError("block sizes do not match the Laplacian");
}

Eigen::Block<const Eigen::MatrixXd> Laplacian::block(Index i, Index j) const {
  return entries_.block(offsets_.at(i), offsets_.at(j), sizes_.at(i), sizes_.at(j));
}

Laplacian laplacian(const ClusteredDigraph& g) {
  return Laplacian(laplacian_of(g.weights()), g.cluster_sizes());
}

NodeSet reachable_set(const Eigen::MatrixXd& weights, Index node) {
  check_square(weights);
  check_node(weights, node);
  return search(out_lists(weights), node);
}

NodeSet ancestors(const Eigen::MatrixXd& weights, Index node) {
  check_square(weights);
  check_node(weights, node);
  return search(out_lists(weights.transpose()), node);
}

NodeSet common_ancestors(const Eigen::MatrixXd& weights, const std::vector<Index>& targets) {
  check_square(weights);
  const auto in = out_lists(weights.transpose());
  NodeSet acc;
  acc.members.resize(static_cast<std::size_t>(weights.rows()));
  std::iota(acc.members.begin(), acc.members.end(), Index{0});
  for (Index t : targets) {
    check_node(weights, t);
    const NodeSet a = search(in, t);
    NodeSet next;
    std::set_intersection(acc.members.begin(), acc.members.end(), a.members.begin(), a.members.end(),
                          std::back_inserter(next.members));
    acc = std::move(next);
    if (acc.empty()) break;
  }
  return acc;
}

bool weakly_connected(const Eigen::MatrixXd& weights) {
  check_square(weights);
  if (weights.rows() == 0) return false;
  const Eigen::MatrixXd sym = weights + weights.transpose();
  return static_cast<Index>(search(out_lists(sym), 0).size()) == weights.rows();
}

std::vector<Index> Condensation::sources() const {
  std::vector<Index> s;
  for (std::size_t c = 0; c < is_source.size(); ++c) {
    if (is_source[c]) s.push_back(static_cast<Index>(c));
  }
  return s;
}

Condensation condensation(const Eigen::MatrixXd& weights) {
  check_square(weights);
  const auto out = out_lists(weights);
  const Index n = weights.rows();

  // Iterative Tarjan.
  std::vector<Index> index(n, -1), low(n, 0), raw_comp(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<Index> stack;
  std::vector<std::pair<Index, std::size_t>> frames;
  Index counter = 0, comp_count = 0;
  for (Index root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    frames.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      auto& [v, next] = frames.back();
      if (next < out[v].size()) {
        const Index u = out[v][next++];
        if (index[u] == -1) {
          index[u] = low[u] = counter++;
          stack.push_back(u);
          on_stack[u] = true;
          frames.push_back({u, 0});
        } else if (on_stack[u]) {
          low[v] = std::min(low[v], index[u]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        Index u;
        do {
          u = stack.back();
          stack.pop_back();
          on_stack[u] = false;
          raw_comp[u] = comp_count;
        } while (u != v);
        ++comp_count;
      }
      const Index finished = v;
      frames.pop_back();
      if (!frames.empty()) {
        const Index parent = frames.back().first;
        low[parent] = std::min(low[parent], low[finished]);
      }
    }
  }

  // Renumber components by smallest member.
  std::vector<Index> renumber(comp_count, -1);
  Index next_id = 0;
  for (Index v = 0; v < n; ++v) {
    if (renumber[raw_comp[v]] == -1) renumber[raw_comp[v]] = next_id++;
  }
  Condensation c;
  c.component_of.resize(n);
  c.components.resize(comp_count);
  for (Index v = 0; v < n; ++v) {
    c.component_of[v] = renumber[raw_comp[v]];
    c.components[c.component_of[v]].push_back(v);
  }
  std::vector<std::set<Index>> succ(comp_count);
  c.is_source.assign(comp_count, true);
  for (Index v = 0; v < n; ++v) {
    for (Index u : out[v]) {
      const Index cv = c.component_of[v], cu = c.component_of[u];
      if (cv != cu) {
        succ[cv].insert(cu);
        c.is_source[cu] = false;
      }
    }
  }
  c.successors.resize(comp_count);
  for (Index k = 0; k < comp_count; ++k) c.successors[k].assign(succ[k].begin(), succ[k].end());
  return c;
}

Index min_spanning_forest_size(const Eigen::MatrixXd& weights) {
  return static_cast<Index>(condensation(weights).sources().size());
}

bool strongly_connected(const Eigen::MatrixXd& weights) {
  return condensation(weights).component_count() == 1;
}

ClusterSpanningTrees has_cluster_spanning_trees(const ClusteredDigraph& g) {
  ClusterSpanningTrees result;
  result.holds = true;
  for (Index i = 0; i < g.cluster_count(); ++i) {
    const NodeSet roots = common_ancestors(g.weights(), g.cluster_members(i));
    if (roots.empty()) {
      result.roots.push_back(std::nullopt);
      result.holds = false;
    } else {
      result.roots.push_back(roots.members.front());
    }
  }
  return result;
}

ClusteredDigraph random_eep_graph(const RandomGraphParams& params, std::uint64_t seed) {
  const auto& sizes = params.cluster_sizes;
  if (sizes.empty()) throw GraphError("need at least one cluster");
  for (Index s : sizes) {
    if (s < 1) throw GraphError("cluster sizes must be at least 1");
  }
  auto in_unit = [](double d) { return d > 0.0 && d <= 1.0; };
  if (!in_unit(params.intra_density) || !in_unit(params.inter_density)) {
    throw GraphError("densities must lie in (0, 1]");
  }
  if (!(params.weight_min > 0.0) || params.weight_max < params.weight_min) {
    throw GraphError("weight range must satisfy 0 < min <= max");
  }

  const Index clusters = static_cast<Index>(sizes.size());
  std::vector<Index> offsets(sizes.size());
  Index total = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    offsets[i] = total;
    total += sizes[i];
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> weight(params.weight_min, params.weight_max);
  std::uniform_real_distribution<double> share(0.5, 1.5);
  std::bernoulli_distribution inter(params.inter_density);
  std::bernoulli_distribution intra(params.intra_density);

  for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(total, total);
    for (Index i = 0; i < clusters; ++i) {
      for (Index j = 0; j < clusters; ++j) {
        if (i == j || !inter(rng)) continue;
        const double alpha = weight(rng);
        std::vector<Index> sources(static_cast<std::size_t>(sizes[j]));
        std::iota(sources.begin(), sources.end(), offsets[j]);
        for (Index l = offsets[i]; l < offsets[i] + sizes[i]; ++l) {
          std::uniform_int_distribution<Index> count(1, sizes[j]);
          const Index k = count(rng);
          std::shuffle(sources.begin(), sources.end(), rng);
          std::vector<double> parts(static_cast<std::size_t>(k));
          for (double& p : parts) p = share(rng);
          const double sum = std::accumulate(parts.begin(), parts.end(), 0.0);
          double assigned = 0.0;
          for (Index t = 0; t + 1 < k; ++t) {
            const double v = alpha * parts[t] / sum;
            w(l, sources[t]) = v;
            assigned += v;
          }
          w(l, sources[k - 1]) = alpha - assigned;
        }
      }
    }
    for (Index i = 0; i < clusters; ++i) {
      for (Index l = offsets[i]; l < offsets[i] + sizes[i]; ++l) {
        for (Index k = offsets[i]; k < offsets[i] + sizes[i]; ++k) {
          if (l != k && intra(rng)) w(l, k) = weight(rng);
        }
      }
    }
    if (weakly_connected(w)) return build_graph(w, sizes);
  }
  throw GraphError("random graph resampling budget exhausted");
}

}  // namespace gcl
