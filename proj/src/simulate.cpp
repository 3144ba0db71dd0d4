#include "gcl/simulate.hpp"

#include "gcl/matrix_exponential.hpp"
#include "gcl/quotient.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace gcl {

namespace {

constexpr double kDivergenceNorm = 1e12;

// Stacked vector <-> n x L matrix with one column per agent.
Eigen::Map<const Eigen::MatrixXd> as_columns(const Eigen::VectorXd& x, Index n) {
  return Eigen::Map<const Eigen::MatrixXd>(x.data(), n, x.size() / n);
}

bool single_integrator(const Scenario& s) {
  const Eigen::MatrixXd bk = s.dynamics.b * s.gain;
  return s.dynamics.state_dim() == 1 && s.dynamics.a.isZero(0.0) && bk(0, 0) > 0.0;
}

}  // namespace

void validate(const Scenario& s) {
  const Index n = s.dynamics.state_dim();
  if (!(s.delta > 0.0) || !std::isfinite(s.delta)) throw SimulationError("delta must be positive");
  if (!(s.dt > 0.0) || !std::isfinite(s.dt)) throw SimulationError("dt must be positive");
  if (!(s.t_final >= s.dt) || !std::isfinite(s.t_final)) throw SimulationError("t_final must be at least dt");
  if (s.x0.size() != n * s.graph.agent_count()) throw SimulationError("x0 must have n * L entries");
  if (!s.x0.allFinite()) throw SimulationError("x0 must be finite");
  if (s.gain.rows() != s.dynamics.input_dim() || s.gain.cols() != n) {
    throw SimulationError("gain must be n_u x n");
  }
  if (s.max_samples == 1 || s.max_samples < 0) throw SimulationError("max_samples must be 0 or at least 2");
}

Eigen::VectorXd random_initial_state(Index state_dim, Index agents, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd x(state_dim * agents);
  for (Index i = 0; i < x.size(); ++i) x(i) = normal(rng);
  return x;
}

Eigen::MatrixXd closed_loop_matrix(const Eigen::MatrixXd& lap, const Eigen::MatrixXd& a,
                                   const Eigen::MatrixXd& b, const Eigen::MatrixXd& k, double delta) {
  if (lap.rows() != lap.cols() || a.rows() != a.cols() || b.rows() != a.rows() || k.rows() != b.cols() ||
      k.cols() != a.rows()) {
    throw SimulationError("closed_loop_matrix: dimension mismatch");
  }
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(lap.rows(), lap.rows());
  return kron(id, a) - delta * kron(lap, (b * k).eval());
}

Eigen::MatrixXd closed_loop_matrix(const Scenario& s) {
  return closed_loop_matrix(laplacian_of(s.graph.weights()), s.dynamics.a, s.dynamics.b, s.gain, s.delta);
}

Eigen::VectorXd cluster_disagreement(const ClusteredDigraph& g, Index state_dim, const Eigen::VectorXd& x) {
  const auto cols = as_columns(x, state_dim);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(g.cluster_count());
  for (Index i = 0; i < g.cluster_count(); ++i) {
    const Index o = g.cluster_offset(i), size = g.cluster_size(i);
    for (Index p = 0; p < size; ++p) {
      for (Index r = p + 1; r < size; ++r) d(i) = std::max(d(i), (cols.col(o + p) - cols.col(o + r)).norm());
    }
  }
  return d;
}

Eigen::VectorXd group_error(const ClusteredDigraph& g, Index state_dim, const Eigen::VectorXd& x) {
  const auto cols = as_columns(x, state_dim);
  Eigen::VectorXd e((g.agent_count() - g.cluster_count()) * state_dim);
  Index pos = 0;
  for (Index i = 0; i < g.cluster_count(); ++i) {
    const Index o = g.cluster_offset(i);
    for (Index r = 1; r < g.cluster_size(i); ++r) {
      e.segment(pos, state_dim) = cols.col(o + r) - cols.col(o);
      pos += state_dim;
    }
  }
  return e;
}

Trajectory simulate(const Scenario& s) {
  validate(s);
  const Index n = s.dynamics.state_dim();
  const Eigen::MatrixXd m = closed_loop_matrix(s);
  const Index steps = static_cast<Index>(std::floor(s.t_final / s.dt + 1e-9));
  Index stride = 1;
  if (s.max_samples > 0 && steps + 1 > s.max_samples) {
    stride = (steps + s.max_samples - 2) / (s.max_samples - 1);
  }

  Trajectory traj;
  auto record = [&](Index step, const Eigen::VectorXd& x) {
    traj.times.push_back(static_cast<double>(step) * s.dt);
    traj.states.push_back(x);
    Eigen::VectorXd d = cluster_disagreement(s.graph, n, x);
    traj.disagreement.push_back(d.size() ? d.maxCoeff() : 0.0);
    traj.cluster_disagreement.push_back(std::move(d));
  };

  Eigen::VectorXd x = s.x0;
  record(0, x);
  Eigen::MatrixXd propagator;
  if (s.integrator == Integrator::Expm) propagator = expm((m * s.dt).eval());

  Eigen::VectorXd k1, k2, k3, k4;
  for (Index step = 1; step <= steps; ++step) {
    if (s.integrator == Integrator::Expm) {
      x = propagator * x;
    } else {
      k1 = m * x;
      k2 = m * (x + 0.5 * s.dt * k1);
      k3 = m * (x + 0.5 * s.dt * k2);
      k4 = m * (x + s.dt * k3);
      x += (s.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    traj.steps = step;
    const double norm = x.norm();
    if (!std::isfinite(norm) || norm > kDivergenceNorm) {
      traj.diverged = true;
      record(step, x);
      break;
    }
    if (step % stride == 0 || step == steps) record(step, x);
  }
  traj.final_error = group_error(s.graph, n, traj.states.back());
  return traj;
}

Eigen::MatrixXd LimitPrediction::limit_operator() const {
  const Index total = static_cast<Index>(reaches.agent_order.size());
  const Index nr = reaches.reach_agents;
  Eigen::MatrixXd ordered = Eigen::MatrixXd::Zero(total, total);
  ordered.topLeftCorner(nr, nr) = xi;
  if (reaches.common_agents > 0) ordered.bottomLeftCorner(reaches.common_agents, nr) = convex_weights * xi;
  Eigen::MatrixXd op(total, total);
  for (Index i = 0; i < total; ++i) {
    for (Index j = 0; j < total; ++j) op(reaches.agent_order[i], reaches.agent_order[j]) = ordered(i, j);
  }
  return op;
}

Eigen::VectorXd LimitPrediction::state_at(double t) const {
  const Index n = a.rows();
  const Eigen::MatrixXd flow = expm((a * t).eval());
  const Eigen::MatrixXd cols = flow * as_columns(x0, n) * limit_operator().transpose();
  return Eigen::Map<const Eigen::VectorXd>(cols.data(), cols.size());
}

LimitPrediction predict_limit(const ClusteredDigraph& g, const Dynamics& dyn, const Eigen::VectorXd& x0,
                              const ZeroTolerance& tol) {
  if (x0.size() != dyn.state_dim() * g.agent_count()) throw SimulationError("x0 must have n * L entries");
  if (!check_common_influence(g).holds) throw SimulationError("clustering is not an external equitable partition");
  if (!has_cluster_spanning_trees(g).holds) throw SimulationError("graph lacks cluster spanning trees");

  LimitPrediction pred;
  pred.reaches = reach_decomposition(quotient_graph(g), g);
  pred.form = pred.reaches.reach_count == 1 ? LimitForm::GlobalConsensus : LimitForm::ReachPattern;
  pred.a = dyn.a;
  pred.x0 = x0;

  const Index nr = pred.reaches.reach_agents;
  pred.xi = Eigen::MatrixXd::Zero(nr, nr);
  Index offset = 0;
  for (const Eigen::MatrixXd& lp : pred.reaches.reach_laplacians) {
    const Index size = lp.rows();
    if (zero_eig_count(eigenvalues(lp, tol)) != 1) {
      throw SimulationError("a reach Laplacian does not have a simple zero eigenvalue");
    }
    // nu^T L_p = 0 with nu^T 1 = 1; the stacked system has full column rank.
    Eigen::MatrixXd sys(size + 1, size);
    sys.topRows(size) = lp.transpose();
    sys.row(size).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size + 1);
    rhs(size) = 1.0;
    Eigen::VectorXd nu = sys.colPivHouseholderQr().solve(rhs);
    pred.xi.block(offset, offset, size, size) = Eigen::VectorXd::Ones(size) * nu.transpose();
    pred.left_vectors.push_back(std::move(nu));
    offset += size;
  }
  if (pred.reaches.common_agents > 0) {
    pred.convex_weights = -pred.reaches.lf.partialPivLu().solve(pred.reaches.lfr);
  } else {
    pred.convex_weights.resize(0, nr);
  }
  return pred;
}

PredictionCheck verify_prediction(const Trajectory& traj, const LimitPrediction& pred,
                                  const Scenario& scenario, std::optional<double> delta_pattern,
                                  double tolerance) {
  PredictionCheck check;
  check.tolerance = tolerance;
  check.applicable = (delta_pattern && scenario.delta >= *delta_pattern) || single_integrator(scenario);
  if (!check.applicable) {
    check.note = delta_pattern ? "not applicable: delta below the pattern threshold"
                               : "not applicable: no pattern threshold for this topology";
    return check;
  }
  if (traj.diverged) {
    check.note = "trajectory diverged";
    return check;
  }
  const std::size_t count = traj.times.size();
  const std::size_t tail = std::max<std::size_t>(1, (count + 9) / 10);
  for (std::size_t i = count - tail; i < count; ++i) {
    const Eigen::VectorXd expected = pred.state_at(traj.times[i]);
    const double r = (traj.states[i] - expected).norm() / (1.0 + expected.norm());
    check.tail_max_deviation = std::max(check.tail_max_deviation, r);
    if (i + 1 == count) check.final_deviation = r;
  }
  check.passed = check.tail_max_deviation <= tolerance;
  check.note = check.passed ? "prediction matches" : "prediction deviates";
  return check;
}

}  // namespace gcl
