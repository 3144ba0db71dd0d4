#pragma once

#include "gcl/control.hpp"
#include "gcl/graph.hpp"
#include "gcl/reduction.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gcl {

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Integrator { Expm, Rk4 };

/// One closed-loop run. States are stacked per agent in internal order:
/// x = [x_0; x_1; ...; x_{L-1}], each x_l of length n.
struct Scenario {
  ClusteredDigraph graph;
  Dynamics dynamics;
  Eigen::MatrixXd gain;
  double delta = 1.0;
  Eigen::VectorXd x0;
  double t_final = 200.0;
  double dt = 1e-3;
  Integrator integrator = Integrator::Expm;
  /// Recorded samples are decimated to at most this many; 0 keeps every step.
  Index max_samples = 5000;
};

void validate(const Scenario& s);

/// Standard normal initial state of length n * L.
Eigen::VectorXd random_initial_state(Index state_dim, Index agents, std::uint64_t seed);

/// I_L (x) A - delta L (x) B K.
Eigen::MatrixXd closed_loop_matrix(const Eigen::MatrixXd& lap, const Eigen::MatrixXd& a,
                                   const Eigen::MatrixXd& b, const Eigen::MatrixXd& k, double delta);
Eigen::MatrixXd closed_loop_matrix(const Scenario& s);

/// max over clusters of the largest pairwise distance between member states.
Eigen::VectorXd cluster_disagreement(const ClusteredDigraph& g, Index state_dim, const Eigen::VectorXd& x);

/// Differences x_l - x_{first of cluster} for every non-first agent, stacked
/// cluster by cluster.
Eigen::VectorXd group_error(const ClusteredDigraph& g, Index state_dim, const Eigen::VectorXd& x);

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<double> disagreement;                  // D(t)
  std::vector<Eigen::VectorXd> cluster_disagreement; // D_i(t)
  Index steps = 0;                                   // integration steps taken
  bool diverged = false;
  Eigen::VectorXd final_error;                       // group_error at the last sample
};

Trajectory simulate(const Scenario& s);

enum class LimitForm { GlobalConsensus, ReachPattern };

/**
 * Asymptotic state predicted for strong coupling.
 *
 * In reach order the limit is x_R -> (Xi (x) e^{At}) x_R(0) and
 * x_F -> (W Xi (x) e^{At}) x_R(0) with W = -L_F^{-1} L_FR, where
 * Xi = blkdiag(1 nu_p^T) and nu_p is the normalized left null vector of L_p.
 */
struct LimitPrediction {
  LimitForm form = LimitForm::GlobalConsensus;
  ReachDecomposition reaches;
  Eigen::MatrixXd xi;
  std::vector<Eigen::VectorXd> left_vectors;
  Eigen::MatrixXd convex_weights;
  Eigen::MatrixXd a;
  Eigen::VectorXd x0;

  /// Predicted stacked state (internal agent order) at time t.
  Eigen::VectorXd state_at(double t) const;
  /// Agent-level limit map: x_l(t) -> sum_k limit(l, k) e^{At} x_k(0).
  Eigen::MatrixXd limit_operator() const;
};

LimitPrediction predict_limit(const ClusteredDigraph& g, const Dynamics& dyn, const Eigen::VectorXd& x0,
                              const ZeroTolerance& tol = {});

struct PredictionCheck {
  bool applicable = false;
  bool passed = false;
  double tail_max_deviation = 0.0;
  double final_deviation = 0.0;
  double tolerance = 1e-2;
  std::string note;
};

/// Compares the trajectory tail (last 10% of samples) with the prediction
/// using r(t) = |x(t) - xhat(t)| / (1 + |xhat(t)|). Not applicable when the
/// scenario's delta is below the pattern threshold, except for single
/// integrators (A = 0, scalar, BK > 0) where any delta > 0 qualifies.
PredictionCheck verify_prediction(const Trajectory& traj, const LimitPrediction& pred,
                                  const Scenario& scenario, std::optional<double> delta_pattern,
                                  double tolerance = 1e-2);

}  // namespace gcl
