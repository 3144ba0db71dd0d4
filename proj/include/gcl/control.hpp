#pragma once

#include "gcl/graph.hpp"
#include "gcl/spectral.hpp"

#include <optional>
#include <stdexcept>

namespace gcl {

class ControlError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Identical agent dynamics x' = A x + B u, plus the Riccati weight Q.
struct Dynamics {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  Eigen::MatrixXd q;

  Index state_dim() const { return a.rows(); }
  Index input_dim() const { return b.cols(); }
};

/// Validates shapes, symmetry and positive definiteness of Q, and
/// stabilizability of (A, B). An empty `q` defaults to the identity.
Dynamics make_dynamics(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd q = {});

/// Hautus test on every eigenvalue of A with nonnegative real part.
bool stabilizable(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

struct RiccatiSolution {
  Eigen::MatrixXd p;
  double residual_norm = 0.0;
};

/// Stabilizing solution of P A + A^T P - P B B^T P + Q = 0.
RiccatiSolution solve_riccati(const Dynamics& dyn);

/// K = B^T P.
Eigen::MatrixXd gain(const Eigen::MatrixXd& p, const Eigen::MatrixXd& b);

/**
 * Coupling-strength thresholds.
 *
 * `group` = 1 / (2 min Re sigma(Lhat)) guarantees group consensus; `pattern` =
 * 1 / (2 lambda_min) with lambda_min the smallest nonzero real part of sigma(L)
 * guarantees the reach consensus pattern. Either is empty when its topological
 * precondition fails; 0 means any positive coupling works.
 */
struct CouplingThresholds {
  std::optional<double> group;
  std::optional<double> pattern;
  double min_real_lhat = 0.0;
  std::optional<double> lambda_min;
};

CouplingThresholds coupling_thresholds(const ClusteredDigraph& g, const ZeroTolerance& tol = {});

struct ControlDesign {
  Eigen::MatrixXd p;
  Eigen::MatrixXd k;
  double residual_norm = 0.0;
  std::optional<double> delta_group;
  std::optional<double> delta_pattern;
};

ControlDesign design_control(const ClusteredDigraph& g, const Dynamics& dyn,
                             const ZeroTolerance& tol = {});

}  // namespace gcl
