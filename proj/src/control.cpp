#include "gcl/control.hpp"

#include "gcl/quotient.hpp"
#include "gcl/reduction.hpp"

#include <Eigen/Jacobi>

#include <cmath>
#include <sstream>

namespace gcl {

namespace {

// Swaps the adjacent diagonal entries k and k+1 of an upper-triangular Schur
// factor, updating the Schur vectors accordingly.
void swap_schur_pair(Eigen::MatrixXcd& t, Eigen::MatrixXcd& u, Index k) {
  const Complex a = t(k, k);
  const Complex b = t(k + 1, k + 1);
  Eigen::JacobiRotation<Complex> rot;
  rot.makeGivens(t(k, k + 1), b - a);
  t.applyOnTheLeft(k, k + 1, rot.adjoint());
  t.applyOnTheRight(k, k + 1, rot);
  u.applyOnTheRight(k, k + 1, rot);
  t(k + 1, k) = Complex(0.0, 0.0);
  t(k, k) = b;
  t(k + 1, k + 1) = a;
}

}  // namespace

bool stabilizable(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Index n = a.rows();
  if (n == 0) return true;
  const double scale = 1.0 + a.cwiseAbs().rowwise().sum().maxCoeff();
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  if (es.info() != Eigen::Success) throw ControlError("eigenvalues of A did not converge");
  const double bscale = 1.0 + (b.size() ? b.cwiseAbs().rowwise().sum().maxCoeff() : 0.0);
  for (Index i = 0; i < n; ++i) {
    const Complex lambda = es.eigenvalues()(i);
    if (lambda.real() < -1e-12 * scale) continue;
    Eigen::MatrixXcd pbh(n, n + b.cols());
    pbh.leftCols(n) = a.cast<Complex>() - lambda * Eigen::MatrixXcd::Identity(n, n);
    pbh.rightCols(b.cols()) = b.cast<Complex>();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(pbh);
    const auto& sv = svd.singularValues();
    if (sv.size() < n || sv(n - 1) <= 1e-10 * (scale + bscale)) return false;
  }
  return true;
}

Dynamics make_dynamics(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd q) {
  const Index n = a.rows();
  if (n < 1 || a.cols() != n) throw ControlError("A must be a nonempty square matrix");
  if (b.rows() != n || b.cols() < 1) throw ControlError("B must have as many rows as A and at least one column");
  if (q.size() == 0) q = Eigen::MatrixXd::Identity(n, n);
  if (q.rows() != n || q.cols() != n) throw ControlError("Q must match the size of A");
  if (!a.allFinite() || !b.allFinite() || !q.allFinite()) throw ControlError("dynamics contain non-finite entries");
  const double qnorm = q.cwiseAbs().maxCoeff();
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + qnorm)) {
    throw ControlError("Q must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> qs(q, Eigen::EigenvaluesOnly);
  if (qs.eigenvalues().minCoeff() <= 0.0) throw ControlError("Q must be positive definite");
  if (!stabilizable(a, b)) throw ControlError("(A, B) is not stabilizable");
  return Dynamics{std::move(a), std::move(b), std::move(q)};
}

RiccatiSolution solve_riccati(const Dynamics& dyn) {
  const Index n = dyn.state_dim();
  const Eigen::MatrixXd& a = dyn.a;
  Eigen::MatrixXd h(2 * n, 2 * n);
  h << a, -dyn.b * dyn.b.transpose(), -dyn.q, -a.transpose();

  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(h.cast<Complex>());
  if (schur.info() != Eigen::Success) throw ControlError("Schur decomposition of the Hamiltonian failed");
  Eigen::MatrixXcd t = schur.matrixT();
  Eigen::MatrixXcd u = schur.matrixU();

  // Bubble the stable eigenvalues to the leading positions.
  bool moved = true;
  while (moved) {
    moved = false;
    for (Index k = 0; k + 1 < 2 * n; ++k) {
      if (t(k, k).real() >= 0.0 && t(k + 1, k + 1).real() < 0.0) {
        swap_schur_pair(t, u, k);
        moved = true;
      }
    }
  }
  Index stable = 0;
  for (Index k = 0; k < 2 * n; ++k) {
    if (t(k, k).real() < 0.0) ++stable;
  }
  if (stable != n) {
    throw ControlError("Hamiltonian has eigenvalues on the imaginary axis; no stabilizing solution");
  }
  for (Index k = 0; k < n; ++k) {
    if (!(t(k, k).real() < 0.0)) throw ControlError("Schur reordering failed");
  }

  const Eigen::MatrixXcd x1 = u.topLeftCorner(n, n);
  const Eigen::MatrixXcd x2 = u.bottomLeftCorner(n, n);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(x1.transpose());
  if (!(lu.rcond() > 1e-12)) throw ControlError("stable invariant subspace is not a graph");
  const Eigen::MatrixXcd pc = lu.solve(x2.transpose()).transpose();

  RiccatiSolution sol;
  sol.p = pc.real();
  sol.p = 0.5 * (sol.p + sol.p.transpose()).eval();
  const Eigen::MatrixXd pb = sol.p * dyn.b;
  const Eigen::MatrixXd residual = sol.p * a + a.transpose() * sol.p - pb * pb.transpose() + dyn.q;
  sol.residual_norm = residual.norm();
  if (sol.residual_norm > 1e-8 * dyn.q.norm()) {
    std::ostringstream msg;
    msg << "Riccati residual " << sol.residual_norm << " exceeds tolerance";
    throw ControlError(msg.str());
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sol.p);
  if (llt.info() != Eigen::Success) throw ControlError("Riccati solution is not positive definite");
  return sol;
}

Eigen::MatrixXd gain(const Eigen::MatrixXd& p, const Eigen::MatrixXd& b) {
  if (p.rows() != b.rows() || p.cols() != p.rows()) throw ControlError("gain: dimension mismatch");
  return b.transpose() * p;
}

CouplingThresholds coupling_thresholds(const ClusteredDigraph& g, const ZeroTolerance& tol) {
  CouplingThresholds th;
  if (!check_common_influence(g).holds) return th;

  const Spectrum full = eigenvalues(laplacian_of(g.weights()), tol);
  if (zero_eig_count(full) < full.source_dim) th.lambda_min = min_nonzero_real_part(full);

  const QuotientGraph q = quotient_graph(g);
  const bool feasible = min_spanning_forest_size(g.weights()) == min_spanning_forest_size(q.alpha);
  const Spectrum lhat = eigenvalues(assemble_reduced_laplacian(laplacian(g)), tol);
  th.min_real_lhat = min_real_part(lhat);
  if (feasible) {
    if (lhat.empty()) {
      th.group = 0.0;
    } else if (th.min_real_lhat > 0.0 && zero_eig_count(lhat) == 0) {
      th.group = 1.0 / (2.0 * th.min_real_lhat);
    } else {
      throw ControlError("topology is feasible but the reduced Laplacian is numerically singular");
    }
  }
  if (has_cluster_spanning_trees(g).holds) {
    th.pattern = th.lambda_min ? 1.0 / (2.0 * *th.lambda_min) : 0.0;
  }
  return th;
}

ControlDesign design_control(const ClusteredDigraph& g, const Dynamics& dyn, const ZeroTolerance& tol) {
  const RiccatiSolution sol = solve_riccati(dyn);
  const CouplingThresholds th = coupling_thresholds(g, tol);
  return ControlDesign{sol.p, gain(sol.p, dyn.b), sol.residual_norm, th.group, th.pattern};
}

}  // namespace gcl
