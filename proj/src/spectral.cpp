#include "gcl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

namespace gcl {

namespace {

bool by_real_then_imag(const Complex& x, const Complex& y) {
  if (x.real() != y.real()) return x.real() < y.real();
  return x.imag() < y.imag();
}

}  // namespace

double ZeroTolerance::for_matrix(const Eigen::MatrixXd& m) const {
  if (absolute) return *absolute;
  const double norm_inf = m.size() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff();
  return 1e-8 * (1.0 + norm_inf);
}

ZeroTolerance zero_tolerance_from_env() {
  ZeroTolerance tol;
  if (const char* env = std::getenv("GCL_TOL_ZERO")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && *end == '\0' && v >= 0.0 && std::isfinite(v)) tol.absolute = v;
  }
  return tol;
}

Spectrum eigenvalues(const Eigen::MatrixXd& m, const ZeroTolerance& tol) {
  if (m.rows() != m.cols()) throw SpectralError("eigenvalues: matrix must be square");
  if (!m.allFinite()) throw SpectralError("eigenvalues: matrix has non-finite entries");
  Spectrum s;
  s.source_dim = m.rows();
  s.zero_tolerance = tol.for_matrix(m);
  if (m.rows() == 0) return s;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
  if (solver.info() != Eigen::Success) {
    throw SpectralError("eigenvalues: QR iteration did not converge");
  }
  const Eigen::VectorXcd& ev = solver.eigenvalues();
  s.values.assign(ev.data(), ev.data() + ev.size());
  std::sort(s.values.begin(), s.values.end(), by_real_then_imag);
  return s;
}

Index zero_eig_count(const Spectrum& s) {
  return static_cast<Index>(std::count_if(s.values.begin(), s.values.end(), [&](const Complex& z) {
    return std::abs(z) <= s.zero_tolerance;
  }));
}

double min_nonzero_real_part(const Spectrum& s) {
  double best = std::numeric_limits<double>::infinity();
  bool found = false;
  for (const Complex& z : s.values) {
    if (std::abs(z) > s.zero_tolerance) {
      best = std::min(best, z.real());
      found = true;
    }
  }
  if (!found) throw SpectralError("min_nonzero_real_part: every eigenvalue is zero");
  return best;
}

double min_real_part(const Spectrum& s) {
  double best = std::numeric_limits<double>::infinity();
  for (const Complex& z : s.values) best = std::min(best, z.real());
  return best;
}

Spectrum merge(const Spectrum& a, const Spectrum& b) {
  Spectrum s;
  s.source_dim = a.source_dim + b.source_dim;
  s.zero_tolerance = std::max(a.zero_tolerance, b.zero_tolerance);
  s.values = a.values;
  s.values.insert(s.values.end(), b.values.begin(), b.values.end());
  std::sort(s.values.begin(), s.values.end(), by_real_then_imag);
  return s;
}

SpectrumMatch match_spectra(const Spectrum& a, const Spectrum& b, double tolerance) {
  SpectrumMatch result;
  if (a.values.size() != b.values.size()) return result;
  std::vector<bool> used(b.values.size(), false);
  for (const Complex& z : a.values) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_index = b.values.size();
    for (std::size_t j = 0; j < b.values.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(z - b.values[j]);
      if (d < best) {
        best = d;
        best_index = j;
      }
    }
    if (best_index == b.values.size() || best > tolerance) {
      result.max_deviation = std::max(result.max_deviation, best);
      return result;
    }
    used[best_index] = true;
    result.max_deviation = std::max(result.max_deviation, best);
  }
  result.matched = true;
  return result;
}

HurwitzResult hurwitz_check(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                            const Eigen::MatrixXd& k, double delta, const Spectrum& lhat) {
  const Index n = a.rows();
  if (a.cols() != n || b.rows() != n || k.rows() != b.cols() || k.cols() != n) {
    throw SpectralError("hurwitz_check: dimension mismatch");
  }
  HurwitzResult result;
  if (lhat.empty()) {
    result.hurwitz = true;
    result.margin = std::numeric_limits<double>::infinity();
    return result;
  }
  const Eigen::MatrixXcd ac = a.cast<Complex>();
  const Eigen::MatrixXcd bk = (b * k).cast<Complex>();
  double worst = -std::numeric_limits<double>::infinity();
  for (Complex lambda : lhat.values) {
    if (std::abs(lambda) <= lhat.zero_tolerance) lambda = 0.0;
    const Eigen::MatrixXcd block = ac - (delta * lambda) * bk;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(block, false);
    if (solver.info() != Eigen::Success) {
      throw SpectralError("hurwitz_check: eigenvalue iteration did not converge");
    }
    worst = std::max(worst, solver.eigenvalues().real().maxCoeff());
  }
  result.margin = -worst;
  // Real parts within roundoff of the axis count as marginal.
  const double axis = 1e-10 * (1.0 + a.cwiseAbs().rowwise().sum().maxCoeff());
  result.hurwitz = worst < -axis;
  return result;
}

}  // namespace gcl
