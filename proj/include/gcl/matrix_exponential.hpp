#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace gcl {

/**
 * Matrix exponential by scaling and squaring with the [13/13] Pade
 * approximant.
 *
 * The matrix is scaled by 2^-s so that its 1-norm falls below theta_13, the
 * approximant r(X) = (V - U)^{-1} (V + U) is evaluated, and the result is
 * squared s times.
 */
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> expm(
    const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  using MatrixType = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using std::abs;

  if (m.rows() != m.cols()) throw std::invalid_argument("expm: matrix must be square");
  const Eigen::Index n = m.rows();
  if (n == 0) return MatrixType(0, 0);

  constexpr double theta13 = 5.371920351148152;
  static constexpr double b[] = {64764752532480000.0,
                                 32382376266240000.0,
                                 7771770303897600.0,
                                 1187353796428800.0,
                                 129060195264000.0,
                                 10559470521600.0,
                                 670442572800.0,
                                 33522128640.0,
                                 1323241920.0,
                                 40840800.0,
                                 960960.0,
                                 16380.0,
                                 182.0,
                                 1.0};

  const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
  if (!std::isfinite(norm1)) throw std::invalid_argument("expm: non-finite matrix");
  int squarings = 0;
  if (norm1 > theta13) squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));

  const MatrixType x = m / static_cast<Scalar>(std::ldexp(1.0, squarings));
  const MatrixType id = MatrixType::Identity(n, n);
  const MatrixType x2 = x * x;
  const MatrixType x4 = x2 * x2;
  const MatrixType x6 = x4 * x2;

  MatrixType inner = Scalar(b[13]) * x6 + Scalar(b[11]) * x4 + Scalar(b[9]) * x2;
  MatrixType u_part = x6 * inner;
  u_part += Scalar(b[7]) * x6 + Scalar(b[5]) * x4 + Scalar(b[3]) * x2 + Scalar(b[1]) * id;
  const MatrixType u = x * u_part;

  inner = Scalar(b[12]) * x6 + Scalar(b[10]) * x4 + Scalar(b[8]) * x2;
  MatrixType v = x6 * inner;
  v += Scalar(b[6]) * x6 + Scalar(b[4]) * x4 + Scalar(b[2]) * x2 + Scalar(b[0]) * id;

  MatrixType result = (v - u).partialPivLu().solve(v + u);
  for (int s = 0; s < squarings; ++s) result = (result * result).eval();
  return result;
}

/// Kronecker product.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> kron(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(),
                                                                              a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace gcl
