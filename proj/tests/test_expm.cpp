#include "gcl/matrix_exponential.hpp"

#include <doctest.h>

#include <random>

using gcl::expm;
using gcl::kron;

namespace {

// Truncated Taylor series with scaling and squaring in long double.
Eigen::MatrixXd taylor_expm(const Eigen::MatrixXd& m) {
  using Mat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  int s = 0;
  const double norm = m.cwiseAbs().colwise().sum().maxCoeff();
  while (std::ldexp(norm, -s) > 0.1) ++s;
  const Mat x = m.cast<long double>() * std::ldexp(1.0L, -s);
  Mat sum = Mat::Identity(m.rows(), m.cols()), term = sum;
  for (int k = 1; k < 30; ++k) {
    term = term * x / static_cast<long double>(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum.cast<double>();
}

}  // namespace

TEST_CASE("rotation generator") {
  for (double theta : {0.0, 1e-3, 0.7, 3.0, 25.0, 200.0}) {
    Eigen::Matrix2d m;
    m << 0, theta, -theta, 0;
    Eigen::Matrix2d expected;
    expected << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
    CHECK((expm(m) - expected).cwiseAbs().maxCoeff() < 1e-12 * (1.0 + theta));
  }
}

TEST_CASE("diagonal and nilpotent matrices") {
  Eigen::Vector3d d(-40.0, 0.0, 2.5);
  const Eigen::MatrixXd e = expm(Eigen::Matrix3d(d.asDiagonal()));
  for (int i = 0; i < 3; ++i) CHECK(e(i, i) == doctest::Approx(std::exp(d(i))).epsilon(1e-13));

  Eigen::Matrix3d n;
  n << 0, 1, 2, 0, 0, 3, 0, 0, 0;
  Eigen::Matrix3d expected = Eigen::Matrix3d::Identity() + n + 0.5 * n * n;
  CHECK((expm(n) - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("random matrices against a Taylor oracle") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 7;
    const double scale = std::pow(10.0, trial % 4 - 1);
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < m.size(); ++i) m.data()[i] = scale * normal(rng);
    const Eigen::MatrixXd got = expm(m), want = taylor_expm(m);
    CHECK((got - want).norm() <= 1e-11 * (1.0 + want.norm()));
  }
}

TEST_CASE("exp(A) exp(-A) is the identity and complex input works") {
  Eigen::Matrix3d a;
  a << 0.1, 2, -1, 0.3, -0.5, 0.2, 1, 0, 0.4;
  CHECK((expm(a) * expm((-a).eval()) - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-13);

  Eigen::Matrix2cd z;
  z << std::complex<double>(0, 1), 0, 0, std::complex<double>(0, -2);
  const Eigen::MatrixXcd ez = expm(z);
  CHECK(std::abs(ez(0, 0) - std::exp(std::complex<double>(0, 1))) < 1e-14);
  CHECK(std::abs(ez(1, 1) - std::exp(std::complex<double>(0, -2))) < 1e-14);
  CHECK(expm(Eigen::MatrixXd(0, 0)).size() == 0);
}

TEST_CASE("kron") {
  Eigen::Matrix2d a;
  a << 1, 2, 3, 4;
  Eigen::MatrixXd b(1, 2);
  b << 0, 5;
  const Eigen::MatrixXd k = kron(a, b);
  REQUIRE(k.rows() == 2);
  REQUIRE(k.cols() == 4);
  Eigen::MatrixXd expected(2, 4);
  expected << 0, 5, 0, 10, 0, 15, 0, 20;
  CHECK(k == expected);
}
