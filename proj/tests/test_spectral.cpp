#include "fixtures.hpp"

#include "gcl/properties.hpp"
#include "gcl/spectral.hpp"

#include <doctest.h>

#include <cstdlib>

using namespace gcl;

namespace {

// |det(M - lambda I)| relative to the scale of M.
double char_poly_residual(const Eigen::MatrixXd& m, Complex lambda) {
  const Index n = m.rows();
  const Eigen::MatrixXcd shifted = m.cast<Complex>() - lambda * Eigen::MatrixXcd::Identity(n, n);
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXcd>(shifted).singularValues();
  return sv(n - 1) / (1.0 + sv(0));
}

}  // namespace

TEST_CASE("G_toy spectrum") {
  const Spectrum s = eigenvalues(laplacian(fixtures::g_toy()).matrix());
  REQUIRE(s.values.size() == 4);
  const double expected[] = {0.0, 0.5, 2.0, 2.5};
  for (int i = 0; i < 4; ++i) {
    CHECK(s.values[i].real() == doctest::Approx(expected[i]).epsilon(1e-12));
    CHECK(std::abs(s.values[i].imag()) < 1e-12);
  }
  CHECK(zero_eig_count(s) == 1);
  CHECK(min_nonzero_real_part(s) == doctest::Approx(0.5));
}

TEST_CASE("eigenvalues satisfy the characteristic equation and the trace") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Eigen::MatrixXd lap = laplacian_of(corpus_graph(seed).weights());
    const Spectrum s = eigenvalues(lap);
    Complex sum = 0.0;
    for (const Complex& z : s.values) {
      CHECK(char_poly_residual(lap, z) < 1e-8);
      sum += z;
    }
    CHECK(std::abs(sum - lap.trace()) < 1e-9 * (1.0 + std::abs(lap.trace())));
    CHECK(std::abs(sum.imag()) < 1e-9);
  }
}

TEST_CASE("spectrum helpers") {
  Spectrum s;
  CHECK(min_real_part(s) == std::numeric_limits<double>::infinity());
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, 2);
  CHECK_THROWS_AS(min_nonzero_real_part(eigenvalues(zero)), SpectralError);
  CHECK_THROWS_AS(eigenvalues(Eigen::MatrixXd::Zero(2, 3)), SpectralError);

  Spectrum a, b;
  a.values = {{1.0, 1.0}, {1.0, -1.0}, {2.0, 0.0}};
  b.values = {{2.0, 1e-8}, {1.0, -1.0}, {1.0, 1.0}};
  CHECK(match_spectra(a, b).matched);
  b.values[0] = {2.0, 1e-5};
  const SpectrumMatch miss = match_spectra(a, b);
  CHECK_FALSE(miss.matched);
  CHECK(miss.max_deviation == doctest::Approx(1e-5));
  b.values.pop_back();
  CHECK_FALSE(match_spectra(a, b).matched);
}

TEST_CASE("zero tolerance policy and override") {
  Eigen::MatrixXd m(2, 2);
  m << 1e-9, 0, 0, 3;
  CHECK(ZeroTolerance{}.for_matrix(m) == doctest::Approx(1e-8 * 4.0));
  CHECK(zero_eig_count(eigenvalues(m)) == 1);
  CHECK(zero_eig_count(eigenvalues(m, ZeroTolerance{1e-12})) == 0);

  ::setenv("GCL_TOL_ZERO", "0.5", 1);
  CHECK(zero_tolerance_from_env().absolute == 0.5);
  ::setenv("GCL_TOL_ZERO", "junk", 1);
  CHECK_FALSE(zero_tolerance_from_env().absolute.has_value());
  ::unsetenv("GCL_TOL_ZERO");
  CHECK_FALSE(zero_tolerance_from_env().absolute.has_value());
}

TEST_CASE("hurwitz_check") {
  Eigen::MatrixXd a(2, 2), b(2, 1), k(1, 2);
  a << 0, 1, -1, 0;
  b << 0, 1;
  k << 0.5, 1.0;
  Spectrum lhat;
  lhat.values = {{2.0, 0.0}, {2.5, 0.0}};
  CHECK(hurwitz_check(a, b, k, 1.0, lhat).hurwitz);

  // A zero eigenvalue leaves A itself, which is only marginally stable.
  lhat.values = {{0.0, 0.0}, {2.0, 0.0}};
  const HurwitzResult marginal = hurwitz_check(a, b, k, 1.0, lhat);
  CHECK_FALSE(marginal.hurwitz);
  CHECK(std::abs(marginal.margin) < 1e-12);

  lhat.values = {{2.0, 0.0}};
  CHECK_FALSE(hurwitz_check(a, b, k, 0.0, lhat).hurwitz);
  CHECK(hurwitz_check(a, b, k, 1.0, Spectrum{}).hurwitz);
  CHECK_THROWS_AS(hurwitz_check(a, b, Eigen::MatrixXd::Ones(2, 2), 1.0, lhat), SpectralError);
}
