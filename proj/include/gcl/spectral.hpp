#pragma once

#include <Eigen/Dense>

#include <complex>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace gcl {

using Index = Eigen::Index;
using Complex = std::complex<double>;

class SpectralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Zero-classification policy: eps = 1e-8 * (1 + ||M||_inf) unless an
/// absolute override is set.
struct ZeroTolerance {
  std::optional<double> absolute;

  double for_matrix(const Eigen::MatrixXd& m) const;
};

/// Reads GCL_TOL_ZERO; unset or unparsable leaves the default policy.
ZeroTolerance zero_tolerance_from_env();

struct Spectrum {
  std::vector<Complex> values;  // sorted by (real, imag)
  Index source_dim = 0;
  double zero_tolerance = 0.0;

  bool empty() const { return values.empty(); }
};

Spectrum eigenvalues(const Eigen::MatrixXd& m, const ZeroTolerance& tol = {});

Index zero_eig_count(const Spectrum& s);

/// Smallest real part among eigenvalues not classified as zero.
double min_nonzero_real_part(const Spectrum& s);

/// Smallest real part; +infinity for an empty spectrum.
double min_real_part(const Spectrum& s);

/// Concatenation of two spectra (re-sorted).
Spectrum merge(const Spectrum& a, const Spectrum& b);

struct SpectrumMatch {
  bool matched = false;
  double max_deviation = 0.0;
};

/// Multiset equality of two spectra: both sorted by (re, im), then each value
/// of `a` greedily takes the nearest unused value of `b` within `tolerance`.
SpectrumMatch match_spectra(const Spectrum& a, const Spectrum& b, double tolerance = 1e-6);

struct HurwitzResult {
  bool hurwitz = false;
  /// Negated largest real part over all closed-loop blocks.
  double margin = 0.0;
};

/// Stability of I (x) A - delta * Lhat (x) BK via the blocks A - delta*lambda*BK,
/// one per eigenvalue lambda of Lhat. Eigenvalues classified as zero enter as
/// exactly 0; real parts within 1e-10 (1 + ||A||_inf) of the axis are not Hurwitz.
HurwitzResult hurwitz_check(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                            const Eigen::MatrixXd& k, double delta, const Spectrum& lhat);

}  // namespace gcl
