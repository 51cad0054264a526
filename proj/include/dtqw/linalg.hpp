// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dtqw {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// Raised when an eigendecomposition does not converge.
class EigenDecompositionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when numeric synthesis cannot reach its residual bound.
class SynthesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// ‖M·M† − I‖_F; throws if M is not square.
double unitarity_defect(const ComplexMatrix& m);

inline bool is_unitary(const ComplexMatrix& m, double tol = 1e-10) {
  return m.rows() == m.cols() && unitarity_defect(m) < tol;
}

/// Kronecker product a ⊗ b (a occupies the more significant index).
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Reduce an angle to (−π, π].
double canonical_angle(double theta);

/// min over γ of ‖a − e^{iγ} b‖_F together with the minimizing phase.
struct PhaseAlignedDistance {
  double distance;
  double phase;
};
PhaseAlignedDistance phase_aligned_distance(const ComplexMatrix& a, const ComplexMatrix& b);

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace dtqw
