// SPDX-License-Identifier: Apache-2.0
#include "dtqw/linalg.hpp"

#include <cmath>

namespace dtqw {

double unitarity_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("unitarity check needs a square matrix");
  }
  const auto n = m.rows();
  return (m * m.adjoint() - ComplexMatrix::Identity(n, n)).norm();
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double canonical_angle(double theta) {
  double r = std::remainder(theta, 2.0 * kPi);  // [−π, π]
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

PhaseAlignedDistance phase_aligned_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("phase-aligned distance: shape mismatch");
  }
  // Minimized at γ = arg⟨b, a⟩. The difference is formed explicitly: the
  // closed form ‖a‖² + ‖b‖² − 2|⟨b, a⟩| cancels catastrophically near zero.
  const Complex overlap = (b.array().conjugate() * a.array()).sum();
  const double phase = std::abs(overlap) > 0.0 ? std::arg(overlap) : 0.0;
  return {(a - std::polar(1.0, phase) * b).norm(), phase};
}

}  // namespace dtqw
