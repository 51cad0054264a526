// SPDX-License-Identifier: Apache-2.0
//
// Unitary synthesis: single-qubit Euler forms, a numerically fitted 3-ECR
// two-qubit template, and the quantum Shannon decomposition for up to three
// qubits.
#pragma once

#include "dtqw/circuit.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace dtqw {

// --- Nonlinear least squares ------------------------------------------------

struct LmOptions {
  int max_iterations = 400;
  double tolerance = 1e-13;      // stop when ‖r‖ falls below this
  double step_tolerance = 1e-16;
  double fd_step = 1e-7;         // central-difference step for the Jacobian
};

struct LmResult {
  Eigen::VectorXd x;
  double residual = 0.0;  // ‖r(x)‖₂
  int iterations = 0;
};

/// Levenberg–Marquardt on r: ℝⁿ → ℝᵐ with a finite-difference Jacobian.
LmResult levenberg_marquardt(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
                             Eigen::VectorXd x0, const LmOptions& options = {});

// --- Building blocks --------------------------------------------------------

/// CX(control → target) as X(c), ECR(c, t), RZ(π/2)(c), SX(t); equal up to global phase.
std::vector<Gate> cx_via_ecr(int control, int target);

/// RY(θ) = [[cos θ/2, −sin θ/2], [sin θ/2, cos θ/2]].
ComplexMatrix ry_matrix(double theta);

/// Uniformly controlled rotation about Y or Z: for every control state i (bit b
/// of i is `controls[b]`) the target sees R(angles[i]). Uses 2^k CX gates in
/// Gray-code order (none when there are no controls).
enum class RotationAxis { Y, Z };
std::vector<Gate> multiplexed_rotation(RotationAxis axis, const std::vector<double>& angles,
                                       const std::vector<int>& controls, int target);

/// Diagonal unitary with phase e^{i·phases[i]} on basis state i of `qubits`
/// (bit b of i is qubits[b]), up to global phase.
std::vector<Gate> diagonal_phases(const std::vector<double>& phases, const std::vector<int>& qubits);

/// Uniformly controlled single-qubit gate: control state i applies blocks[i]
/// to the target. Built as multiplexed RZ·RY·RZ followed by a diagonal on the
/// controls; the CX pair where the first two multiplexors meet cancels.
std::vector<Gate> multiplexed_unitary(const std::vector<ComplexMatrix>& blocks, const std::vector<int>& controls,
                                      int target);

// --- Two qubits ---------------------------------------------------------------

/// Fits (u⊗u)·[ECR·(u⊗u)]×3 to `u` (4×4, index bit(a) + 2·bit(b)) and returns the
/// gates on qubits a and b: Unitary2x2 layers around three ECR(a, b).
/// Throws SynthesisError if no restart reaches a phase-aligned residual of 1e-10.
std::vector<Gate> synthesize_two_qubit(const ComplexMatrix& u, int a, int b);

/// True when the 4×4 unitary is a tensor product up to global phase; fills the factors.
bool split_local(const ComplexMatrix& u, ComplexMatrix& on_a, ComplexMatrix& on_b, double tol = 1e-10);

// --- Cosine–sine and Shannon decompositions -------------------------------------

/// U = (L0 ⊕ L1) · [[C, −S], [S, C]] · (R0 ⊕ R1), C = diag(cos θ), S = diag(sin θ).
struct CsDecomposition {
  ComplexMatrix l0, l1, r0, r1;
  Eigen::VectorXd theta;
};
CsDecomposition cs_decompose(const ComplexMatrix& u);

/// A0 ⊕ A1 = (V ⊕ V) · (D ⊕ D†) · (W ⊕ W) with D = diag(d).
struct MultiplexorSplit {
  ComplexMatrix v, w;
  ComplexVector d;
};
MultiplexorSplit demultiplex(const ComplexMatrix& a0, const ComplexMatrix& a1);

/// Circuit on `width` ≤ 3 qubits whose unitary equals `u` up to global phase.
/// Uses Unitary2x2, ECR and the multiplexed rotations above.
Circuit synthesize_unitary(const ComplexMatrix& u);

}  // namespace dtqw
