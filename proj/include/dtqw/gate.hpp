// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "dtqw/linalg.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dtqw {

enum class GateKind {
  H,
  X,
  SX,
  ID,
  RZ,               // diag(e^{−iθ/2}, e^{iθ/2})
  Phase,            // diag(1, e^{iθ})
  U3,               // general rotation with half-angle phases, see u3_matrix
  ControlledPhase,  // diag(1, 1, 1, e^{iθ}); symmetric in its two qubits
  ECR,              // (ID⊗X − X⊗Y)/√2
  Unitary2x2,       // explicit 2×2 payload
  Barrier
};

std::string_view gate_kind_name(GateKind kind);
std::optional<GateKind> gate_kind_from_name(std::string_view name);

/// A typed gate on indexed qubits.
///
/// Two-qubit matrices are indexed m = bit(qubits[0]) + 2·bit(qubits[1]), i.e. the
/// first listed qubit is the less significant one, matching the global basis in
/// which qubit k is bit k of the state index.
class Gate {
 public:
  static Gate h(int q) { return Gate(GateKind::H, {q}, {}); }
  static Gate x(int q) { return Gate(GateKind::X, {q}, {}); }
  static Gate sx(int q) { return Gate(GateKind::SX, {q}, {}); }
  static Gate id(int q) { return Gate(GateKind::ID, {q}, {}); }
  static Gate rz(int q, double theta) { return Gate(GateKind::RZ, {q}, {theta}); }
  static Gate phase(int q, double theta) { return Gate(GateKind::Phase, {q}, {theta}); }
  static Gate u3(int q, double theta, double phi, double lambda) {
    return Gate(GateKind::U3, {q}, {theta, phi, lambda});
  }
  static Gate cp(int control, int target, double theta) {
    return Gate(GateKind::ControlledPhase, {control, target}, {theta});
  }
  static Gate ecr(int a, int b) { return Gate(GateKind::ECR, {a, b}, {}); }
  static Gate unitary(int q, const ComplexMatrix& m);
  static Gate barrier(std::vector<int> qubits) {
    return Gate(GateKind::Barrier, std::move(qubits), {});
  }

  /// Generic constructor; validates arity and parameter count.
  Gate(GateKind kind, std::vector<int> qubits, std::vector<double> params);

  GateKind kind() const { return kind_; }
  const std::vector<int>& qubits() const { return qubits_; }
  const std::vector<double>& params() const { return params_; }
  /// Payload of a Unitary2x2 gate (empty for other kinds).
  const ComplexMatrix& payload() const { return payload_; }

  std::size_t arity() const { return qubits_.size(); }
  bool is_barrier() const { return kind_ == GateKind::Barrier; }
  bool is_two_qubit() const { return !is_barrier() && qubits_.size() == 2; }
  bool is_single_qubit() const { return !is_barrier() && qubits_.size() == 1; }
  /// Diagonal in the computational basis.
  bool is_diagonal() const;
  /// One of {ID, RZ, SX, X, ECR} (barriers are not gates in this sense).
  bool is_native() const;

  /// 2×2 or 4×4 matrix; throws for barriers.
  ComplexMatrix matrix() const;
  Gate inverse() const;
  Gate remapped(const std::vector<int>& mapping) const;

  friend bool operator==(const Gate& a, const Gate& b);

 private:
  GateKind kind_;
  std::vector<int> qubits_;
  std::vector<double> params_;
  ComplexMatrix payload_;
};

// Matrices of the named gates.
ComplexMatrix hadamard_matrix();
ComplexMatrix pauli_x_matrix();
ComplexMatrix pauli_y_matrix();
ComplexMatrix pauli_z_matrix();
ComplexMatrix sx_matrix();
ComplexMatrix rz_matrix(double theta);
ComplexMatrix phase_matrix(double theta);
/// [[cos(θ/2), −e^{iλ/2} sin(θ/2)], [e^{iφ/2} sin(θ/2), e^{i(λ+φ)/2} cos(θ/2)]].
ComplexMatrix u3_matrix(double theta, double phi, double lambda);
ComplexMatrix controlled_phase_matrix(double theta);
ComplexMatrix ecr_matrix();

}  // namespace dtqw
