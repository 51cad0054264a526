// SPDX-License-Identifier: Apache-2.0
#include "dtqw/gate.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace dtqw {

namespace {

struct KindInfo {
  GateKind kind;
  std::string_view name;
  int qubits;  // −1: any number
  int params;
};

constexpr std::array<KindInfo, 11> kKinds{{
    {GateKind::H, "H", 1, 0},
    {GateKind::X, "X", 1, 0},
    {GateKind::SX, "SX", 1, 0},
    {GateKind::ID, "ID", 1, 0},
    {GateKind::RZ, "RZ", 1, 1},
    {GateKind::Phase, "P", 1, 1},
    {GateKind::U3, "U3", 1, 3},
    {GateKind::ControlledPhase, "CP", 2, 1},
    {GateKind::ECR, "ECR", 2, 0},
    {GateKind::Unitary2x2, "U2X2", 1, 0},
    {GateKind::Barrier, "BARRIER", -1, 0},
}};

const KindInfo& info(GateKind kind) {
  return *std::find_if(kKinds.begin(), kKinds.end(),
                       [kind](const KindInfo& k) { return k.kind == kind; });
}

}  // namespace

std::string_view gate_kind_name(GateKind kind) { return info(kind).name; }

std::optional<GateKind> gate_kind_from_name(std::string_view name) {
  for (const auto& k : kKinds) {
    if (k.name == name) return k.kind;
  }
  return std::nullopt;
}

Gate::Gate(GateKind kind, std::vector<int> qubits, std::vector<double> params)
    : kind_(kind), qubits_(std::move(qubits)), params_(std::move(params)) {
  const auto& k = info(kind_);
  if (k.qubits >= 0 && static_cast<int>(qubits_.size()) != k.qubits) {
    throw std::invalid_argument(
        fmt::format("{} takes {} qubit(s), got {}", k.name, k.qubits, qubits_.size()));
  }
  if (static_cast<int>(params_.size()) != k.params) {
    throw std::invalid_argument(
        fmt::format("{} takes {} parameter(s), got {}", k.name, k.params, params_.size()));
  }
  for (std::size_t i = 0; i < qubits_.size(); ++i) {
    if (qubits_[i] < 0) throw std::invalid_argument("negative qubit index");
    for (std::size_t j = 0; j < i; ++j) {
      if (qubits_[i] == qubits_[j]) {
        throw std::invalid_argument(fmt::format("{} repeats qubit {}", k.name, qubits_[i]));
      }
    }
  }
  if (kind_ == GateKind::Unitary2x2) payload_ = ComplexMatrix::Identity(2, 2);
}

Gate Gate::unitary(int q, const ComplexMatrix& m) {
  if (m.rows() != 2 || m.cols() != 2) throw std::invalid_argument("Unitary2x2 needs a 2x2 matrix");
  if (!is_unitary(m, 1e-12)) {
    throw std::invalid_argument(
        fmt::format("Unitary2x2 payload is not unitary (defect {})", unitarity_defect(m)));
  }
  Gate g(GateKind::Unitary2x2, {q}, {});
  g.payload_ = m;
  return g;
}

bool Gate::is_diagonal() const {
  switch (kind_) {
    case GateKind::ID:
    case GateKind::RZ:
    case GateKind::Phase:
    case GateKind::ControlledPhase:
      return true;
    case GateKind::U3:
      return std::abs(std::sin(params_[0] / 2.0)) == 0.0;
    case GateKind::Unitary2x2:
      return payload_(0, 1) == Complex{} && payload_(1, 0) == Complex{};
    default:
      return false;
  }
}

bool Gate::is_native() const {
  switch (kind_) {
    case GateKind::ID:
    case GateKind::RZ:
    case GateKind::SX:
    case GateKind::X:
    case GateKind::ECR:
      return true;
    default:
      return false;
  }
}

ComplexMatrix Gate::matrix() const {
  switch (kind_) {
    case GateKind::H: return hadamard_matrix();
    case GateKind::X: return pauli_x_matrix();
    case GateKind::SX: return sx_matrix();
    case GateKind::ID: return ComplexMatrix::Identity(2, 2);
    case GateKind::RZ: return rz_matrix(params_[0]);
    case GateKind::Phase: return phase_matrix(params_[0]);
    case GateKind::U3: return u3_matrix(params_[0], params_[1], params_[2]);
    case GateKind::ControlledPhase: return controlled_phase_matrix(params_[0]);
    case GateKind::ECR: return ecr_matrix();
    case GateKind::Unitary2x2: return payload_;
    case GateKind::Barrier: break;
  }
  throw std::logic_error("barrier has no matrix");
}

Gate Gate::inverse() const {
  switch (kind_) {
    case GateKind::H:
    case GateKind::X:
    case GateKind::ID:
    case GateKind::ECR:
    case GateKind::Barrier:
      return *this;
    case GateKind::SX: return Gate::unitary(qubits_[0], sx_matrix().adjoint());
    case GateKind::RZ: return Gate::rz(qubits_[0], -params_[0]);
    case GateKind::Phase: return Gate::phase(qubits_[0], -params_[0]);
    case GateKind::U3: return Gate::u3(qubits_[0], -params_[0], -params_[2], -params_[1]);
    case GateKind::ControlledPhase: return Gate::cp(qubits_[0], qubits_[1], -params_[0]);
    case GateKind::Unitary2x2: return Gate::unitary(qubits_[0], payload_.adjoint());
  }
  throw std::logic_error("unknown gate kind");
}

Gate Gate::remapped(const std::vector<int>& mapping) const {
  Gate g = *this;
  for (int& q : g.qubits_) {
    if (q >= static_cast<int>(mapping.size())) throw std::out_of_range("qubit mapping too short");
    q = mapping[static_cast<std::size_t>(q)];
  }
  return g;
}

bool operator==(const Gate& a, const Gate& b) {
  if (a.kind_ != b.kind_ || a.qubits_ != b.qubits_ || a.params_ != b.params_) return false;
  return a.kind_ != GateKind::Unitary2x2 || a.payload_ == b.payload_;
}

ComplexMatrix hadamard_matrix() {
  ComplexMatrix m(2, 2);
  m << 1, 1, 1, -1;
  return m / std::sqrt(2.0);
}

ComplexMatrix pauli_x_matrix() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

ComplexMatrix pauli_y_matrix() {
  ComplexMatrix m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}

ComplexMatrix pauli_z_matrix() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

ComplexMatrix sx_matrix() {
  ComplexMatrix m(2, 2);
  m << Complex(1, 1), Complex(1, -1), Complex(1, -1), Complex(1, 1);
  return m / 2.0;
}

ComplexMatrix rz_matrix(double theta) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = std::polar(1.0, -theta / 2.0);
  m(1, 1) = std::polar(1.0, theta / 2.0);
  return m;
}

ComplexMatrix phase_matrix(double theta) {
  ComplexMatrix m = ComplexMatrix::Identity(2, 2);
  m(1, 1) = std::polar(1.0, theta);
  return m;
}

ComplexMatrix u3_matrix(double theta, double phi, double lambda) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  ComplexMatrix m(2, 2);
  m << c, -std::polar(s, lambda / 2.0), std::polar(s, phi / 2.0),
      std::polar(c, (lambda + phi) / 2.0);
  return m;
}

ComplexMatrix controlled_phase_matrix(double theta) {
  ComplexMatrix m = ComplexMatrix::Identity(4, 4);
  m(3, 3) = std::polar(1.0, theta);
  return m;
}

ComplexMatrix ecr_matrix() {
  ComplexMatrix m(4, 4);
  m << 0, 1, 0, kI,  //
      1, 0, -kI, 0,  //
      0, kI, 0, 1,   //
      -kI, 0, 1, 0;
  return m / std::sqrt(2.0);
}

}  // namespace dtqw
