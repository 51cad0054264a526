// SPDX-License-Identifier: Apache-2.0
//
// Gate-level circuits for QFT-based walks on 3-, 4- and 8-cycles.
//
// Qubit layout: position = Σ_i q_i 2^i on qubits 0..n−1, coin on qubit n. Under
// the global convention (qubit k is bit k of the state index) this reproduces
// the padded walk basis index = coin·2^n + position exactly.
#pragma once

#include "dtqw/gate.hpp"
#include "dtqw/walk.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace dtqw {

/// A labelled half-open range [begin, end) of gate indices.
struct Section {
  std::string label;
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const Section&, const Section&) = default;
};

class Circuit {
 public:
  explicit Circuit(int width, std::string name = {});

  int width() const { return width_; }
  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }
  bool empty() const { return gates_.empty(); }
  const Gate& operator[](std::size_t i) const { return gates_[i]; }

  /// Qubits read out at the end (metadata only; lowering ignores it).
  const std::vector<int>& measured() const { return measured_; }
  void set_measured(std::vector<int> qubits);

  const std::vector<Section>& sections() const { return sections_; }
  std::vector<Section> sections_labelled(const std::string& label) const;

  /// Appends a gate; throws std::invalid_argument if it touches a qubit ≥ width.
  Circuit& append(Gate gate);
  /// Appends every gate of `other`, optionally remapping its qubits.
  Circuit& append(const Circuit& other, const std::vector<int>& mapping = {});

  void begin_section(std::string label);
  void end_section();
  /// Records an already-populated range as a section.
  void add_section(Section section);

  /// Reversed gate list with every gate inverted. Sections are not carried over.
  Circuit inverse() const;

  friend bool operator==(const Circuit&, const Circuit&) = default;

 private:
  int width_;
  std::string name_;
  std::vector<Gate> gates_;
  std::vector<int> measured_;
  std::vector<Section> sections_;
  std::vector<std::pair<std::string, std::size_t>> open_;
};

/// Swap-free QFT on n qubits. Output bits come out reversed, so the lowered
/// unitary is Rev·F with F_{jk} = ω^{jk}/√(2^n) and Rev the bit-reversal
/// permutation. The walk circuits never need the swaps because the phase layer
/// in between is written against the reversed order.
Circuit build_qft_even(int n_qubits);

/// U3 parameters (θ, φ, λ) of the modified 3-cycle QFT, per layer and qubit.
struct ModifiedQftLayer {
  std::array<double, 3> q0;
  std::array<double, 3> q1;
};
extern const std::array<ModifiedQftLayer, 4> kModifiedQftLayers;

/// Two-qubit modified QFT: four layers of U3⊗U3 separated by three CZ gates
/// (8 one-qubit gates, 3 two-qubit gates, depth 7). Lowers to Rev·Q̃ = Q̃†,
/// with Q̃ = F₃ ⊕ 1 the 3-point Fourier block that leaves basis state 3 fixed.
Circuit build_qft_3cycle();

/// The 4×4 matrix Q̃ = F₃ ⊕ 1.
ComplexMatrix modified_qft_matrix();
/// F_{jk} = e^{2πi jk/n}/√n.
ComplexMatrix fourier_matrix(int n);
/// Permutation that reverses the bit order of an n-qubit index.
ComplexMatrix bit_reversal_matrix(int n_qubits);

/// QFT on q₁q₀, then per step the schedule coin on q₂ with P(−π) on q₀,
/// P(−π/2) on q₁ and CP(π) between q₂ and q₁, then the inverse QFT.
Circuit build_walk_circuit_4cycle(const CoinSchedule& schedule, int t);

/// Modified QFT, then per step the coin on q₂ with P(−4π/3) on q₀, P(−2π/3) on
/// q₁, CP(4π/3) on (q₂, q₁) and CP(8π/3) on (q₂, q₀), then its inverse.
Circuit build_walk_circuit_3cycle(const CoinSchedule& schedule, int t);

/// Walk on a 2^n-cycle for n ∈ {2, 3}. n = 2 is the 4-cycle circuit.
Circuit build_walk_circuit_even(int n_qubits, const CoinSchedule& schedule, int t);

/// Dispatch on the cycle size: 3, 4 or 8.
Circuit build_walk_circuit(int cycle, const CoinSchedule& schedule, int t);

/// Product of gate matrices in execution order; barriers are skipped.
/// Throws std::invalid_argument for width > 12.
ComplexMatrix lower_to_unitary(const Circuit& c);

struct DepthReport {
  int depth = 0;
  int counts_1q = 0;
  int counts_2q = 0;
  /// Gate indices per layer.
  std::vector<std::vector<std::size_t>> per_layer;
};

/// Greedy as-soon-as-possible layering. A barrier aligns its qubits to a common
/// layer boundary and is not counted.
DepthReport depth_report(const Circuit& c);

}  // namespace dtqw
