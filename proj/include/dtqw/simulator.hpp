// SPDX-License-Identifier: Apache-2.0
//
// Statevector and density-matrix execution of circuits.
#pragma once

#include "dtqw/circuit.hpp"
#include "dtqw/schedule.hpp"
#include "dtqw/walk.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace dtqw {

/// Outcome → probability (exact mode, shots = 0) or outcome → count (sampled mode).
/// Outcome k has bit i set when measured qubit i read 1.
struct Distribution {
  std::map<int, double> values;
  std::uint64_t shots = 0;

  bool sampled() const { return shots > 0; }
  /// Values divided by their total; throws std::invalid_argument on an empty or zero total.
  std::map<int, double> probabilities() const;
  double total() const;

  friend bool operator==(const Distribution&, const Distribution&) = default;
};

void write_distribution_csv(std::ostream& os, const Distribution& d);
Distribution read_distribution_csv(std::istream& is);

/// Per-gate depolarizing, idle thermal relaxation and readout bit flips.
/// Times share the unit of the gate durations; infinite t1/t2 disable relaxation.
struct NoiseModel {
  double p1 = 2e-4;
  double p2 = 8e-3;
  double t1 = 300.0;
  double t2 = 200.0;
  double dur_1q = 1.0;
  double dur_2q = 10.0;
  double dur_idle_unit = 1.0;
  double readout_flip = 0.0;

  /// All channels off.
  static NoiseModel none();
  GateDurations durations() const { return {dur_1q, dur_2q, dur_idle_unit}; }
  /// Throws std::invalid_argument naming the first offending field.
  void validate() const;

  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

class DensityMatrix {
 public:
  /// Checks trace (1e-9), Hermiticity (1e-10) and positivity (eigenvalues ≥ −1e-9).
  explicit DensityMatrix(ComplexMatrix rho);
  static DensityMatrix from_state(const StateVector& psi);

  std::size_t dim() const { return static_cast<std::size_t>(rho_.rows()); }
  int width() const;
  const ComplexMatrix& matrix() const { return rho_; }
  ComplexMatrix& mutable_matrix() { return rho_; }

  double trace() const { return rho_.trace().real(); }
  double min_eigenvalue() const;
  /// Reduced state of the listed qubits (first listed is the least significant bit).
  ComplexMatrix reduced(const std::vector<int>& keep) const;

 private:
  ComplexMatrix rho_;
};

// Amplitude kernels. `data` addresses 2^n_qubits entries spaced `stride` apart;
// the gate matrix mixes entries that differ only on the gate's qubits.
void apply_matrix_strided(Complex* data, Eigen::Index stride, int n_qubits, const ComplexMatrix& m,
                          const std::vector<int>& qubits);
void apply_gate(ComplexVector& psi, const Gate& g);

/// Gate-by-gate statevector evolution.
StateVector run_exact(const Circuit& c, const StateVector& initial);

/// Marginal over `measured_qubits`. shots = 0 returns exact probabilities,
/// otherwise a multinomial sample drawn with an mt19937_64 seeded by `seed`.
Distribution measure_positions(const StateVector& state, const std::vector<int>& measured_qubits,
                               std::uint64_t shots, std::uint64_t seed);
/// Multinomial sample of `shots` outcomes from the normalized values of `exact`.
Distribution sample_counts(const Distribution& exact, std::uint64_t shots, std::uint64_t seed);

// Channels acting in place on a density matrix of `width` qubits.
void apply_unitary(ComplexMatrix& rho, const Gate& g);
/// (1 − p)ρ + p · Tr_Q(ρ) ⊗ I/2^|Q|.
void apply_depolarizing(ComplexMatrix& rho, const std::vector<int>& qubits, double p);
/// Amplitude damping to |0⟩ with 1 − e^{−τ/t1} and coherence decay e^{−τ/t2}.
void apply_thermal_relaxation(ComplexMatrix& rho, int qubit, double tau, double t1, double t2);

/// Schedules `c` as soon as possible with the model's durations, then runs it.
DensityMatrix run_noisy(const Circuit& c, const DensityMatrix& initial, const NoiseModel& nm);
/// Uses the given start times. Each gate is followed by depolarizing of strength
/// p1 or p2 on its qubits (none for RZ, Phase, ID and barriers); the gap since a
/// qubit's previous gate relaxes before the next gate starts. ID gates count as idle time.
DensityMatrix run_noisy(const ScheduledCircuit& sc, const DensityMatrix& initial, const NoiseModel& nm);

/// Diagonal marginal on `measured_qubits` followed by independent bit flips.
Distribution readout_distribution(const DensityMatrix& rho, const std::vector<int>& measured_qubits,
                                  const NoiseModel& nm);

}  // namespace dtqw
