// SPDX-License-Identifier: Apache-2.0
//
// Exact dense-matrix discrete-time quantum walks on N-cycles.
//
// Basis ordering: the coin is the most significant index.
//   Embedding::Exact   index = coin * N   + position       (dimension 2N)
//   Embedding::Padded  index = coin * 2^n + position       (dimension 2 * 2^n, 2^n >= N)
// In the padded embedding positions N..2^n-1 are isolated nodes that the shift
// leaves in place; this is the layout the qubit circuits act on, with the coin
// on the highest qubit and position = sum_i q_i 2^i.
#pragma once

#include "dtqw/linalg.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dtqw {

/// Parameters (r, a, b) of the SU(2)-family coin
///   [[ √r,            √(1−r) e^{ia}     ],
///    [ √(1−r) e^{ib}, −√r e^{i(a+b)}    ]].
/// r must lie in [0, 1]; a and b are accepted in [0, 2π) (canonical range [0, π]).
class CoinParams {
 public:
  explicit CoinParams(double r, double a = 0.0, double b = 0.0);

  double r() const { return r_; }
  double a() const { return a_; }
  double b() const { return b_; }

  static CoinParams hadamard() { return CoinParams(0.5); }

  friend bool operator==(const CoinParams&, const CoinParams&) = default;

 private:
  double r_;
  double a_;
  double b_;
};

enum class Embedding { Exact, Padded };

/// Normalized complex amplitude vector.
class StateVector {
 public:
  /// Throws std::invalid_argument unless | ‖amplitudes‖ − 1 | < tol.
  explicit StateVector(ComplexVector amplitudes, double tol = 1e-10);

  static StateVector basis(std::size_t dim, std::size_t index);

  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  const ComplexVector& amplitudes() const { return amps_; }
  Complex operator[](std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }

 private:
  ComplexVector amps_;
};

/// A cyclic coin pattern with bound coin parameters. Step i of a walk uses
/// pattern[i mod |pattern|]; `length` is the number of steps the schedule spans.
class CoinSchedule {
 public:
  CoinSchedule(std::vector<std::string> pattern, std::map<std::string, CoinParams> coins,
               std::size_t length);

  const std::vector<std::string>& pattern() const { return pattern_; }
  const std::map<std::string, CoinParams>& coins() const { return coins_; }
  std::size_t length() const { return length_; }

  const std::string& label_at(std::size_t step) const;
  const CoinParams& coin_at(std::size_t step) const;

  /// The cyclic expansion of the pattern to `length` labels.
  std::vector<std::string> labels() const;

  /// Same pattern and coins, different length.
  CoinSchedule with_length(std::size_t length) const;

 private:
  std::vector<std::string> pattern_;
  std::map<std::string, CoinParams> coins_;
  std::size_t length_;
};

enum class PhaseMode {
  Strict,      // U^T = I exactly (eigenvalues λ^T = 1)
  Insensitive  // U^T = e^{iγ} I for some common phase γ
};

struct PeriodOptions {
  int t_max = 1000;
  double tol = 1e-8;
  PhaseMode mode = PhaseMode::Strict;
  double unitarity_tol = 1e-10;
};

struct PeriodResult {
  std::optional<int> period;
  /// Distance at the reported period, or the smallest distance seen when none was found.
  double residual = 0.0;
  /// Common phase γ at the reported period (0 in strict mode).
  double phase = 0.0;
  int bound = 0;
};

ComplexMatrix coin_operator(const CoinParams& p);

/// Number of position slots: N for Exact, the next power of two for Padded.
std::size_t position_slots(int cycle, Embedding embedding);
std::size_t walk_dimension(int cycle, Embedding embedding);

/// S = |0⟩⟨0| ⊗ R₀ + |1⟩⟨1| ⊗ R₁ with R₀ the decrement and R₁ the increment.
ComplexMatrix shift_operator(int cycle, Embedding embedding);

/// U = S · (C ⊗ I_positions).
ComplexMatrix step_operator(int cycle, Embedding embedding, const CoinParams& p);

/// cos(θ/2)|0_p,0_c⟩ + e^{iφ} sin(θ/2)|0_p,1_c⟩ with θ ∈ [0, π], φ ∈ [0, 2π).
StateVector initial_state(double theta, double phi, int cycle, Embedding embedding);

/// Trajectory ψ(1..t) under the schedule; empty schedule yields an empty trajectory.
std::vector<StateVector> evolve(const StateVector& state, const CoinSchedule& schedule, int cycle,
                                Embedding embedding);

/// Probability of finding the walker at position 0, summed over the coin.
double return_probability(const StateVector& state, int cycle, Embedding embedding);

/// Ordered product U(coin at step t−1) ··· U(coin at step 0) over the schedule.
ComplexMatrix schedule_operator(const CoinSchedule& schedule, int cycle, Embedding embedding);

/// Smallest T ≤ t_max with ‖U^T − e^{iγ}I‖_F < tol, by repeated multiplication.
/// γ is the phase of the largest-magnitude diagonal entry of U^T (0 in strict mode).
PeriodResult find_period_power(const ComplexMatrix& u, const PeriodOptions& options = {});

/// Same question answered from the spectrum: smallest T with max_j |λ_j^T − e^{iγ}| < tol,
/// γ = arg Σ_j λ_j^T. Throws EigenDecompositionError if the eigensolver fails.
PeriodResult find_period_eigen(const ComplexMatrix& u, const PeriodOptions& options = {});

/// Parse a coin pattern such as "AABB" or "A'A'B'B'" into labels (a letter
/// followed by any number of primes).
std::vector<std::string> parse_pattern(const std::string& pattern);

/// Cyclic expansion of `pattern` to t steps; throws on labels without a coin.
CoinSchedule parrondo_schedule(const std::string& pattern,
                               const std::map<std::string, CoinParams>& coins, std::size_t t);

}  // namespace dtqw
