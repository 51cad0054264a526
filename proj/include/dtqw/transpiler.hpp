// SPDX-License-Identifier: Apache-2.0
//
// Lowering to the native set {ID, RZ, SX, X, ECR} and optimization passes.
// Scheduling and dynamical decoupling live in schedule.hpp.
#pragma once

#include "dtqw/circuit.hpp"
#include "dtqw/schedule.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace dtqw {

enum class OptLevel { L0, L1, L3 };

std::string_view opt_level_name(OptLevel level);
/// Accepts "0", "1", "3" with an optional "L" prefix.
std::optional<OptLevel> opt_level_from_name(std::string_view name);

/// At most five native gates equal to `u` (2×2) on qubit q up to global phase.
/// Diagonal and anti-diagonal inputs take one or two gates; otherwise the
/// shortest RZ–SX–RZ–SX–RZ variant is chosen. Angles lie in (−π, π]; zero
/// angles are dropped, so the identity yields an empty list.
std::vector<Gate> decompose_1q(const ComplexMatrix& u, int q);
/// Native gates pass through and RZ angles are canonicalized.
/// Throws std::invalid_argument for multi-qubit gates and barriers.
std::vector<Gate> decompose_1q(const Gate& g);

/// ControlledPhase(θ) from two CX-equivalent ECR blocks and RZ rotations.
/// θ ≡ 0 (mod 2π) gives an empty list.
std::vector<Gate> decompose_cp(double theta, int control, int target);

bool is_native_circuit(const Circuit& c);

// Individual passes, exposed for testing.

/// Replaces each non-native gate by its native decomposition.
Circuit lower_to_native(const Circuit& c);
/// Merges maximal runs of single-qubit gates per wire and keeps the
/// resynthesized run when it is strictly shorter.
Circuit fuse_single_qubit_runs(const Circuit& c);
/// Removes pairs of mutually inverse gates with nothing in between on their qubits.
Circuit cancel_inverse_pairs(const Circuit& c);
/// Moves diagonal single-qubit gates and controlled phases past each other,
/// merging them until a non-diagonal gate needs the qubit.
Circuit coalesce_diagonals(const Circuit& c);
/// Collects consecutive gates acting on one qubit pair and, when they need
/// more than three ECRs, replaces the block by the fitted 3-ECR template.
Circuit consolidate_two_qubit_blocks(const Circuit& c);

/// Native circuit with the same unitary up to global phase. L1 iterates fusion
/// and cancellation to a fixed point. L3 also tries diagonal coalescing with
/// block consolidation and, for width ≤ 3, resynthesis of the whole unitary.
/// Both candidates are cleaned up in fixed-shape mode, where rewrites depend on
/// gate kinds and run lengths but not on angles, so the output shape does not
/// drift with the data. The winner has the fewest ECRs, then the least depth,
/// among candidates no worse than L1 in depth and size.
/// Throws SynthesisError when a resynthesized candidate misses the input by more than 1e-8.
Circuit transpile(const Circuit& c, OptLevel level);

}  // namespace dtqw
