// SPDX-License-Identifier: Apache-2.0
//
// Distances between outcome distributions and between states.
#pragma once

#include "dtqw/simulator.hpp"
#include "dtqw/walk.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dtqw {

/// Probabilities of a distribution. Sampled counts are divided by the shot
/// count, which must be positive and equal to the count total. Exact values
/// must already sum to 1 within 1e-6. Throws std::invalid_argument otherwise.
std::map<int, double> normalized(const Distribution& d);

/// h(p, q) = (1/√2)·‖√p − √q‖₂ over the union of both outcome sets.
/// Outcomes present in only one distribution count as probability 0 in the other.
double hellinger_distance(const Distribution& p, const Distribution& q);
double hellinger_distance(const std::map<int, double>& p, const std::map<int, double>& q);

/// (1 − h²)²: 1 for equal inputs, 0 for disjoint supports.
double hellinger_fidelity(const Distribution& p, const Distribution& q);
double hellinger_fidelity(const std::map<int, double>& p, const std::map<int, double>& q);

/// min_γ ‖a − e^{iγ} b‖₂ = √(2 − 2|⟨a|b⟩|). Throws on dimension mismatch.
double state_distance_phase_aligned(const StateVector& a, const StateVector& b);

enum class Similarity { Distinct, Similar, AlmostAlike };

/// AlmostAlike above 0.95, Similar above 0.5, Distinct otherwise.
Similarity classify_fidelity(double fidelity);
std::string_view similarity_name(Similarity s);

struct FidelitySeries {
  std::vector<int> steps;
  std::vector<double> values;
  std::pair<std::string, std::string> labels;

  /// Throws std::invalid_argument on length mismatch or values outside [0, 1].
  void validate() const;
  std::size_t size() const { return steps.size(); }
  friend bool operator==(const FidelitySeries&, const FidelitySeries&) = default;
};

/// `# compare=<a>:<b>` header, a `t,fidelity` line, then one row per step.
void write_fidelity_csv(std::ostream& os, const FidelitySeries& s);
FidelitySeries read_fidelity_csv(std::istream& is);

}  // namespace dtqw
