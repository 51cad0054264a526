// SPDX-License-Identifier: Apache-2.0
//
// Time scheduling of circuits and XY4 dynamical-decoupling insertion.
#pragma once

#include "dtqw/circuit.hpp"

#include <vector>

namespace dtqw {

/// Gate durations in arbitrary time units. RZ and Phase are frame changes and
/// take no time; ID lasts one idle unit; barriers take no time.
struct GateDurations {
  double one_qubit = 1.0;
  double two_qubit = 10.0;
  double idle_unit = 1.0;

  double of(const Gate& g) const;
};

/// True for gates implemented as a frame change (RZ, Phase).
bool is_virtual(const Gate& g);

struct IdleWindow {
  int qubit = 0;
  double start = 0.0;
  double end = 0.0;
  double length() const { return end - start; }
};

struct ScheduledCircuit {
  Circuit circuit;
  std::vector<double> start_times;
  std::vector<double> durations;
  /// Gaps between consecutive gates of each qubit, ordered by (qubit, start).
  std::vector<IdleWindow> idle_windows;

  double end_time() const;
};

/// Idle windows implied by the given start times and durations. Gaps shorter
/// than 1e-12 are ignored.
std::vector<IdleWindow> idle_windows(const Circuit& c, const std::vector<double>& start_times,
                                     const std::vector<double>& durations);

/// As-soon-as-possible schedule. A barrier holds its qubits until the latest of them is free.
ScheduledCircuit schedule(const Circuit& c, const GateDurations& durations = {});

enum class DdSequence { XY4 };

/// Fills every idle window of length ≥ min_window with Y–δ–X–δ–Y–δ–X–δ,
/// δ = (window − 4·one_qubit)/4. Y is emitted as RZ(π/2), X, RZ(−π/2). Existing
/// gates keep their start times. Throws std::invalid_argument when min_window
/// is below 4·one_qubit or one_qubit is not positive.
ScheduledCircuit insert_dd(const ScheduledCircuit& sc, DdSequence sequence, double min_window,
                           const GateDurations& durations = {});

}  // namespace dtqw
