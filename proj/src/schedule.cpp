// SPDX-License-Identifier: Apache-2.0
#include "dtqw/schedule.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace dtqw {

namespace {

constexpr double kMinGap = 1e-12;

}  // namespace

bool is_virtual(const Gate& g) {
  return g.kind() == GateKind::RZ || g.kind() == GateKind::Phase;
}

double GateDurations::of(const Gate& g) const {
  if (g.is_barrier() || is_virtual(g)) return 0.0;
  if (g.kind() == GateKind::ID) return idle_unit;
  return g.is_two_qubit() ? two_qubit : one_qubit;
}

double ScheduledCircuit::end_time() const {
  double end = 0.0;
  for (std::size_t i = 0; i < start_times.size(); ++i) end = std::max(end, start_times[i] + durations[i]);
  return end;
}

std::vector<IdleWindow> idle_windows(const Circuit& c, const std::vector<double>& start_times,
                                     const std::vector<double>& durations) {
  if (start_times.size() != c.size() || durations.size() != c.size()) {
    throw std::invalid_argument("schedule needs one start time and duration per gate");
  }
  std::vector<std::vector<std::pair<double, double>>> busy(static_cast<std::size_t>(c.width()));
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i].is_barrier()) continue;
    for (int q : c[i].qubits()) {
      busy[static_cast<std::size_t>(q)].emplace_back(start_times[i], start_times[i] + durations[i]);
    }
  }
  std::vector<IdleWindow> windows;
  for (int q = 0; q < c.width(); ++q) {
    auto& intervals = busy[static_cast<std::size_t>(q)];
    std::stable_sort(intervals.begin(), intervals.end());
    double free_from = 0.0;
    bool started = false;
    for (const auto& [s, e] : intervals) {
      if (started && s - free_from > kMinGap) windows.push_back({q, free_from, s});
      free_from = started ? std::max(free_from, e) : e;
      started = true;
    }
  }
  return windows;
}

ScheduledCircuit schedule(const Circuit& c, const GateDurations& durations) {
  ScheduledCircuit sc{c, {}, {}, {}};
  sc.start_times.reserve(c.size());
  sc.durations.reserve(c.size());
  std::vector<double> free_at(static_cast<std::size_t>(c.width()), 0.0);
  for (const auto& g : c.gates()) {
    double start = 0.0;
    for (int q : g.qubits()) start = std::max(start, free_at[static_cast<std::size_t>(q)]);
    const double d = durations.of(g);
    for (int q : g.qubits()) free_at[static_cast<std::size_t>(q)] = start + d;
    sc.start_times.push_back(start);
    sc.durations.push_back(d);
  }
  sc.idle_windows = idle_windows(sc.circuit, sc.start_times, sc.durations);
  return sc;
}

ScheduledCircuit insert_dd(const ScheduledCircuit& sc, DdSequence sequence, double min_window,
                           const GateDurations& durations) {
  if (sequence != DdSequence::XY4) throw std::invalid_argument("unsupported DD sequence");
  const double d = durations.one_qubit;
  if (!(d > 0.0)) throw std::invalid_argument("DD needs a positive single-qubit duration");
  if (min_window < 4.0 * d - kMinGap) {
    throw std::invalid_argument(
        fmt::format("min_window {} cannot hold four pulses of length {}", min_window, d));
  }

  struct Timed {
    Gate gate;
    double start;
    double duration;
    int inserted;  // 0 for original gates; ties at equal start put originals first
    std::size_t seq;
  };
  std::vector<Timed> items;
  for (std::size_t i = 0; i < sc.circuit.size(); ++i) {
    items.push_back({sc.circuit[i], sc.start_times[i], sc.durations[i], 0, items.size()});
  }
  auto add = [&](Gate g, double start, double duration) {
    items.push_back({std::move(g), start, duration, 1, items.size()});
  };
  for (const auto& w : sc.idle_windows) {
    if (w.length() < min_window - kMinGap) continue;
    const double delta = std::max(0.0, (w.length() - 4.0 * d) / 4.0);
    for (int k = 0; k < 4; ++k) {
      const double t = w.start + k * (d + delta);
      if (k % 2 == 0) {
        add(Gate::rz(w.qubit, kPi / 2.0), t, 0.0);
        add(Gate::x(w.qubit), t, d);
        add(Gate::rz(w.qubit, -kPi / 2.0), t + d, 0.0);
      } else {
        add(Gate::x(w.qubit), t, d);
      }
    }
  }
  std::stable_sort(items.begin(), items.end(), [](const Timed& a, const Timed& b) {
    if (a.start != b.start) return a.start < b.start;
    if (a.inserted != b.inserted) return a.inserted < b.inserted;
    return a.seq < b.seq;
  });

  ScheduledCircuit out{Circuit(sc.circuit.width(), sc.circuit.name()), {}, {}, {}};
  out.circuit.set_measured(sc.circuit.measured());
  for (auto& item : items) {
    out.circuit.append(std::move(item.gate));
    out.start_times.push_back(item.start);
    out.durations.push_back(item.duration);
  }
  out.idle_windows = idle_windows(out.circuit, out.start_times, out.durations);
  return out;
}

}  // namespace dtqw
