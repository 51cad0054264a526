// SPDX-License-Identifier: Apache-2.0
#include "dtqw/circuit.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dtqw {

Circuit::Circuit(int width, std::string name) : width_(width), name_(std::move(name)) {
  if (width < 1) throw std::invalid_argument(fmt::format("circuit width {} < 1", width));
}

void Circuit::set_measured(std::vector<int> qubits) {
  for (int q : qubits) {
    if (q < 0 || q >= width_) {
      throw std::invalid_argument(fmt::format("measured qubit {} outside width {}", q, width_));
    }
  }
  measured_ = std::move(qubits);
}

std::vector<Section> Circuit::sections_labelled(const std::string& label) const {
  std::vector<Section> out;
  std::copy_if(sections_.begin(), sections_.end(), std::back_inserter(out),
               [&](const Section& s) { return s.label == label; });
  return out;
}

Circuit& Circuit::append(Gate gate) {
  for (int q : gate.qubits()) {
    if (q >= width_) {
      throw std::invalid_argument(
          fmt::format("{} on qubit {} exceeds width {}", gate_kind_name(gate.kind()), q, width_));
    }
  }
  gates_.push_back(std::move(gate));
  return *this;
}

Circuit& Circuit::append(const Circuit& other, const std::vector<int>& mapping) {
  for (const auto& g : other.gates()) append(mapping.empty() ? g : g.remapped(mapping));
  return *this;
}

void Circuit::begin_section(std::string label) { open_.emplace_back(std::move(label), size()); }

void Circuit::end_section() {
  if (open_.empty()) throw std::logic_error("end_section without begin_section");
  auto [label, begin] = std::move(open_.back());
  open_.pop_back();
  sections_.push_back({std::move(label), begin, size()});
}

void Circuit::add_section(Section section) {
  if (section.begin > section.end || section.end > size()) {
    throw std::invalid_argument(fmt::format("section '{}' [{}, {}) outside circuit of {} gates",
                                            section.label, section.begin, section.end, size()));
  }
  sections_.push_back(std::move(section));
}

Circuit Circuit::inverse() const {
  Circuit out(width_, name_.empty() ? name_ : name_ + "_inv");
  for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) out.append(it->inverse());
  out.measured_ = measured_;
  return out;
}

Circuit build_qft_even(int n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("QFT needs at least one qubit");
  Circuit c(n_qubits, fmt::format("qft{}", n_qubits));
  for (int target = n_qubits - 1; target >= 0; --target) {
    c.append(Gate::h(target));
    for (int control = target - 1; control >= 0; --control) {
      c.append(Gate::cp(control, target, kPi / std::ldexp(1.0, target - control)));
    }
  }
  return c;
}

// Solved against Rev·Q̃ to a residual of ~3e-15 (Frobenius, no phase freedom).
const std::array<ModifiedQftLayer, 4> kModifiedQftLayers{{
    {{1.3352354143795857, -4.0568138141783372, 3.4374261698347564},
     {2.3646880256910912, -0.26323702098422963, 4.7884205161767142}},
    {{1.2328425474165083, -5.6255860622770584, 5.1295091946057294},
     {-2.4291165862436013, 0.96223006273241651, -5.6266398531417501}},
    {{-1.0907424227312621, 5.8406642913672471, 4.5255158265547237},
     {2.110569839231097, -1.7008582808124615, 1.7446238506253078}},
    {{-3.2766352858183159, 0.61329651278486885, 0.35756341707820027},
     {-1.8017484603772598, 0.92962390626646663, -0.060164429068315428}},
}};

Circuit build_qft_3cycle() {
  Circuit c(2, "qft3");
  for (std::size_t k = 0; k < kModifiedQftLayers.size(); ++k) {
    if (k > 0) c.append(Gate::cp(0, 1, kPi));
    const auto& [q0, q1] = kModifiedQftLayers[k];
    c.append(Gate::u3(0, q0[0], q0[1], q0[2]));
    c.append(Gate::u3(1, q1[0], q1[1], q1[2]));
  }
  return c;
}

ComplexMatrix fourier_matrix(int n) {
  if (n < 1) throw std::invalid_argument("Fourier matrix size must be positive");
  ComplexMatrix f(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      f(j, k) = std::polar(scale, 2.0 * kPi * static_cast<double>((j * k) % n) / n);
    }
  }
  return f;
}

ComplexMatrix modified_qft_matrix() {
  ComplexMatrix q = ComplexMatrix::Zero(4, 4);
  q.topLeftCorner(3, 3) = fourier_matrix(3);
  q(3, 3) = 1.0;
  return q;
}

ComplexMatrix bit_reversal_matrix(int n_qubits) {
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    Eigen::Index r = 0;
    for (int b = 0; b < n_qubits; ++b) r |= ((k >> b) & 1) << (n_qubits - 1 - b);
    p(r, k) = 1.0;
  }
  return p;
}

namespace {

void check_steps(int t) {
  if (t < 0) throw std::invalid_argument(fmt::format("number of steps t={} < 0", t));
}

std::vector<int> iota_qubits(int n) {
  std::vector<int> q(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) q[static_cast<std::size_t>(i)] = i;
  return q;
}

// Wraps `step_body` between `fourier` and its inverse on qubits 0..n−1.
template <typename StepBody>
Circuit walk_circuit(std::string name, int n, const Circuit& fourier, const CoinSchedule& schedule,
                     int t, StepBody step_body) {
  check_steps(t);
  Circuit c(n + 1, std::move(name));
  c.begin_section("qft");
  c.append(fourier);
  c.end_section();
  for (int i = 0; i < t; ++i) {
    c.begin_section("step");
    c.append(Gate::unitary(n, coin_operator(schedule.coin_at(static_cast<std::size_t>(i)))));
    step_body(c);
    c.end_section();
  }
  c.begin_section("iqft");
  c.append(fourier.inverse());
  c.end_section();
  c.set_measured(iota_qubits(n));
  return c;
}

}  // namespace

Circuit build_walk_circuit_even(int n_qubits, const CoinSchedule& schedule, int t) {
  if (n_qubits < 2 || n_qubits > 3) {
    throw std::invalid_argument(fmt::format("even-cycle walk needs 2 or 3 position qubits, got {}",
                                            n_qubits));
  }
  const int coin = n_qubits;
  return walk_circuit(
      fmt::format("walk{}", 1 << n_qubits), n_qubits, build_qft_even(n_qubits), schedule, t,
      [n_qubits, coin](Circuit& c) {
        for (int i = 0; i < n_qubits; ++i) c.append(Gate::phase(i, -kPi / std::ldexp(1.0, i)));
        for (int i = n_qubits - 1; i >= 1; --i) {
          c.append(Gate::cp(coin, i, 2.0 * kPi / std::ldexp(1.0, i)));
        }
      });
}

Circuit build_walk_circuit_4cycle(const CoinSchedule& schedule, int t) {
  return build_walk_circuit_even(2, schedule, t);
}

Circuit build_walk_circuit_3cycle(const CoinSchedule& schedule, int t) {
  return walk_circuit("walk3", 2, build_qft_3cycle(), schedule, t, [](Circuit& c) {
    c.append(Gate::phase(0, -4.0 * kPi / 3.0));
    c.append(Gate::phase(1, -2.0 * kPi / 3.0));
    c.append(Gate::cp(2, 1, 4.0 * kPi / 3.0));
    c.append(Gate::cp(2, 0, 8.0 * kPi / 3.0));
  });
}

Circuit build_walk_circuit(int cycle, const CoinSchedule& schedule, int t) {
  switch (cycle) {
    case 3: return build_walk_circuit_3cycle(schedule, t);
    case 4: return build_walk_circuit_even(2, schedule, t);
    case 8: return build_walk_circuit_even(3, schedule, t);
    default:
      throw std::invalid_argument(fmt::format("no walk circuit for a {}-cycle (3, 4 or 8)", cycle));
  }
}

ComplexMatrix lower_to_unitary(const Circuit& c) {
  if (c.width() > 12) {
    throw std::invalid_argument(fmt::format("cannot lower width {} > 12 to a dense matrix", c.width()));
  }
  const Eigen::Index dim = Eigen::Index{1} << c.width();
  ComplexMatrix u = ComplexMatrix::Identity(dim, dim);
  for (const auto& g : c.gates()) {
    if (g.is_barrier()) continue;
    const ComplexMatrix m = g.matrix();
    const auto& qs = g.qubits();
    // Rows of u are mixed in groups of 2^k indices that differ only on the gate's qubits.
    const Eigen::Index k = static_cast<Eigen::Index>(qs.size());
    const Eigen::Index sub = Eigen::Index{1} << k;
    Eigen::Index mask = 0;
    for (int q : qs) mask |= Eigen::Index{1} << q;
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(sub));
    ComplexMatrix block(sub, dim);
    for (Eigen::Index base = 0; base < dim; ++base) {
      if (base & mask) continue;
      for (Eigen::Index a = 0; a < sub; ++a) {
        Eigen::Index idx = base;
        for (Eigen::Index b = 0; b < k; ++b) {
          if ((a >> b) & 1) idx |= Eigen::Index{1} << qs[static_cast<std::size_t>(b)];
        }
        rows[static_cast<std::size_t>(a)] = idx;
        block.row(a) = u.row(idx);
      }
      const ComplexMatrix mixed = m * block;
      for (Eigen::Index a = 0; a < sub; ++a) u.row(rows[static_cast<std::size_t>(a)]) = mixed.row(a);
    }
  }
  return u;
}

DepthReport depth_report(const Circuit& c) {
  DepthReport report;
  std::vector<int> level(static_cast<std::size_t>(c.width()), 0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Gate& g = c[i];
    int start = 0;
    for (int q : g.qubits()) start = std::max(start, level[static_cast<std::size_t>(q)]);
    if (g.is_barrier()) {
      for (int q : g.qubits()) level[static_cast<std::size_t>(q)] = start;
      continue;
    }
    for (int q : g.qubits()) level[static_cast<std::size_t>(q)] = start + 1;
    if (static_cast<std::size_t>(start) >= report.per_layer.size()) {
      report.per_layer.resize(static_cast<std::size_t>(start) + 1);
    }
    report.per_layer[static_cast<std::size_t>(start)].push_back(i);
    if (g.is_two_qubit()) {
      ++report.counts_2q;
    } else {
      ++report.counts_1q;
    }
  }
  report.depth = static_cast<int>(report.per_layer.size());
  return report;
}

}  // namespace dtqw
