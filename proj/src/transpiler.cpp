// SPDX-License-Identifier: Apache-2.0
#include "dtqw/transpiler.hpp"

#include "dtqw/synthesis.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <tuple>
#include <utility>

namespace dtqw {

namespace {

constexpr double kZeroAngle = 1e-12;

Circuit empty_like(const Circuit& c) {
  Circuit out(c.width(), c.name());
  out.set_measured(c.measured());
  return out;
}

ComplexMatrix product_of(const std::vector<Gate>& gates) {
  ComplexMatrix m = ComplexMatrix::Identity(2, 2);
  for (const auto& g : gates) m = g.matrix() * m;
  return m;
}

void push_rz(std::vector<Gate>& out, int q, double theta) {
  const double a = canonical_angle(theta);
  if (std::abs(a) > kZeroAngle) out.push_back(Gate::rz(q, a));
}

// U = e^{iα}·U3(θ, φ, λ). Each branch reads the phases from the larger
// entries so that near-diagonal and near-antidiagonal inputs stay accurate.
struct EulerAngles {
  double theta, phi, lambda;
};

EulerAngles euler_angles(const ComplexMatrix& u) {
  const double c = std::abs(u(0, 0)), s = std::abs(u(1, 0));
  const double theta = 2.0 * std::atan2(s, c);
  if (c >= s) {
    const double alpha = std::arg(u(0, 0));
    const double phi = s > 0.0 ? std::arg(u(1, 0)) - alpha : 0.0;
    return {theta, phi, std::arg(u(1, 1)) - alpha - phi};
  }
  const double alpha = c > 0.0 ? std::arg(u(0, 0)) : 0.0;
  return {theta, std::arg(u(1, 0)) - alpha, std::arg(-u(0, 1)) - alpha};
}

bool is_phase_times_identity(const ComplexMatrix& m, double tol) {
  return phase_aligned_distance(m, ComplexMatrix::Identity(m.rows(), m.cols())).distance < tol;
}

}  // namespace

std::string_view opt_level_name(OptLevel level) {
  switch (level) {
    case OptLevel::L0: return "0";
    case OptLevel::L1: return "1";
    case OptLevel::L3: return "3";
  }
  return "?";
}

std::optional<OptLevel> opt_level_from_name(std::string_view name) {
  if (!name.empty() && (name.front() == 'L' || name.front() == 'l')) name.remove_prefix(1);
  if (name == "0") return OptLevel::L0;
  if (name == "1") return OptLevel::L1;
  if (name == "3") return OptLevel::L3;
  return std::nullopt;
}

std::vector<Gate> decompose_1q(const ComplexMatrix& u, int q) {
  if (u.rows() != 2 || u.cols() != 2 || !is_unitary(u, 1e-10)) {
    throw std::invalid_argument("decompose_1q needs a 2x2 unitary");
  }
  std::vector<std::vector<Gate>> candidates;
  auto add = [&](std::initializer_list<std::pair<bool, double>> steps) {
    // Each step is (is_rz, angle); non-RZ steps are SX.
    std::vector<Gate> seq;
    for (auto [rz, angle] : steps) {
      if (rz) push_rz(seq, q, angle);
      else seq.push_back(Gate::sx(q));
    }
    candidates.push_back(std::move(seq));
  };

  const Complex u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
  add({{true, std::arg(u11) - std::arg(u00)}});
  {
    std::vector<Gate> seq{Gate::x(q)};
    push_rz(seq, q, std::arg(u10) - std::arg(u01));
    candidates.push_back(std::move(seq));
  }
  candidates.push_back({Gate::sx(q)});

  const auto [theta, phi, lambda] = euler_angles(u);
  for (auto [t, p, l] : {std::tuple{theta, phi, lambda}, std::tuple{-theta, phi + kPi, lambda + kPi}}) {
    add({{true, l - kPi / 2.0}, {false, 0.0}, {true, p + kPi / 2.0}});
    add({{true, l}, {false, 0.0}, {true, t + kPi}, {false, 0.0}, {true, p + kPi}});
  }

  const std::vector<Gate>* best = nullptr;
  for (const auto& seq : candidates) {
    if (best != nullptr && seq.size() >= best->size()) continue;
    if (phase_aligned_distance(product_of(seq), u).distance < 1e-10) best = &seq;
  }
  if (best == nullptr) throw SynthesisError("no RZ-SX form reproduces the single-qubit unitary");
  return *best;
}

std::vector<Gate> decompose_1q(const Gate& g) {
  if (!g.is_single_qubit()) throw std::invalid_argument("decompose_1q needs a single-qubit gate");
  const int q = g.qubits()[0];
  switch (g.kind()) {
    case GateKind::ID:
    case GateKind::X:
    case GateKind::SX: return {g};
    case GateKind::RZ:
    case GateKind::Phase: {
      std::vector<Gate> out;
      push_rz(out, q, g.params()[0]);
      return out;
    }
    default: return decompose_1q(g.matrix(), q);
  }
}

namespace {

// RZ–SX–RZ–SX–RZ with only exactly vanishing angles dropped. Unlike
// decompose_1q this never takes a shortcut for special matrices, so the gate
// count does not depend on the values carried by the input.
std::vector<Gate> decompose_1q_general(const ComplexMatrix& u, int q) {
  const EulerAngles e = euler_angles(u);
  std::vector<Gate> seq;
  push_rz(seq, q, e.lambda);
  seq.push_back(Gate::sx(q));
  push_rz(seq, q, e.theta + kPi);
  seq.push_back(Gate::sx(q));
  push_rz(seq, q, e.phi + kPi);
  if (phase_aligned_distance(product_of(seq), u).distance > 1e-10) {
    throw SynthesisError("five-gate form misses the single-qubit unitary");
  }
  return seq;
}

bool carries_data(const Gate& g) { return g.kind() == GateKind::Unitary2x2 || g.kind() == GateKind::U3; }

}  // namespace

std::vector<Gate> decompose_cp(double theta, int control, int target) {
  const double a = canonical_angle(theta);
  if (std::abs(a) <= kZeroAngle) return {};
  std::vector<Gate> out;
  push_rz(out, control, a / 2.0);
  push_rz(out, target, a / 2.0);
  for (auto& g : cx_via_ecr(control, target)) out.push_back(std::move(g));
  push_rz(out, target, -a / 2.0);
  for (auto& g : cx_via_ecr(control, target)) out.push_back(std::move(g));
  return out;
}

bool is_native_circuit(const Circuit& c) {
  return std::all_of(c.gates().begin(), c.gates().end(),
                     [](const Gate& g) { return g.is_barrier() || g.is_native(); });
}

namespace {

Circuit lower(const Circuit& c, bool fixed_shape) {
  Circuit out = empty_like(c);
  for (const auto& g : c.gates()) {
    if (fixed_shape && carries_data(g)) {
      for (auto& n : decompose_1q_general(g.matrix(), g.qubits()[0])) out.append(std::move(n));
    } else if (g.is_barrier() || g.kind() == GateKind::ECR) {
      out.append(g);
    } else if (g.kind() == GateKind::ControlledPhase) {
      for (auto& n : decompose_cp(g.params()[0], g.qubits()[0], g.qubits()[1])) out.append(std::move(n));
    } else if (g.is_single_qubit()) {
      for (auto& n : decompose_1q(g)) out.append(std::move(n));
    } else {
      throw std::invalid_argument(fmt::format("no native lowering for {}", gate_kind_name(g.kind())));
    }
  }
  return out;
}

// In fixed-shape mode a run is rewritten based on its length and gate kinds
// alone: RZ-only runs merge, longer runs take the five-gate general form.
Circuit fuse_runs(const Circuit& c, bool fixed_shape) {
  Circuit out = empty_like(c);
  std::vector<std::vector<Gate>> runs(static_cast<std::size_t>(c.width()));
  auto flush = [&](int q) {
    auto& run = runs[static_cast<std::size_t>(q)];
    if (run.empty()) return;
    std::vector<Gate> fused;
    if (!fixed_shape) {
      fused = decompose_1q(product_of(run), q);
    } else if (std::all_of(run.begin(), run.end(), [](const Gate& g) { return g.kind() == GateKind::RZ; })) {
      double sum = 0.0;
      for (const auto& g : run) sum += g.params()[0];
      push_rz(fused, q, sum);
    } else {
      fused = decompose_1q_general(product_of(run), q);
    }
    if (fused.size() >= run.size() && fixed_shape) {
      // Keep the run but merge neighbouring RZs.
      fused.clear();
      for (const auto& g : run) {
        if (g.kind() == GateKind::RZ && !fused.empty() && fused.back().kind() == GateKind::RZ) {
          const double merged = fused.back().params()[0] + g.params()[0];
          fused.pop_back();
          push_rz(fused, q, merged);
        } else if (g.kind() == GateKind::RZ) {
          push_rz(fused, q, g.params()[0]);
        } else {
          fused.push_back(g);
        }
      }
    }
    for (auto& g : fused.size() < run.size() ? fused : run) out.append(std::move(g));
    run.clear();
  };
  for (const auto& g : c.gates()) {
    if (g.is_single_qubit()) {
      runs[static_cast<std::size_t>(g.qubits()[0])].push_back(g);
      continue;
    }
    for (int q : g.qubits()) flush(q);
    out.append(g);
  }
  for (int q = 0; q < c.width(); ++q) flush(q);
  return out;
}

Circuit cancel_pairs(const Circuit& c, bool two_qubit_only) {
  std::vector<std::optional<Gate>> kept;
  std::vector<std::vector<std::size_t>> last(static_cast<std::size_t>(c.width()));
  for (const auto& g : c.gates()) {
    const auto& qs = g.qubits();
    std::optional<std::size_t> partner;
    if (!g.is_barrier()) {
      const auto& first = last[static_cast<std::size_t>(qs[0])];
      if (!first.empty()) partner = first.back();
      for (int q : qs) {
        const auto& stack = last[static_cast<std::size_t>(q)];
        if (stack.empty() || stack.back() != partner) partner.reset();
      }
    }
    if (partner) {
      const Gate& h = *kept[*partner];
      if (!h.is_barrier() && h.qubits() == qs && (!two_qubit_only || g.is_two_qubit()) &&
          is_phase_times_identity(g.matrix() * h.matrix(), 1e-12)) {
        kept[*partner].reset();
        for (int q : qs) last[static_cast<std::size_t>(q)].pop_back();
        continue;
      }
    }
    for (int q : qs) last[static_cast<std::size_t>(q)].push_back(kept.size());
    kept.emplace_back(g);
  }
  Circuit out = empty_like(c);
  for (auto& g : kept) {
    if (g) out.append(std::move(*g));
  }
  return out;
}

}  // namespace

Circuit lower_to_native(const Circuit& c) { return lower(c, false); }
Circuit fuse_single_qubit_runs(const Circuit& c) { return fuse_runs(c, false); }
Circuit cancel_inverse_pairs(const Circuit& c) { return cancel_pairs(c, false); }

Circuit coalesce_diagonals(const Circuit& c) {
  Circuit out = empty_like(c);
  const auto width = static_cast<std::size_t>(c.width());
  std::vector<Complex> d0(width, 1.0), d1(width, 1.0);
  std::map<std::pair<int, int>, double> pending_cp;

  auto flush = [&](int q) {
    const auto k = static_cast<std::size_t>(q);
    const double phase = canonical_angle(std::arg(d1[k] / d0[k]));
    if (std::abs(phase) > kZeroAngle) out.append(Gate::phase(q, phase));
    d0[k] = d1[k] = 1.0;
    for (auto it = pending_cp.begin(); it != pending_cp.end();) {
      if (it->first.first == q || it->first.second == q) {
        const double theta = canonical_angle(it->second);
        if (std::abs(theta) > kZeroAngle) out.append(Gate::cp(it->first.first, it->first.second, theta));
        it = pending_cp.erase(it);
      } else {
        ++it;
      }
    }
  };

  for (const auto& g : c.gates()) {
    if (g.is_single_qubit() && g.is_diagonal() && g.kind() != GateKind::ID) {
      const auto k = static_cast<std::size_t>(g.qubits()[0]);
      const ComplexMatrix m = g.matrix();
      d0[k] *= m(0, 0);
      d1[k] *= m(1, 1);
    } else if (g.kind() == GateKind::ControlledPhase) {
      const auto [lo, hi] = std::minmax(g.qubits()[0], g.qubits()[1]);
      pending_cp[{lo, hi}] += g.params()[0];
    } else {
      for (int q : g.qubits()) flush(q);
      out.append(g);
    }
  }
  for (int q = 0; q < c.width(); ++q) flush(q);
  return out;
}

Circuit consolidate_two_qubit_blocks(const Circuit& c) {
  struct Block {
    int a = 0, b = 0;
    std::vector<Gate> gates;
    int ecr_cost = 0;
  };
  Circuit out = empty_like(c);
  std::vector<std::optional<Block>> blocks;
  std::vector<int> owner(static_cast<std::size_t>(c.width()), -1);

  auto cost_of = [](const Gate& g) {
    if (g.kind() == GateKind::ECR) return 1;
    if (g.kind() == GateKind::ControlledPhase) return std::abs(canonical_angle(g.params()[0])) > kZeroAngle ? 2 : 0;
    return 0;
  };

  auto close = [&](int index) {
    if (index < 0) return;
    Block& blk = *blocks[static_cast<std::size_t>(index)];
    owner[static_cast<std::size_t>(blk.a)] = owner[static_cast<std::size_t>(blk.b)] = -1;
    std::vector<Gate> replacement = blk.gates;
    if (blk.ecr_cost > 0) {
      std::vector<int> mapping(static_cast<std::size_t>(c.width()), 0);
      mapping[static_cast<std::size_t>(blk.a)] = 0;
      mapping[static_cast<std::size_t>(blk.b)] = 1;
      Circuit local(2);
      for (const auto& g : blk.gates) local.append(g.remapped(mapping));
      const ComplexMatrix u = lower_to_unitary(local);
      ComplexMatrix on_a, on_b;
      if (split_local(u, on_a, on_b)) {
        replacement = {Gate::unitary(blk.a, on_a), Gate::unitary(blk.b, on_b)};
      } else if (blk.ecr_cost > 3) {
        replacement = synthesize_two_qubit(u, blk.a, blk.b);
      }
    }
    for (auto& g : replacement) out.append(std::move(g));
    blocks[static_cast<std::size_t>(index)].reset();
  };

  for (const auto& g : c.gates()) {
    if (g.is_barrier()) {
      for (int q : g.qubits()) close(owner[static_cast<std::size_t>(q)]);
      out.append(g);
    } else if (g.is_single_qubit()) {
      const int o = owner[static_cast<std::size_t>(g.qubits()[0])];
      if (o >= 0) blocks[static_cast<std::size_t>(o)]->gates.push_back(g);
      else out.append(g);
    } else {
      const int a = g.qubits()[0], b = g.qubits()[1];
      int o = owner[static_cast<std::size_t>(a)];
      if (o < 0 || o != owner[static_cast<std::size_t>(b)]) {
        close(owner[static_cast<std::size_t>(a)]);
        close(owner[static_cast<std::size_t>(b)]);
        o = static_cast<int>(blocks.size());
        blocks.push_back(Block{a, b, {}, 0});
        owner[static_cast<std::size_t>(a)] = owner[static_cast<std::size_t>(b)] = o;
      }
      Block& blk = *blocks[static_cast<std::size_t>(o)];
      blk.gates.push_back(g);
      blk.ecr_cost += cost_of(g);
    }
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i]) close(static_cast<int>(i));
  }
  return out;
}

namespace {

Circuit optimize_native(Circuit c, bool fixed_shape = false) {
  for (;;) {
    Circuit next = cancel_pairs(fuse_runs(c, fixed_shape), fixed_shape);
    const bool shrunk = next.size() < c.size();
    if (next.size() <= c.size()) c = std::move(next);
    if (!shrunk) return c;
  }
}

// Two-qubit gates dominate the error budget, so they rank first.
bool better(const DepthReport& a, std::size_t size_a, const DepthReport& b, std::size_t size_b) {
  return std::tuple{a.counts_2q, a.depth, size_a} < std::tuple{b.counts_2q, b.depth, size_b};
}

// Longest chain of back-to-back sections sharing a label, as a gate range.
std::optional<std::pair<std::size_t, std::size_t>> repeated_section_window(const Circuit& c) {
  std::vector<Section> sections = c.sections();
  std::sort(sections.begin(), sections.end(), [](const Section& x, const Section& y) { return x.begin < y.begin; });
  std::optional<std::pair<std::size_t, std::size_t>> best;
  for (std::size_t i = 0; i < sections.size();) {
    std::size_t j = i + 1;
    while (j < sections.size() && sections[j].label == sections[i].label && sections[j].begin == sections[j - 1].end) ++j;
    const std::size_t begin = sections[i].begin, end = sections[j - 1].end;
    if (end > begin && (!best || end - begin > best->second - best->first)) best = std::pair{begin, end};
    i = j;
  }
  return best;
}

// Qubit on which `u` acts as a uniformly controlled 2×2 gate, if any.
std::optional<int> multiplexed_target(const ComplexMatrix& u, int width) {
  for (int q = 0; q < width; ++q) {
    const Eigen::Index keep = Eigen::Index{1} << q;
    bool ok = true;
    for (Eigen::Index r = 0; r < u.rows() && ok; ++r) {
      for (Eigen::Index col = 0; col < u.cols() && ok; ++col) {
        if (((r ^ col) & ~keep) != 0 && std::abs(u(r, col)) > 1e-10) ok = false;
      }
    }
    if (ok) return q;
  }
  return std::nullopt;
}

// Replaces the repeated-section window by a multiplexed single-qubit gate when
// its unitary has that form.
std::optional<Circuit> multiplex_repeated_sections(const Circuit& c) {
  const auto window = repeated_section_window(c);
  if (!window) return std::nullopt;
  Circuit middle(c.width());
  for (std::size_t i = window->first; i < window->second; ++i) middle.append(c[i]);
  const ComplexMatrix u = lower_to_unitary(middle);
  const auto target = multiplexed_target(u, c.width());
  if (!target) return std::nullopt;

  std::vector<int> controls;
  for (int q = 0; q < c.width(); ++q) {
    if (q != *target) controls.push_back(q);
  }
  std::vector<ComplexMatrix> blocks;
  for (std::size_t i = 0; i < (std::size_t{1} << controls.size()); ++i) {
    Eigen::Index base = 0;
    for (std::size_t b = 0; b < controls.size(); ++b) {
      if ((i >> b) & 1U) base |= Eigen::Index{1} << controls[b];
    }
    const Eigen::Index flip = Eigen::Index{1} << *target;
    ComplexMatrix m(2, 2);
    m << u(base, base), u(base, base | flip), u(base | flip, base), u(base | flip, base | flip);
    blocks.push_back(m);
  }
  Circuit out = empty_like(c);
  for (std::size_t i = 0; i < window->first; ++i) out.append(c[i]);
  for (auto& g : multiplexed_unitary(blocks, controls, *target)) out.append(std::move(g));
  for (std::size_t i = window->second; i < c.size(); ++i) out.append(c[i]);
  return out;
}

void check_equivalent(const Circuit& candidate, const ComplexMatrix& target, std::string_view what) {
  const double d = phase_aligned_distance(lower_to_unitary(candidate), target).distance;
  if (d > 1e-8) throw SynthesisError(fmt::format("{} candidate misses the input by {:.3g}", what, d));
}

}  // namespace

Circuit transpile(const Circuit& c, OptLevel level) {
  Circuit native = lower_to_native(c);
  if (level == OptLevel::L0) return native;
  Circuit l1 = optimize_native(std::move(native));
  if (level == OptLevel::L1) return l1;

  const DepthReport l1_report = depth_report(l1);
  Circuit best = l1;
  DepthReport best_report = l1_report;
  auto consider = [&](Circuit candidate) {
    const DepthReport r = depth_report(candidate);
    if (r.depth > l1_report.depth || candidate.size() > l1.size()) return;
    if (better(r, candidate.size(), best_report, best.size())) {
      best = std::move(candidate);
      best_report = r;
    }
  };

  const bool small = c.width() <= 12;
  const ComplexMatrix target = small ? lower_to_unitary(c) : ComplexMatrix();

  Circuit blocks = optimize_native(lower(consolidate_two_qubit_blocks(coalesce_diagonals(c)), true), true);
  if (small) check_equivalent(blocks, target, "block-consolidated");
  consider(std::move(blocks));

  if (small) {
    if (auto muxed = multiplex_repeated_sections(c)) {
      Circuit candidate = optimize_native(lower(*muxed, true), true);
      check_equivalent(candidate, target, "multiplexed");
      consider(std::move(candidate));
    }
  }

  if (c.width() >= 1 && c.width() <= 3) {
    Circuit named = empty_like(c);
    named.append(optimize_native(lower(synthesize_unitary(target), true), true));
    check_equivalent(named, target, "resynthesized");
    consider(std::move(named));
  }
  return best;
}

}  // namespace dtqw
