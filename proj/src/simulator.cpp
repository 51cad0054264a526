// SPDX-License-Identifier: Apache-2.0
#include "dtqw/simulator.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace dtqw {

// ---------------------------------------------------------------------------
// Distribution

double Distribution::total() const {
  double sum = 0.0;
  for (const auto& [k, v] : values) sum += v;
  return sum;
}

std::map<int, double> Distribution::probabilities() const {
  const double sum = total();
  if (!(sum > 0.0)) throw std::invalid_argument("distribution has zero total weight");
  std::map<int, double> p;
  for (const auto& [k, v] : values) p[k] = v / sum;
  return p;
}

void write_distribution_csv(std::ostream& os, const Distribution& d) {
  os << "# shots=" << d.shots << '\n' << "outcome,count_or_prob\n";
  for (const auto& [k, v] : d.values) {
    if (d.sampled()) {
      os << k << ',' << static_cast<std::uint64_t>(std::llround(v)) << '\n';
    } else {
      os << k << ',' << fmt::format("{:.17g}", v) << '\n';
    }
  }
}

Distribution read_distribution_csv(std::istream& is) {
  Distribution d;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line == "outcome,count_or_prob") continue;
    if (line.rfind("# shots=", 0) == 0) {
      d.shots = std::stoull(line.substr(8));
      continue;
    }
    if (line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument(fmt::format("bad CSV row '{}'", line));
    d.values[std::stoi(line.substr(0, comma))] = std::stod(line.substr(comma + 1));
  }
  return d;
}

// ---------------------------------------------------------------------------
// Noise model and density matrices

NoiseModel NoiseModel::none() {
  NoiseModel nm;
  nm.p1 = nm.p2 = 0.0;
  nm.t1 = nm.t2 = std::numeric_limits<double>::infinity();
  nm.readout_flip = 0.0;
  return nm;
}

void NoiseModel::validate() const {
  auto probability = [](const char* name, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(fmt::format("{}={} outside [0, 1]", name, p));
  };
  probability("p1", p1);
  probability("p2", p2);
  probability("readout_flip", readout_flip);
  if (!(t1 > 0.0)) throw std::invalid_argument(fmt::format("t1={} must be positive", t1));
  if (!(t2 > 0.0)) throw std::invalid_argument(fmt::format("t2={} must be positive", t2));
  if (t2 > 2.0 * t1) throw std::invalid_argument(fmt::format("t2={} exceeds 2*t1={}", t2, 2.0 * t1));
  for (auto [name, d] : {std::pair{"dur_1q", dur_1q}, {"dur_2q", dur_2q}, {"dur_idle_unit", dur_idle_unit}}) {
    if (!(d >= 0.0) || std::isinf(d)) throw std::invalid_argument(fmt::format("{}={} must be finite and >= 0", name, d));
  }
}

DensityMatrix::DensityMatrix(ComplexMatrix rho) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols() || rho_.rows() == 0 || !is_power_of_two(static_cast<std::size_t>(rho_.rows()))) {
    throw std::invalid_argument("density matrix must be square with a power-of-two dimension");
  }
  if (std::abs(rho_.trace() - Complex(1.0)) > 1e-9) {
    throw std::invalid_argument(fmt::format("density matrix trace {} is not 1", rho_.trace().real()));
  }
  if ((rho_ - rho_.adjoint()).norm() > 1e-10) throw std::invalid_argument("density matrix is not Hermitian");
  if (min_eigenvalue() < -1e-9) throw std::invalid_argument("density matrix is not positive semidefinite");
}

DensityMatrix DensityMatrix::from_state(const StateVector& psi) {
  return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
}

int DensityMatrix::width() const {
  int w = 0;
  while ((Eigen::Index{1} << w) < rho_.rows()) ++w;
  return w;
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

ComplexMatrix DensityMatrix::reduced(const std::vector<int>& keep) const {
  const int w = width();
  Eigen::Index keep_mask = 0;
  for (int q : keep) {
    if (q < 0 || q >= w) throw std::out_of_range("reduced: qubit out of range");
    keep_mask |= Eigen::Index{1} << q;
  }
  auto compress = [&](Eigen::Index i) {
    Eigen::Index out = 0;
    for (std::size_t b = 0; b < keep.size(); ++b) out |= ((i >> keep[b]) & 1) << b;
    return out;
  };
  const Eigen::Index sub = Eigen::Index{1} << keep.size();
  ComplexMatrix r = ComplexMatrix::Zero(sub, sub);
  for (Eigen::Index i = 0; i < rho_.rows(); ++i) {
    for (Eigen::Index j = 0; j < rho_.cols(); ++j) {
      if ((i & ~keep_mask) == (j & ~keep_mask)) r(compress(i), compress(j)) += rho_(i, j);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Kernels

void apply_matrix_strided(Complex* data, Eigen::Index stride, int n_qubits, const ComplexMatrix& m,
                          const std::vector<int>& qubits) {
  const std::size_t k = qubits.size();
  const std::size_t sub = std::size_t{1} << k;
  if (static_cast<std::size_t>(m.rows()) != sub) throw std::invalid_argument("gate matrix size mismatch");
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  Eigen::Index mask = 0;
  std::array<Eigen::Index, 4> offset{};
  for (std::size_t a = 0; a < sub; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      if ((a >> b) & 1) offset[a] |= Eigen::Index{1} << qubits[b];
    }
  }
  for (int q : qubits) mask |= Eigen::Index{1} << q;
  std::array<Complex, 4> in{};
  for (Eigen::Index base = 0; base < dim; ++base) {
    if (base & mask) continue;
    for (std::size_t a = 0; a < sub; ++a) in[a] = data[(base | offset[a]) * stride];
    for (std::size_t r = 0; r < sub; ++r) {
      Complex acc{};
      for (std::size_t c = 0; c < sub; ++c) acc += m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * in[c];
      data[(base | offset[r]) * stride] = acc;
    }
  }
}

namespace {

int width_of(Eigen::Index dim) {
  if (dim <= 0 || !is_power_of_two(static_cast<std::size_t>(dim))) {
    throw std::invalid_argument("state dimension must be a power of two");
  }
  int w = 0;
  while ((Eigen::Index{1} << w) < dim) ++w;
  return w;
}

void check_qubits(const Gate& g, int width) {
  for (int q : g.qubits()) {
    if (q >= width) throw std::invalid_argument(fmt::format("gate qubit {} outside width {}", q, width));
  }
}

}  // namespace

void apply_gate(ComplexVector& psi, const Gate& g) {
  if (g.is_barrier()) return;
  const int w = width_of(psi.size());
  check_qubits(g, w);
  apply_matrix_strided(psi.data(), 1, w, g.matrix(), g.qubits());
}

StateVector run_exact(const Circuit& c, const StateVector& initial) {
  const auto dim = std::size_t{1} << c.width();
  if (initial.dim() != dim) {
    throw std::invalid_argument(
        fmt::format("initial state has dimension {}, circuit of width {} needs {}", initial.dim(), c.width(), dim));
  }
  ComplexVector psi = initial.amplitudes();
  for (const auto& g : c.gates()) apply_gate(psi, g);
  return StateVector(std::move(psi));
}

namespace {

std::vector<double> marginal(const Eigen::Ref<const Eigen::VectorXd>& probs, const std::vector<int>& measured,
                             int width) {
  for (int q : measured) {
    if (q < 0 || q >= width) throw std::out_of_range(fmt::format("measured qubit {} outside width {}", q, width));
  }
  std::vector<double> out(std::size_t{1} << measured.size(), 0.0);
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    std::size_t k = 0;
    for (std::size_t b = 0; b < measured.size(); ++b) k |= static_cast<std::size_t>((i >> measured[b]) & 1) << b;
    out[k] += probs(i);
  }
  return out;
}

}  // namespace

Distribution measure_positions(const StateVector& state, const std::vector<int>& measured_qubits,
                               std::uint64_t shots, std::uint64_t seed) {
  const int w = width_of(static_cast<Eigen::Index>(state.dim()));
  const Eigen::VectorXd probs = state.amplitudes().cwiseAbs2();
  const std::vector<double> p = marginal(probs, measured_qubits, w);
  Distribution exact;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] > 0.0) exact.values[static_cast<int>(k)] = p[k];
  }
  return shots == 0 ? exact : sample_counts(exact, shots, seed);
}

Distribution sample_counts(const Distribution& exact, std::uint64_t shots, std::uint64_t seed) {
  if (shots == 0) throw std::invalid_argument("sampling needs at least one shot");
  const std::map<int, double> probs = exact.probabilities();
  std::vector<int> outcomes;
  std::vector<double> weights;
  for (const auto& [k, v] : probs) {
    outcomes.push_back(k);
    weights.push_back(v);
  }
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::vector<std::uint64_t> counts(weights.size(), 0);
  for (std::uint64_t s = 0; s < shots; ++s) ++counts[pick(rng)];
  Distribution d;
  d.shots = shots;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] > 0) d.values[outcomes[i]] = static_cast<double>(counts[i]);
  }
  return d;
}

// ---------------------------------------------------------------------------
// Channels

void apply_unitary(ComplexMatrix& rho, const Gate& g) {
  if (g.is_barrier()) return;
  const int w = width_of(rho.rows());
  check_qubits(g, w);
  const ComplexMatrix m = g.matrix();
  const ComplexMatrix mc = m.conjugate();
  // Columns are contiguous (column-major): U acts on each column, then conj(U)
  // on each row gives ρ ↦ U ρ U†.
  for (Eigen::Index col = 0; col < rho.cols(); ++col) {
    apply_matrix_strided(rho.data() + col * rho.rows(), 1, w, m, g.qubits());
  }
  for (Eigen::Index row = 0; row < rho.rows(); ++row) {
    apply_matrix_strided(rho.data() + row, rho.rows(), w, mc, g.qubits());
  }
}

void apply_depolarizing(ComplexMatrix& rho, const std::vector<int>& qubits, double p) {
  if (p == 0.0 || qubits.empty()) return;
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("depolarizing probability outside [0, 1]");
  const Eigen::Index dim = rho.rows();
  Eigen::Index mask = 0;
  for (int q : qubits) mask |= Eigen::Index{1} << q;
  const std::size_t sub = std::size_t{1} << qubits.size();
  std::vector<Eigen::Index> offsets(sub, 0);
  for (std::size_t a = 0; a < sub; ++a) {
    for (std::size_t b = 0; b < qubits.size(); ++b) {
      if ((a >> b) & 1) offsets[a] |= Eigen::Index{1} << qubits[b];
    }
  }
  const double share = p / static_cast<double>(sub);
  ComplexMatrix out = (1.0 - p) * rho;
  // Tr_Q(ρ) restricted to the complement indices (i_rest, j_rest), spread over the diagonal of Q.
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (i & mask) continue;
    for (Eigen::Index j = 0; j < dim; ++j) {
      if (j & mask) continue;
      Complex partial{};
      for (auto off : offsets) partial += rho(i | off, j | off);
      for (auto off : offsets) out(i | off, j | off) += share * partial;
    }
  }
  rho = std::move(out);
}

void apply_thermal_relaxation(ComplexMatrix& rho, int qubit, double tau, double t1, double t2) {
  if (tau <= 0.0) return;
  const double keep = std::isinf(t1) ? 1.0 : std::exp(-tau / t1);
  const double coherence = std::isinf(t2) ? 1.0 : std::exp(-tau / t2);
  if (keep == 1.0 && coherence == 1.0) return;
  const Eigen::Index bit = Eigen::Index{1} << qubit;
  const Eigen::Index dim = rho.rows();
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (i & bit) continue;
    for (Eigen::Index j = 0; j < dim; ++j) {
      if (j & bit) continue;
      const Complex r11 = rho(i | bit, j | bit);
      rho(i, j) += (1.0 - keep) * r11;
      rho(i | bit, j | bit) = keep * r11;
      rho(i, j | bit) *= coherence;
      rho(i | bit, j) *= coherence;
    }
  }
}

DensityMatrix run_noisy(const Circuit& c, const DensityMatrix& initial, const NoiseModel& nm) {
  nm.validate();
  return run_noisy(schedule(c, nm.durations()), initial, nm);
}

DensityMatrix run_noisy(const ScheduledCircuit& sc, const DensityMatrix& initial, const NoiseModel& nm) {
  nm.validate();
  const Circuit& c = sc.circuit;
  if (c.width() > 6) throw std::invalid_argument(fmt::format("density-matrix width {} > 6", c.width()));
  if (initial.dim() != (std::size_t{1} << c.width())) {
    throw std::invalid_argument("initial density matrix does not match the circuit width");
  }
  if (sc.start_times.size() != c.size() || sc.durations.size() != c.size()) {
    throw std::invalid_argument("scheduled circuit needs one start time and duration per gate");
  }
  ComplexMatrix rho = initial.matrix();
  std::vector<double> last_end(static_cast<std::size_t>(c.width()), 0.0);
  std::vector<bool> started(static_cast<std::size_t>(c.width()), false);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Gate& g = c[i];
    if (g.is_barrier() || g.kind() == GateKind::ID) continue;
    const double start = sc.start_times[i];
    for (int q : g.qubits()) {
      const auto qi = static_cast<std::size_t>(q);
      if (started[qi]) {
        const double gap = start - last_end[qi];
        if (gap < -1e-9) {
          throw std::invalid_argument(fmt::format("gate {} overlaps the previous gate on qubit {}", i, q));
        }
        apply_thermal_relaxation(rho, q, gap, nm.t1, nm.t2);
      }
      started[qi] = true;
      last_end[qi] = start + sc.durations[i];
    }
    apply_unitary(rho, g);
    if (!is_virtual(g)) apply_depolarizing(rho, g.qubits(), g.is_two_qubit() ? nm.p2 : nm.p1);
  }
  return DensityMatrix(std::move(rho));
}

Distribution readout_distribution(const DensityMatrix& rho, const std::vector<int>& measured_qubits,
                                  const NoiseModel& nm) {
  const Eigen::VectorXd diag = rho.matrix().diagonal().real();
  std::vector<double> p = marginal(diag, measured_qubits, rho.width());
  const double f = nm.readout_flip;
  if (f > 0.0) {
    for (std::size_t b = 0; b < measured_qubits.size(); ++b) {
      std::vector<double> next(p.size());
      for (std::size_t k = 0; k < p.size(); ++k) next[k] = (1.0 - f) * p[k] + f * p[k ^ (std::size_t{1} << b)];
      p = std::move(next);
    }
  }
  Distribution d;
  for (std::size_t k = 0; k < p.size(); ++k) d.values[static_cast<int>(k)] = std::max(0.0, p[k]);
  return d;
}

}  // namespace dtqw
