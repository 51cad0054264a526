// SPDX-License-Identifier: Apache-2.0
#include "dtqw/walk.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dtqw {

CoinParams::CoinParams(double r, double a, double b) : r_(r), a_(a), b_(b) {
  if (!(r >= 0.0 && r <= 1.0)) {
    throw std::invalid_argument(fmt::format("coin parameter r={} outside [0, 1]", r));
  }
  for (double angle : {a, b}) {
    if (!(angle >= 0.0 && angle < 2.0 * kPi)) {
      throw std::invalid_argument(fmt::format("coin angle {} outside [0, 2π)", angle));
    }
  }
}

StateVector::StateVector(ComplexVector amplitudes, double tol) : amps_(std::move(amplitudes)) {
  if (amps_.size() == 0) throw std::invalid_argument("state vector must be non-empty");
  const double norm = amps_.norm();
  if (std::abs(norm - 1.0) >= tol) {
    throw std::invalid_argument(fmt::format("state vector norm {} is not 1", norm));
  }
}

StateVector StateVector::basis(std::size_t dim, std::size_t index) {
  if (index >= dim) throw std::invalid_argument("basis index out of range");
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return StateVector(std::move(v));
}

CoinSchedule::CoinSchedule(std::vector<std::string> pattern,
                           std::map<std::string, CoinParams> coins, std::size_t length)
    : pattern_(std::move(pattern)), coins_(std::move(coins)), length_(length) {
  if (pattern_.empty() && length_ > 0) {
    throw std::invalid_argument("a non-empty schedule needs a non-empty pattern");
  }
  for (const auto& label : pattern_) {
    if (!coins_.contains(label)) {
      throw std::invalid_argument(fmt::format("pattern label '{}' has no bound coin", label));
    }
  }
}

const std::string& CoinSchedule::label_at(std::size_t step) const {
  if (pattern_.empty()) throw std::out_of_range("empty coin pattern");
  return pattern_[step % pattern_.size()];
}

const CoinParams& CoinSchedule::coin_at(std::size_t step) const {
  return coins_.at(label_at(step));
}

std::vector<std::string> CoinSchedule::labels() const {
  std::vector<std::string> out;
  out.reserve(length_);
  for (std::size_t i = 0; i < length_; ++i) out.push_back(label_at(i));
  return out;
}

CoinSchedule CoinSchedule::with_length(std::size_t length) const {
  return CoinSchedule(pattern_, coins_, length);
}

ComplexMatrix coin_operator(const CoinParams& p) {
  const double c = std::sqrt(p.r());
  const double s = std::sqrt(1.0 - p.r());
  ComplexMatrix m(2, 2);
  m << c, s * std::polar(1.0, p.a()), s * std::polar(1.0, p.b()), -c * std::polar(1.0, p.a() + p.b());
  return m;
}

namespace {

void check_cycle(int cycle) {
  if (cycle < 3) throw std::invalid_argument(fmt::format("cycle size {} < 3", cycle));
}

}  // namespace

std::size_t position_slots(int cycle, Embedding embedding) {
  check_cycle(cycle);
  const auto n = static_cast<std::size_t>(cycle);
  if (embedding == Embedding::Exact) return n;
  std::size_t slots = 1;
  while (slots < n) slots <<= 1;
  return slots;
}

std::size_t walk_dimension(int cycle, Embedding embedding) {
  return 2 * position_slots(cycle, embedding);
}

ComplexMatrix shift_operator(int cycle, Embedding embedding) {
  const auto slots = static_cast<Eigen::Index>(position_slots(cycle, embedding));
  ComplexMatrix s = ComplexMatrix::Zero(2 * slots, 2 * slots);
  for (Eigen::Index coin = 0; coin < 2; ++coin) {
    for (Eigen::Index j = 0; j < slots; ++j) {
      Eigen::Index target = j;
      if (j < cycle) target = (j + 2 * coin - 1 + cycle) % cycle;
      s(coin * slots + target, coin * slots + j) = 1.0;
    }
  }
  return s;
}

ComplexMatrix step_operator(int cycle, Embedding embedding, const CoinParams& p) {
  const auto slots = static_cast<Eigen::Index>(position_slots(cycle, embedding));
  return shift_operator(cycle, embedding) *
         kron(coin_operator(p), ComplexMatrix::Identity(slots, slots));
}

StateVector initial_state(double theta, double phi, int cycle, Embedding embedding) {
  if (!(theta >= 0.0 && theta <= kPi)) {
    throw std::invalid_argument(fmt::format("theta={} outside [0, π]", theta));
  }
  if (!(phi >= 0.0 && phi < 2.0 * kPi)) {
    throw std::invalid_argument(fmt::format("phi={} outside [0, 2π)", phi));
  }
  const auto slots = static_cast<Eigen::Index>(position_slots(cycle, embedding));
  ComplexVector v = ComplexVector::Zero(2 * slots);
  v(0) = std::cos(theta / 2.0);
  v(slots) = std::polar(std::sin(theta / 2.0), phi);
  return StateVector(std::move(v));
}

std::vector<StateVector> evolve(const StateVector& state, const CoinSchedule& schedule, int cycle,
                                Embedding embedding) {
  const auto dim = walk_dimension(cycle, embedding);
  if (state.dim() != dim) {
    throw std::invalid_argument(
        fmt::format("state dimension {} does not match walk dimension {}", state.dim(), dim));
  }
  std::map<std::string, ComplexMatrix> steps;
  for (const auto& [label, coin] : schedule.coins()) {
    steps.emplace(label, step_operator(cycle, embedding, coin));
  }
  std::vector<StateVector> trajectory;
  trajectory.reserve(schedule.length());
  ComplexVector psi = state.amplitudes();
  for (std::size_t i = 0; i < schedule.length(); ++i) {
    psi = steps.at(schedule.label_at(i)) * psi;
    trajectory.emplace_back(psi);
  }
  return trajectory;
}

double return_probability(const StateVector& state, int cycle, Embedding embedding) {
  const auto slots = position_slots(cycle, embedding);
  if (state.dim() != 2 * slots) throw std::invalid_argument("state dimension mismatch");
  return std::norm(state[0]) + std::norm(state[slots]);
}

ComplexMatrix schedule_operator(const CoinSchedule& schedule, int cycle, Embedding embedding) {
  const auto dim = static_cast<Eigen::Index>(walk_dimension(cycle, embedding));
  ComplexMatrix u = ComplexMatrix::Identity(dim, dim);
  for (std::size_t i = 0; i < schedule.length(); ++i) {
    u = step_operator(cycle, embedding, schedule.coin_at(i)) * u;
  }
  return u;
}

namespace {

void check_period_input(const ComplexMatrix& u, const PeriodOptions& options) {
  if (options.t_max < 1) throw std::invalid_argument("t_max must be >= 1");
  if (!is_unitary(u, options.unitarity_tol)) {
    throw std::invalid_argument(
        fmt::format("period search needs a unitary (defect {})", unitarity_defect(u)));
  }
}

}  // namespace

PeriodResult find_period_power(const ComplexMatrix& u, const PeriodOptions& options) {
  check_period_input(u, options);
  PeriodResult result;
  result.bound = options.t_max;
  result.residual = std::numeric_limits<double>::infinity();
  const auto n = u.rows();
  const ComplexMatrix identity = ComplexMatrix::Identity(n, n);
  ComplexMatrix power = identity;
  for (int t = 1; t <= options.t_max; ++t) {
    power = u * power;
    double gamma = 0.0;
    if (options.mode == PhaseMode::Insensitive) {
      Eigen::Index k = 0;
      power.diagonal().cwiseAbs().maxCoeff(&k);
      gamma = std::arg(power(k, k));
    }
    const double residual = (power - std::polar(1.0, gamma) * identity).norm();
    if (residual < options.tol) {
      result.period = t;
      result.residual = residual;
      result.phase = gamma;
      return result;
    }
    result.residual = std::min(result.residual, residual);
  }
  return result;
}

PeriodResult find_period_eigen(const ComplexMatrix& u, const PeriodOptions& options) {
  check_period_input(u, options);
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(u, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw EigenDecompositionError("eigenvalue iteration did not converge");
  }
  const ComplexVector& lambda = solver.eigenvalues();
  PeriodResult result;
  result.bound = options.t_max;
  result.residual = std::numeric_limits<double>::infinity();
  ComplexVector powered = ComplexVector::Ones(lambda.size());
  for (int t = 1; t <= options.t_max; ++t) {
    powered = powered.cwiseProduct(lambda);
    double gamma = 0.0;
    if (options.mode == PhaseMode::Insensitive) {
      const Complex sum = powered.sum();
      gamma = std::abs(sum) > 0.0 ? std::arg(sum) : 0.0;
    }
    const Complex target = std::polar(1.0, gamma);
    const double residual = (powered.array() - target).abs().maxCoeff();
    if (residual < options.tol) {
      result.period = t;
      result.residual = residual;
      result.phase = gamma;
      return result;
    }
    result.residual = std::min(result.residual, residual);
  }
  return result;
}

std::vector<std::string> parse_pattern(const std::string& pattern) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < pattern.size();) {
    const char c = pattern[i];
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
      ++i;
      continue;
    }
    if (!std::isalpha(static_cast<unsigned char>(c))) {
      throw std::invalid_argument(fmt::format("unexpected character '{}' in pattern", c));
    }
    std::string label(1, c);
    ++i;
    while (i < pattern.size() && pattern[i] == '\'') label.push_back(pattern[i++]);
    labels.push_back(std::move(label));
  }
  return labels;
}

CoinSchedule parrondo_schedule(const std::string& pattern,
                               const std::map<std::string, CoinParams>& coins, std::size_t t) {
  return CoinSchedule(parse_pattern(pattern), coins, t);
}

}  // namespace dtqw
