// SPDX-License-Identifier: Apache-2.0
#include "dtqw/metrics.hpp"

#include <fmt/core.h>

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace dtqw {

namespace {

constexpr double kNormTolerance = 1e-6;

void check_probabilities(const std::map<int, double>& p) {
  double sum = 0.0;
  for (const auto& [k, v] : p) {
    if (!(v >= 0.0)) throw std::invalid_argument(fmt::format("outcome {} has probability {}", k, v));
    sum += v;
  }
  if (std::abs(sum - 1.0) > kNormTolerance) {
    throw std::invalid_argument(fmt::format("probabilities sum to {}, not 1", sum));
  }
}

// Σ (√p_k − √q_k)² over the union of outcomes; missing keys are zero.
double squared_root_difference(const std::map<int, double>& p, const std::map<int, double>& q) {
  check_probabilities(p);
  check_probabilities(q);
  // Walk both key sets in order so that swapping p and q gives identical sums.
  double sum = 0.0;
  auto a = p.begin(), b = q.begin();
  while (a != p.end() || b != q.end()) {
    double pk = 0.0, qk = 0.0;
    if (b == q.end() || (a != p.end() && a->first < b->first)) {
      pk = (a++)->second;
    } else if (a == p.end() || b->first < a->first) {
      qk = (b++)->second;
    } else {
      pk = (a++)->second;
      qk = (b++)->second;
    }
    const double d = std::sqrt(pk) - std::sqrt(qk);
    sum += d * d;
  }
  return sum;
}

}  // namespace

std::map<int, double> normalized(const Distribution& d) {
  if (!d.sampled()) {
    check_probabilities(d.values);
    return d.values;
  }
  const double total = d.total();
  if (std::abs(total - static_cast<double>(d.shots)) > 0.5) {
    throw std::invalid_argument(fmt::format("counts sum to {} but shots = {}", total, d.shots));
  }
  std::map<int, double> p;
  for (const auto& [k, v] : d.values) p[k] = v / static_cast<double>(d.shots);
  return p;
}

double hellinger_distance(const std::map<int, double>& p, const std::map<int, double>& q) {
  return std::min(1.0, std::sqrt(0.5 * squared_root_difference(p, q)));
}

double hellinger_distance(const Distribution& p, const Distribution& q) {
  return hellinger_distance(normalized(p), normalized(q));
}

double hellinger_fidelity(const std::map<int, double>& p, const std::map<int, double>& q) {
  const double h = hellinger_distance(p, q);
  const double bc = 1.0 - h * h;
  return bc * bc;
}

double hellinger_fidelity(const Distribution& p, const Distribution& q) {
  return hellinger_fidelity(normalized(p), normalized(q));
}

double state_distance_phase_aligned(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument(fmt::format("state dimensions differ: {} vs {}", a.dim(), b.dim()));
  }
  const double overlap = std::abs(a.amplitudes().dot(b.amplitudes()));
  return std::sqrt(std::max(0.0, 2.0 - 2.0 * overlap));
}

Similarity classify_fidelity(double fidelity) {
  if (fidelity > 0.95) return Similarity::AlmostAlike;
  if (fidelity > 0.5) return Similarity::Similar;
  return Similarity::Distinct;
}

std::string_view similarity_name(Similarity s) {
  switch (s) {
    case Similarity::AlmostAlike:
      return "almost alike";
    case Similarity::Similar:
      return "similar";
    case Similarity::Distinct:
      break;
  }
  return "distinct";
}

void FidelitySeries::validate() const {
  if (steps.size() != values.size()) {
    throw std::invalid_argument(fmt::format("{} steps but {} fidelity values", steps.size(), values.size()));
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0 && values[i] <= 1.0)) {
      throw std::invalid_argument(fmt::format("fidelity {} at t={} is outside [0, 1]", values[i], steps[i]));
    }
  }
}

void write_fidelity_csv(std::ostream& os, const FidelitySeries& s) {
  s.validate();
  os << "# compare=" << s.labels.first << ':' << s.labels.second << '\n' << "t,fidelity\n";
  for (std::size_t i = 0; i < s.size(); ++i) os << s.steps[i] << ',' << fmt::format("{:.17g}", s.values[i]) << '\n';
}

FidelitySeries read_fidelity_csv(std::istream& is) {
  FidelitySeries s;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line == "t,fidelity") continue;
    if (line.rfind("# compare=", 0) == 0) {
      const std::string body = line.substr(10);
      const auto colon = body.find(':');
      if (colon == std::string::npos) throw std::invalid_argument(fmt::format("bad compare header '{}'", line));
      s.labels = {body.substr(0, colon), body.substr(colon + 1)};
      continue;
    }
    if (line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument(fmt::format("bad CSV row '{}'", line));
    s.steps.push_back(std::stoi(line.substr(0, comma)));
    s.values.push_back(std::stod(line.substr(comma + 1)));
  }
  s.validate();
  return s;
}

}  // namespace dtqw
