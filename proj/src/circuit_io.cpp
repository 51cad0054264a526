// SPDX-License-Identifier: Apache-2.0
#include "dtqw/circuit_io.hpp"

#include <fmt/format.h>

#include <charconv>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

namespace dtqw {

CircuitParseError::CircuitParseError(std::size_t line, const std::string& message)
    : std::runtime_error(fmt::format("line {}: {}", line, message)), line_(line) {}

namespace {

std::string real(double x) { return fmt::format("{:.17g}", x); }

int expected_qubits(GateKind kind) {
  switch (kind) {
    case GateKind::ControlledPhase:
    case GateKind::ECR:
      return 2;
    case GateKind::Barrier:
      return -1;
    default:
      return 1;
  }
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T value{};
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

}  // namespace

void write_circuit(std::ostream& os, const Circuit& c, const std::vector<double>& start_times) {
  if (!start_times.empty() && start_times.size() != c.size()) {
    throw std::invalid_argument("start_times must have one entry per gate");
  }
  os << "width=" << c.width();
  if (!c.measured().empty()) {
    os << " measure=";
    for (std::size_t i = 0; i < c.measured().size(); ++i) {
      os << (i ? "," : "") << c.measured()[i];
    }
  }
  os << " name=" << c.name() << '\n';

  // Section markers are emitted in gate-index order; ends before begins at the
  // same index so adjacent sections do not nest by accident.
  std::vector<std::vector<std::string>> begins(c.size() + 1), ends(c.size() + 1);
  for (const auto& s : c.sections()) {
    begins[s.begin].push_back(s.label);
    ends[s.end].insert(ends[s.end].begin(), s.label);
  }
  for (std::size_t i = 0; i <= c.size(); ++i) {
    for (const auto& label : ends[i]) os << "#end " << label << '\n';
    for (const auto& label : begins[i]) os << "#begin " << label << '\n';
    if (i == c.size()) break;
    const Gate& g = c[i];
    os << gate_kind_name(g.kind());
    for (int q : g.qubits()) os << ' ' << q;
    for (double p : g.params()) os << ' ' << real(p);
    if (g.kind() == GateKind::Unitary2x2) {
      for (Eigen::Index r = 0; r < 2; ++r) {
        for (Eigen::Index col = 0; col < 2; ++col) {
          os << ' ' << real(g.payload()(r, col).real()) << ' ' << real(g.payload()(r, col).imag());
        }
      }
    }
    if (!start_times.empty()) os << " @t=" << real(start_times[i]);
    os << '\n';
  }
}

std::string circuit_to_text(const Circuit& c, const std::vector<double>& start_times) {
  std::ostringstream os;
  write_circuit(os, c, start_times);
  return os.str();
}

CircuitText read_circuit(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  std::optional<Circuit> circuit;
  std::vector<double> times;
  std::size_t timed = 0;
  std::vector<std::pair<std::string, std::size_t>> open;
  std::vector<Section> sections;

  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    line = line.substr(first);

    if (!circuit) {
      // Header: width=K [measure=a,b] name=<rest of line>
      std::string name;
      if (auto pos = line.find("name="); pos != std::string::npos) {
        name = line.substr(pos + 5);
        line = line.substr(0, pos);
      }
      std::optional<int> width;
      std::vector<int> measured;
      for (const auto& tok : split_ws(line)) {
        if (tok.rfind("width=", 0) == 0) {
          width = parse_number<int>(std::string_view(tok).substr(6));
          if (!width) throw CircuitParseError(lineno, fmt::format("bad width '{}'", tok));
        } else if (tok.rfind("measure=", 0) == 0) {
          std::istringstream list(tok.substr(8));
          for (std::string item; std::getline(list, item, ',');) {
            auto q = parse_number<int>(item);
            if (!q) throw CircuitParseError(lineno, fmt::format("bad measured qubit '{}'", item));
            measured.push_back(*q);
          }
        } else {
          throw CircuitParseError(lineno, fmt::format("unknown header field '{}'", tok));
        }
      }
      if (!width) throw CircuitParseError(lineno, "header must start with width=K");
      try {
        circuit.emplace(*width, name);
        circuit->set_measured(std::move(measured));
      } catch (const std::invalid_argument& e) {
        throw CircuitParseError(lineno, e.what());
      }
      continue;
    }

    if (line[0] == '#') {
      const auto toks = split_ws(line.substr(1));
      if (toks.size() == 2 && toks[0] == "begin") {
        open.emplace_back(toks[1], circuit->size());
      } else if (toks.size() == 2 && toks[0] == "end") {
        if (open.empty() || open.back().first != toks[1]) {
          throw CircuitParseError(lineno, fmt::format("unmatched '#end {}'", toks[1]));
        }
        sections.push_back({toks[1], open.back().second, circuit->size()});
        open.pop_back();
      }
      continue;
    }

    auto toks = split_ws(line);
    std::optional<double> start;
    if (toks.back().rfind("@t=", 0) == 0) {
      start = parse_number<double>(std::string_view(toks.back()).substr(3));
      if (!start) throw CircuitParseError(lineno, fmt::format("bad timing '{}'", toks.back()));
      toks.pop_back();
    }
    const auto kind = gate_kind_from_name(toks[0]);
    if (!kind) throw CircuitParseError(lineno, fmt::format("unknown gate '{}'", toks[0]));
    const std::size_t nq = expected_qubits(*kind) < 0 ? toks.size() - 1
                                                      : static_cast<std::size_t>(expected_qubits(*kind));
    if (toks.size() < 1 + nq) throw CircuitParseError(lineno, fmt::format("{} needs {} qubit(s)", toks[0], nq));
    std::vector<int> qubits;
    for (std::size_t i = 1; i <= nq; ++i) {
      auto q = parse_number<int>(toks[i]);
      if (!q) throw CircuitParseError(lineno, fmt::format("bad qubit index '{}'", toks[i]));
      qubits.push_back(*q);
    }
    std::vector<double> params;
    for (std::size_t i = 1 + nq; i < toks.size(); ++i) {
      auto p = parse_number<double>(toks[i]);
      if (!p) throw CircuitParseError(lineno, fmt::format("bad number '{}'", toks[i]));
      params.push_back(*p);
    }
    try {
      if (*kind == GateKind::Unitary2x2) {
        if (params.size() != 8) throw std::invalid_argument("U2X2 needs 8 reals");
        ComplexMatrix m(2, 2);
        m << Complex(params[0], params[1]), Complex(params[2], params[3]),
            Complex(params[4], params[5]), Complex(params[6], params[7]);
        circuit->append(Gate::unitary(qubits[0], m));
      } else {
        circuit->append(Gate(*kind, std::move(qubits), std::move(params)));
      }
    } catch (const std::invalid_argument& e) {
      throw CircuitParseError(lineno, e.what());
    }
    if (start) {
      ++timed;
      times.push_back(*start);
    } else {
      times.push_back(0.0);
    }
  }
  if (!circuit) throw CircuitParseError(lineno, "missing header line");
  if (!open.empty()) throw CircuitParseError(lineno, fmt::format("section '{}' not closed", open.back().first));
  for (auto& s : sections) circuit->add_section(std::move(s));
  if (timed != circuit->size() || timed == 0) times.clear();
  return {std::move(*circuit), std::move(times)};
}

CircuitText circuit_from_text(const std::string& text) {
  std::istringstream is(text);
  return read_circuit(is);
}

}  // namespace dtqw
