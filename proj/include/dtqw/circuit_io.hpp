// SPDX-License-Identifier: Apache-2.0
//
// Line-oriented circuit text format.
//
//   width=3 measure=0,1 name=walk4
//   #begin qft
//   H 1
//   CP 0 1 1.5707963267948966
//   #end qft
//   U2X2 2 re00 im00 re01 im01 re10 im10 re11 im11
//   RZ 0 0.5 @t=12
//   BARRIER 0 1 2
//
// Each gate line is `KIND qubits... params...`; the number of qubits is fixed
// by the kind except for BARRIER, which lists only qubits. Reals are written
// with 17 significant digits so a dump parses back to an identical circuit.
// `@t=<start>` optionally carries a scheduled start time. Lines starting with
// `#` other than section markers are comments.
#pragma once

#include "dtqw/circuit.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace dtqw {

class CircuitParseError : public std::runtime_error {
 public:
  CircuitParseError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct CircuitText {
  Circuit circuit;
  /// One entry per gate when every gate line carried `@t=`, otherwise empty.
  std::vector<double> start_times;
};

/// Writes `c`; when `start_times` is non-empty it must have one entry per gate.
void write_circuit(std::ostream& os, const Circuit& c, const std::vector<double>& start_times = {});
std::string circuit_to_text(const Circuit& c, const std::vector<double>& start_times = {});

CircuitText read_circuit(std::istream& is);
CircuitText circuit_from_text(const std::string& text);

}  // namespace dtqw
