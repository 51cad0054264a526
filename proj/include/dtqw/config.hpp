// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration and its text format.
//
//   # comment
//   [walk]
//   cycle = 4
//   pattern = AABB
//   t_max = 25
//   [coin.A]
//   r = 0.998489
//   [run]
//   shots = 100000
//   seed = 1
//   opt_level = 3
//   dd = none
//   [noise]
//   t1 = 300
//   [output]
//   dir = out
//
// The full grammar, every key and its default are listed in docs/config.md.
#pragma once

#include "dtqw/simulator.hpp"
#include "dtqw/transpiler.hpp"
#include "dtqw/walk.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dtqw {

/// Invalid configuration. `field()` is "section.key" (or just the section).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message);
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class DdMode { None, XY4 };

struct ExperimentConfig {
  int cycle = 4;
  std::map<std::string, CoinParams> coins;
  std::string pattern;
  int t_max = 25;
  double theta = 0.0;
  double phi = 0.0;
  std::uint64_t shots = 100000;
  std::uint64_t seed = 1;
  OptLevel opt_level = OptLevel::L3;
  std::optional<NoiseModel> noise;
  DdMode dd = DdMode::None;
  std::filesystem::path output_dir = "out";
  /// Extra fidelity series drawn on the fidelity plot, in the fidelity CSV format.
  std::vector<std::filesystem::path> overlays;

  /// Throws ConfigError naming the first bad field.
  void validate() const;
  CoinSchedule schedule(int t) const;
  std::vector<std::string> labels() const { return parse_pattern(pattern); }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// The published Parrondo coins and pattern for a cycle: A'A'B'B' on the 3-cycle and
/// AABB otherwise.
ExperimentConfig default_config(int cycle);

/// Keys missing from the text keep the defaults of `default_config(cycle)`.
/// When no [coin.*] section is present the default coins and pattern for the
/// configured cycle apply. Throws ConfigError.
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Reads the [noise] section of a file, or bare keys before any section.
NoiseModel load_noise(const std::filesystem::path& path);

/// Writes every field so that parse_config reproduces `cfg` exactly.
void write_config(std::ostream& os, const ExperimentConfig& cfg);

std::string_view dd_mode_name(DdMode mode);

}  // namespace dtqw
