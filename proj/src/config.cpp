// SPDX-License-Identifier: Apache-2.0
#include "dtqw/config.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace dtqw {

namespace {

struct Entry {
  std::string section;
  std::string key;
  std::string value;
  std::size_t line;
};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<Entry> read_entries(std::istream& is) {
  std::vector<Entry> entries;
  std::set<std::pair<std::string, std::string>> seen;
  std::string section, raw;
  std::size_t line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const std::string text = trim(raw);
    if (text.empty() || text[0] == '#' || text[0] == ';') continue;
    if (text.front() == '[') {
      if (text.back() != ']' || text.size() < 3) {
        throw ConfigError("line " + std::to_string(line), fmt::format("malformed section header '{}'", text));
      }
      section = trim(std::string_view(text).substr(1, text.size() - 2));
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line), fmt::format("expected key = value, got '{}'", text));
    }
    Entry e{section, trim(std::string_view(text).substr(0, eq)), trim(std::string_view(text).substr(eq + 1)), line};
    const std::string field = section.empty() ? e.key : section + "." + e.key;
    if (e.key.empty()) throw ConfigError("line " + std::to_string(line), "empty key");
    if (!seen.insert({section, e.key}).second) throw ConfigError(field, "given more than once");
    entries.push_back(std::move(e));
  }
  return entries;
}

std::string field_of(const Entry& e) { return e.section.empty() ? e.key : e.section + "." + e.key; }

double to_double(const Entry& e) {
  try {
    std::size_t used = 0;
    const double v = std::stod(e.value, &used);
    if (used == e.value.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(field_of(e), fmt::format("'{}' is not a number", e.value));
}

template <typename Int>
Int to_integer(const Entry& e) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (ec != std::errc() || ptr != e.value.data() + e.value.size()) {
    throw ConfigError(field_of(e), fmt::format("'{}' is not a non-negative integer", e.value));
  }
  return v;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (auto t = trim(item); !t.empty()) out.push_back(t);
  }
  return out;
}

void apply_noise_key(NoiseModel& nm, const Entry& e) {
  static const std::map<std::string, double NoiseModel::*> keys = {
      {"p1", &NoiseModel::p1},         {"p2", &NoiseModel::p2},
      {"t1", &NoiseModel::t1},         {"t2", &NoiseModel::t2},
      {"dur_1q", &NoiseModel::dur_1q}, {"dur_2q", &NoiseModel::dur_2q},
      {"dur_idle_unit", &NoiseModel::dur_idle_unit}, {"readout_flip", &NoiseModel::readout_flip}};
  const auto it = keys.find(e.key);
  if (it == keys.end()) throw ConfigError(field_of(e), "unknown key");
  nm.*(it->second) = to_double(e);
}

std::string g17(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

ConfigError::ConfigError(std::string field, const std::string& message)
    : std::runtime_error(fmt::format("{}: {}", field, message)), field_(std::move(field)) {}

std::string_view dd_mode_name(DdMode mode) { return mode == DdMode::XY4 ? "xy4" : "none"; }

ExperimentConfig default_config(int cycle) {
  ExperimentConfig cfg;
  cfg.cycle = cycle;
  if (cycle == 3) {
    cfg.coins = {{"A'", CoinParams(0.264734)}, {"B'", CoinParams(0.801571)}};
    cfg.pattern = "A'A'B'B'";
  } else {
    cfg.coins = {{"A", CoinParams(0.998489)}, {"B", CoinParams(0.119545)}};
    cfg.pattern = "AABB";
  }
  return cfg;
}

void ExperimentConfig::validate() const {
  if (cycle != 3 && cycle != 4 && cycle != 8) throw ConfigError("walk.cycle", fmt::format("{} is not 3, 4 or 8", cycle));
  if (t_max < 1) throw ConfigError("walk.t_max", fmt::format("{} must be at least 1", t_max));
  if (!(theta >= 0.0 && theta <= kPi)) throw ConfigError("walk.theta", "must lie in [0, pi]");
  if (!(phi >= 0.0 && phi < 2.0 * kPi)) throw ConfigError("walk.phi", "must lie in [0, 2pi)");
  std::vector<std::string> parsed;
  try {
    parsed = labels();
  } catch (const std::exception& e) {
    throw ConfigError("walk.pattern", e.what());
  }
  if (parsed.empty()) throw ConfigError("walk.pattern", "is empty");
  for (const auto& label : parsed) {
    if (!coins.contains(label)) throw ConfigError("walk.pattern", fmt::format("label {} has no [coin.{}] section", label, label));
  }
  if (noise) {
    try {
      noise->validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("noise", e.what());
    }
  }
  if (output_dir.empty()) throw ConfigError("output.dir", "is empty");
}

CoinSchedule ExperimentConfig::schedule(int t) const {
  return parrondo_schedule(pattern, coins, static_cast<std::size_t>(t));
}

ExperimentConfig parse_config(std::istream& is) {
  const std::vector<Entry> entries = read_entries(is);
  int cycle = 4;
  for (const auto& e : entries) {
    if (e.section == "walk" && e.key == "cycle") cycle = to_integer<int>(e);
  }
  ExperimentConfig cfg = default_config(cycle);
  const bool has_coins = std::any_of(entries.begin(), entries.end(),
                                     [](const Entry& e) { return e.section.rfind("coin.", 0) == 0; });
  if (has_coins) cfg.coins.clear();

  std::map<std::string, std::array<double, 3>> coin_values;
  NoiseModel noise;
  bool noise_enabled = std::any_of(entries.begin(), entries.end(), [](const Entry& e) { return e.section == "noise"; });
  for (const auto& e : entries) {
    if (e.section == "walk") {
      if (e.key == "cycle") continue;
      if (e.key == "pattern") cfg.pattern = e.value;
      else if (e.key == "t_max") cfg.t_max = to_integer<int>(e);
      else if (e.key == "theta") cfg.theta = to_double(e);
      else if (e.key == "phi") cfg.phi = to_double(e);
      else throw ConfigError(field_of(e), "unknown key");
    } else if (e.section.rfind("coin.", 0) == 0) {
      const std::string label = e.section.substr(5);
      auto [it, inserted] = coin_values.try_emplace(label, std::array<double, 3>{-1.0, 0.0, 0.0});
      if (e.key == "r") it->second[0] = to_double(e);
      else if (e.key == "a") it->second[1] = to_double(e);
      else if (e.key == "b") it->second[2] = to_double(e);
      else throw ConfigError(field_of(e), "unknown key");
    } else if (e.section == "run") {
      if (e.key == "shots") cfg.shots = to_integer<std::uint64_t>(e);
      else if (e.key == "seed") cfg.seed = to_integer<std::uint64_t>(e);
      else if (e.key == "opt_level") {
        const auto level = opt_level_from_name(e.value);
        if (!level) throw ConfigError(field_of(e), fmt::format("'{}' is not 0, 1 or 3", e.value));
        cfg.opt_level = *level;
      } else if (e.key == "dd") {
        if (e.value == "none") cfg.dd = DdMode::None;
        else if (e.value == "xy4") cfg.dd = DdMode::XY4;
        else throw ConfigError(field_of(e), fmt::format("'{}' is not none or xy4", e.value));
      } else {
        throw ConfigError(field_of(e), "unknown key");
      }
    } else if (e.section == "noise") {
      if (e.key == "enabled") {
        if (e.value != "true" && e.value != "false") throw ConfigError(field_of(e), "must be true or false");
        noise_enabled = e.value == "true";
        continue;
      }
      apply_noise_key(noise, e);
    } else if (e.section == "output") {
      if (e.key == "dir") cfg.output_dir = e.value;
      else if (e.key == "overlays") {
        cfg.overlays.clear();
        for (const auto& p : split_list(e.value)) cfg.overlays.emplace_back(p);
      } else {
        throw ConfigError(field_of(e), "unknown key");
      }
    } else {
      if (e.section.empty()) throw ConfigError(e.key, "key outside any section");
      throw ConfigError(e.section, "unknown section");
    }
  }
  if (noise_enabled) cfg.noise = noise;
  for (const auto& [label, v] : coin_values) {
    if (v[0] < 0.0) throw ConfigError("coin." + label + ".r", "missing");
    try {
      cfg.coins.insert_or_assign(label, CoinParams(v[0], v[1], v[2]));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("coin." + label, e.what());
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", fmt::format("cannot open {}", path.string()));
  return parse_config(in);
}

NoiseModel load_noise(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("noise", fmt::format("cannot open {}", path.string()));
  NoiseModel nm;
  for (const auto& e : read_entries(in)) {
    if (e.section.empty() || e.section == "noise") apply_noise_key(nm, e);
  }
  try {
    nm.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("noise", e.what());
  }
  return nm;
}

void write_config(std::ostream& os, const ExperimentConfig& cfg) {
  os << "[walk]\n"
     << "cycle = " << cfg.cycle << '\n'
     << "pattern = " << cfg.pattern << '\n'
     << "t_max = " << cfg.t_max << '\n'
     << "theta = " << g17(cfg.theta) << '\n'
     << "phi = " << g17(cfg.phi) << '\n';
  for (const auto& [label, c] : cfg.coins) {
    os << "\n[coin." << label << "]\n"
       << "r = " << g17(c.r()) << '\n'
       << "a = " << g17(c.a()) << '\n'
       << "b = " << g17(c.b()) << '\n';
  }
  os << "\n[run]\n"
     << "shots = " << cfg.shots << '\n'
     << "seed = " << cfg.seed << '\n'
     << "opt_level = " << opt_level_name(cfg.opt_level) << '\n'
     << "dd = " << dd_mode_name(cfg.dd) << '\n';
  if (cfg.noise) {
    const NoiseModel& nm = *cfg.noise;
    os << "\n[noise]\n"
       << "p1 = " << g17(nm.p1) << '\n'
       << "p2 = " << g17(nm.p2) << '\n'
       << "t1 = " << g17(nm.t1) << '\n'
       << "t2 = " << g17(nm.t2) << '\n'
       << "dur_1q = " << g17(nm.dur_1q) << '\n'
       << "dur_2q = " << g17(nm.dur_2q) << '\n'
       << "dur_idle_unit = " << g17(nm.dur_idle_unit) << '\n'
       << "readout_flip = " << g17(nm.readout_flip) << '\n';
  }
  os << "\n[output]\n"
     << "dir = " << cfg.output_dir.string() << '\n';
  if (!cfg.overlays.empty()) {
    os << "overlays = ";
    for (std::size_t i = 0; i < cfg.overlays.size(); ++i) os << (i ? "," : "") << cfg.overlays[i].string();
    os << '\n';
  }
}

}  // namespace dtqw
