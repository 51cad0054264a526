// SPDX-License-Identifier: Apache-2.0
//
// dtqw: run walk experiments, scan periods, report depths and dump circuits.
// Exit status is 0 on success, 2 for bad arguments or configuration and 1 for
// failures while running.

#include "dtqw/circuit_io.hpp"
#include "dtqw/experiment.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>

#include <fstream>
#include <iostream>
#include <optional>

using namespace dtqw;

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 1;

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> shots;
  std::string noise;
  std::string dd;
  std::string opt;
  std::string out;
  std::optional<int> t_max;
};

void add_common(CLI::App* cmd, CommonOptions& o, std::vector<std::string> levels = {"0", "1", "3"}) {
  cmd->add_option("--config", o.config, "Experiment config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--shots", o.shots, "Shots per step (0 = exact only)");
  cmd->add_option("--noise", o.noise, "Noise model file ([noise] keys)")->check(CLI::ExistingFile);
  cmd->add_option("--dd", o.dd, "Dynamical decoupling")->check(CLI::IsMember({"none", "xy4"}));
  cmd->add_option("--opt", o.opt, "Optimization level")->check(CLI::IsMember(levels));
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--t-max", o.t_max, "Largest time step")->check(CLI::PositiveNumber);
}

ExperimentConfig resolve(const CommonOptions& o) {
  ExperimentConfig cfg = o.config.empty() ? default_config(4) : load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.shots) cfg.shots = *o.shots;
  if (!o.noise.empty()) cfg.noise = load_noise(o.noise);
  if (!o.dd.empty()) cfg.dd = o.dd == "xy4" ? DdMode::XY4 : DdMode::None;
  if (!o.opt.empty()) cfg.opt_level = *opt_level_from_name(o.opt);
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (o.t_max) cfg.t_max = *o.t_max;
  cfg.validate();
  return cfg;
}

// Writes `content` to dir/name, or to stdout when dir is empty.
void emit(const std::string& dir, const std::string& name, const std::string& content) {
  if (dir.empty()) {
    std::cout << content;
    return;
  }
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!(out << content)) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  std::cerr << "wrote " << path.string() << '\n';
}

int cmd_run(const CommonOptions& o) {
  const ExperimentConfig cfg = resolve(o);
  const ExperimentResult r = run_experiment(cfg);
  for (const auto& s : r.steps) {
    std::string line = fmt::format("t={:>3}  exact={:.6f}", s.t, s.exact_p0);
    if (s.sampled_fidelity) line += fmt::format("  sampled={:.6f} (F={:.5f})", *s.sampled_p0, *s.sampled_fidelity);
    if (s.noisy_fidelity) line += fmt::format("  noisy={:.6f} (F={:.5f})", *s.noisy_p0, *s.noisy_fidelity);
    std::cout << line << '\n';
  }
  for (const auto& f : r.files) std::cerr << "wrote " << f.string() << '\n';
  return 0;
}

struct PeriodOptionsCli {
  int cycle = 4;
  std::optional<double> r;
  double a = 0.0;
  double b = 0.0;
  int t_max = 1000;
  double tol = 1e-8;
  std::string out;
};

int cmd_period_scan(const PeriodOptionsCli& o) {
  if (o.cycle < 3) throw ConfigError("cycle", "must be at least 3");
  const CoinParams coin = [&] {
    try {
      return CoinParams(o.r.value_or(0.5), o.a, o.b);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("coin", e.what());
    }
  }();
  const PeriodScan scan = period_scan(o.cycle, coin, o.t_max, o.tol);
  auto show = [](const PeriodResult& r) {
    return r.period ? fmt::format("{} (residual {:.2e}, phase {:.6f})", *r.period, r.residual, r.phase)
                    : fmt::format("none up to {} (closest {:.2e})", r.bound, r.residual);
  };
  std::cerr << fmt::format("{}-cycle, coin r={} a={} b={}\n  strict:      {}\n  insensitive: {}\n", o.cycle, coin.r(),
                           coin.a(), coin.b(), show(scan.strict), show(scan.insensitive));
  std::ostringstream csv;
  write_period_csv(csv, scan);
  emit(o.out, "period.csv", csv.str());
  return 0;
}

int cmd_depth_report(const CommonOptions& o, bool logical) {
  const ExperimentConfig cfg = resolve(o);
  std::optional<OptLevel> level;
  if (!logical) level = cfg.opt_level;
  std::ostringstream csv;
  write_depth_csv(csv, depth_table(cfg, level));
  emit(o.out, "depth.csv", csv.str());
  return 0;
}

int cmd_dump_circuit(const CommonOptions& o, int t, bool native) {
  const ExperimentConfig cfg = resolve(o);
  if (t < 0) throw ConfigError("t", "must be non-negative");
  const Circuit logical = build_walk_circuit(cfg.cycle, cfg.schedule(t), t);
  std::string text;
  if (!native) {
    text = circuit_to_text(logical);
  } else {
    const Circuit n = transpile(logical, cfg.opt_level);
    const GateDurations durations = cfg.noise ? cfg.noise->durations() : NoiseModel{}.durations();
    ScheduledCircuit sc = schedule(n, durations);
    if (cfg.dd == DdMode::XY4) sc = insert_dd(sc, DdSequence::XY4, 4.0 * durations.one_qubit, durations);
    text = circuit_to_text(sc.circuit, sc.start_times);
  }
  emit(o.out, fmt::format("circuit_{}cycle_t{}{}.txt", cfg.cycle, t, native ? "_native" : ""), text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-time quantum walks on cycles: experiments, periods, depths and circuits"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(DTQW_VERSION));

  CommonOptions run_opts, depth_opts, dump_opts;
  auto* run = app.add_subcommand("run", "Exact, sampled and noisy runs for t = 1..t_max with CSV/SVG output");
  add_common(run, run_opts);

  PeriodOptionsCli period_opts;
  bool hadamard = false;
  auto* period = app.add_subcommand("period-scan", "Period of a single-coin walk in both phase modes");
  period->add_option("--cycle", period_opts.cycle, "Number of sites");
  period->add_flag("--hadamard", hadamard, "Use the Hadamard coin (r = 1/2)");
  period->add_option("--r", period_opts.r, "Coin r in [0, 1]");
  period->add_option("--a", period_opts.a, "Coin phase a");
  period->add_option("--b", period_opts.b, "Coin phase b");
  period->add_option("--t-max", period_opts.t_max, "Search bound")->check(CLI::PositiveNumber);
  period->add_option("--tol", period_opts.tol, "Distance tolerance")->check(CLI::PositiveNumber);
  period->add_option("--out", period_opts.out, "Output directory for period.csv (default: stdout)");

  auto* depth = app.add_subcommand("depth-report", "t,logical_depth,native_depth,count_1q,count_2q for t = 1..t_max");
  add_common(depth, depth_opts, {"0", "1", "3", "logical"});
  depth->get_option("--out")->description("Output directory for depth.csv (default: stdout)");

  int dump_t = 1;
  bool native = false;
  auto* dump = app.add_subcommand("dump-circuit", "Write the logical or transpiled circuit for one t");
  add_common(dump, dump_opts);
  dump->add_option("--t", dump_t, "Number of walk steps")->required();
  dump->add_flag("--native", native, "Transpile and schedule before writing");
  dump->get_option("--out")->description("Output directory (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) return cmd_run(run_opts);
    if (*period) {
      if (hadamard && period_opts.r) throw ConfigError("r", "--hadamard and --r are exclusive");
      return cmd_period_scan(period_opts);
    }
    if (*depth) {
      const bool logical = depth_opts.opt == "logical";
      if (logical) depth_opts.opt.clear();
      return cmd_depth_report(depth_opts, logical);
    }
    if (*dump) return cmd_dump_circuit(dump_opts, dump_t, native);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return 0;
}
