// SPDX-License-Identifier: Apache-2.0
#include "dtqw/experiment.hpp"

#include "dtqw/circuit.hpp"
#include "dtqw/schedule.hpp"
#include "dtqw/svg.hpp"
#include "dtqw/transpiler.hpp"

#include <Eigen/Core>
#include <fmt/core.h>

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#ifndef DTQW_VERSION
#define DTQW_VERSION "unknown"
#endif

namespace dtqw {

namespace {

// Runs body(i) for i in [0, n) on a few threads. The first exception, in index
// order, is rethrown after all workers finish.
template <typename Fn>
void parallel_for(std::size_t n, Fn body) {
  const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(n, 1));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double outcome_probability(const Distribution& d, int outcome) {
  const auto p = normalized(d);
  const auto it = p.find(outcome);
  return it == p.end() ? 0.0 : it->second;
}

StepResult simulate_step(const ExperimentConfig& cfg, int t) {
  const Circuit logical = build_walk_circuit(cfg.cycle, cfg.schedule(t), t);
  const StateVector psi0 = initial_state(cfg.theta, cfg.phi, cfg.cycle, Embedding::Padded);
  const StateVector psi = run_exact(logical, psi0);
  const Distribution exact = measure_positions(psi, logical.measured(), 0, 0);

  StepResult r;
  r.t = t;
  r.exact_p0 = outcome_probability(exact, 0);
  if (cfg.shots > 0) {
    const Distribution sampled = sample_counts(exact, cfg.shots, derive_seed(cfg.seed, t, 0));
    r.sampled_p0 = outcome_probability(sampled, 0);
    r.sampled_fidelity = hellinger_fidelity(sampled, exact);
  }
  if (cfg.noise) {
    const NoiseModel& nm = *cfg.noise;
    const Circuit native = transpile(logical, cfg.opt_level);
    ScheduledCircuit sc = schedule(native, nm.durations());
    if (cfg.dd == DdMode::XY4) sc = insert_dd(sc, DdSequence::XY4, 4.0 * nm.dur_1q, nm.durations());
    const DensityMatrix rho = run_noisy(sc, DensityMatrix::from_state(psi0), nm);
    Distribution noisy = readout_distribution(rho, native.measured(), nm);
    if (cfg.shots > 0) noisy = sample_counts(noisy, cfg.shots, derive_seed(cfg.seed, t, 1));
    r.noisy_p0 = outcome_probability(noisy, 0);
    r.noisy_fidelity = hellinger_fidelity(noisy, exact);
  }
  return r;
}

FidelitySeries series_of(const std::vector<StepResult>& steps, std::optional<double> StepResult::*member,
                         std::string label) {
  FidelitySeries s;
  s.labels = {std::move(label), "exact"};
  for (const auto& r : steps) {
    if (!(r.*member)) continue;
    s.steps.push_back(r.t);
    s.values.push_back(std::clamp(*(r.*member), 0.0, 1.0));
  }
  return s;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  out << content;
  if (!out.flush()) throw std::runtime_error(fmt::format("error while writing {}", path.string()));
}

std::string g17(double v) { return fmt::format("{:.17g}", v); }

std::string probability_csv(const ExperimentResult& result, bool sampled, bool noisy) {
  std::string csv = "t,exact";
  if (sampled) csv += ",sampled";
  if (noisy) csv += ",noisy";
  csv += '\n';
  for (const auto& r : result.steps) {
    csv += fmt::format("{},{}", r.t, g17(r.exact_p0));
    if (sampled) csv += "," + g17(r.sampled_p0.value_or(0.0));
    if (noisy) csv += "," + g17(r.noisy_p0.value_or(0.0));
    csv += '\n';
  }
  return csv;
}

PlotSeries plot_series(const std::string& name, const std::vector<int>& ts, const std::vector<double>& ys) {
  PlotSeries s{name, {}, ys};
  for (int t : ts) s.x.push_back(t);
  return s;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, int t, int stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(stream)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

FidelitySeries ExperimentResult::sampled_series() const {
  return series_of(steps, &StepResult::sampled_fidelity, "sampled");
}

FidelitySeries ExperimentResult::noisy_series() const { return series_of(steps, &StepResult::noisy_fidelity, "noisy"); }

ExperimentResult simulate_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult result;
  result.steps.resize(static_cast<std::size_t>(cfg.t_max));
  parallel_for(result.steps.size(), [&](std::size_t i) { result.steps[i] = simulate_step(cfg, static_cast<int>(i) + 1); });
  return result;
}

void write_manifest(std::ostream& os, const ExperimentConfig& cfg) {
  os << "# dtqw " << DTQW_VERSION << '\n'
     << "# eigen " << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION << '\n'
     << "# fmt " << FMT_VERSION / 10000 << '.' << FMT_VERSION / 100 % 100 << '.' << FMT_VERSION % 100 << '\n'
     << "# seed " << cfg.seed << '\n'
     << "# regenerate with: dtqw run --config <this file>\n";
  write_config(os, cfg);
}

std::vector<std::filesystem::path> write_bundle(const ExperimentConfig& cfg, const ExperimentResult& result) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec || !std::filesystem::is_directory(cfg.output_dir)) {
    throw std::runtime_error(fmt::format("cannot create output directory {}", cfg.output_dir.string()));
  }
  const bool sampled = cfg.shots > 0, noisy = cfg.noise.has_value();
  std::vector<std::filesystem::path> files;
  auto emit = [&](const std::string& name, const std::string& content) {
    files.push_back(cfg.output_dir / name);
    write_file(files.back(), content);
  };

  emit("probability.csv", probability_csv(result, sampled, noisy));

  std::vector<FidelitySeries> fidelity;
  if (noisy) fidelity.push_back(result.noisy_series());
  if (sampled) fidelity.push_back(result.sampled_series());
  if (fidelity.empty()) {
    FidelitySeries trivial{{}, {}, {"exact", "exact"}};
    for (const auto& r : result.steps) {
      trivial.steps.push_back(r.t);
      trivial.values.push_back(1.0);
    }
    fidelity.push_back(trivial);
  }
  for (std::size_t i = 0; i < fidelity.size(); ++i) {
    std::ostringstream os;
    write_fidelity_csv(os, fidelity[i]);
    emit(i == 0 ? "fidelity.csv" : "fidelity_sampled.csv", os.str());
  }

  std::vector<int> ts;
  for (const auto& r : result.steps) ts.push_back(r.t);
  LineChart prob{fmt::format("Return probability, {}-cycle, {}", cfg.cycle, cfg.pattern), "t", "P(position 0)", 0.0, 1.0, {}};
  std::vector<double> ys;
  for (const auto& r : result.steps) ys.push_back(r.exact_p0);
  prob.series.push_back(plot_series("exact", ts, ys));
  if (sampled) {
    ys.clear();
    for (const auto& r : result.steps) ys.push_back(r.sampled_p0.value_or(0.0));
    prob.series.push_back(plot_series("sampled", ts, ys));
  }
  if (noisy) {
    ys.clear();
    for (const auto& r : result.steps) ys.push_back(r.noisy_p0.value_or(0.0));
    prob.series.push_back(plot_series(cfg.dd == DdMode::XY4 ? "noisy + XY4" : "noisy", ts, ys));
  }
  emit("probability.svg", render_svg(prob));

  LineChart fid{fmt::format("Hellinger fidelity vs exact, {}-cycle, {}", cfg.cycle, cfg.pattern), "t", "fidelity", 0.0, 1.0, {}};
  for (const auto& s : fidelity) fid.series.push_back(plot_series(s.labels.first, s.steps, s.values));
  for (const auto& path : cfg.overlays) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(fmt::format("cannot read overlay {}", path.string()));
    const FidelitySeries overlay = read_fidelity_csv(in);
    fid.series.push_back(plot_series(overlay.labels.first.empty() ? path.stem().string() : overlay.labels.first,
                                     overlay.steps, overlay.values));
  }
  emit("fidelity.svg", render_svg(fid));

  std::ostringstream manifest;
  write_manifest(manifest, cfg);
  emit("manifest.ini", manifest.str());
  return files;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult result = simulate_experiment(cfg);
  result.files = write_bundle(cfg, result);
  return result;
}

std::vector<DepthRow> depth_table(const ExperimentConfig& cfg, std::optional<OptLevel> level) {
  cfg.validate();
  std::vector<DepthRow> rows(static_cast<std::size_t>(cfg.t_max));
  parallel_for(rows.size(), [&](std::size_t i) {
    const int t = static_cast<int>(i) + 1;
    const Circuit logical = build_walk_circuit(cfg.cycle, cfg.schedule(t), t);
    const DepthReport lr = depth_report(logical);
    const DepthReport nr = level ? depth_report(transpile(logical, *level)) : lr;
    rows[i] = DepthRow{t, lr.depth, nr.depth, nr.counts_1q, nr.counts_2q};
  });
  return rows;
}

void write_depth_csv(std::ostream& os, const std::vector<DepthRow>& rows) {
  os << "t,logical_depth,native_depth,count_1q,count_2q\n";
  for (const auto& r : rows) {
    os << r.t << ',' << r.logical_depth << ',' << r.native_depth << ',' << r.count_1q << ',' << r.count_2q << '\n';
  }
}

PeriodScan period_scan(int cycle, const CoinParams& coin, int t_max, double tol) {
  const ComplexMatrix u = step_operator(cycle, Embedding::Exact, coin);
  PeriodOptions options;
  options.t_max = t_max;
  options.tol = tol;
  PeriodScan scan;
  scan.strict = find_period_eigen(u, options);
  options.mode = PhaseMode::Insensitive;
  scan.insensitive = find_period_eigen(u, options);
  return scan;
}

void write_period_csv(std::ostream& os, const PeriodScan& scan) {
  os << "mode,period,residual,phase\n";
  for (const auto& [name, r] : {std::pair{"strict", scan.strict}, std::pair{"insensitive", scan.insensitive}}) {
    os << name << ',' << (r.period ? std::to_string(*r.period) : "") << ',' << g17(r.residual) << ',' << g17(r.phase)
       << '\n';
  }
}

}  // namespace dtqw
