// SPDX-License-Identifier: Apache-2.0
//
// Per-step walk experiments, depth tables and period scans, with their
// CSV/SVG artifacts.
#pragma once

#include "dtqw/config.hpp"
#include "dtqw/metrics.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace dtqw {

struct StepResult {
  int t = 0;
  /// Probability of finding the walker at its starting position.
  double exact_p0 = 0.0;
  std::optional<double> sampled_p0;
  std::optional<double> noisy_p0;
  std::optional<double> sampled_fidelity;
  std::optional<double> noisy_fidelity;
};

struct ExperimentResult {
  std::vector<StepResult> steps;
  std::vector<std::filesystem::path> files;

  FidelitySeries sampled_series() const;
  FidelitySeries noisy_series() const;
};

/// Seed for step t and stream s (0 = ideal sampling, 1 = noisy sampling),
/// drawn from std::seed_seq over the master seed, t and s.
std::uint64_t derive_seed(std::uint64_t master, int t, int stream);

/// For t = 1..t_max: builds the walk circuit, runs it exactly, samples `shots`
/// outcomes from the ideal state when shots > 0, and when noise is configured
/// runs the transpiled (and optionally XY4-padded) circuit on density matrices.
/// Sampled and noisy position distributions are compared with the exact one.
/// Steps run in parallel; results do not depend on the thread count.
ExperimentResult simulate_experiment(const ExperimentConfig& cfg);

/// Writes probability.csv, fidelity.csv, probability.svg, fidelity.svg and
/// manifest.ini into cfg.output_dir, creating it if needed. fidelity.csv holds
/// noisy:exact when noise is configured and sampled:exact otherwise; with both,
/// the sampled series also goes to fidelity_sampled.csv. Returns the paths.
/// Throws std::runtime_error when the directory or a file cannot be written.
std::vector<std::filesystem::path> write_bundle(const ExperimentConfig& cfg, const ExperimentResult& result);

/// simulate_experiment followed by write_bundle.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// The manifest is a loadable config with version and seed comments on top.
void write_manifest(std::ostream& os, const ExperimentConfig& cfg);

struct DepthRow {
  int t = 0;
  int logical_depth = 0;
  int native_depth = 0;
  int count_1q = 0;
  int count_2q = 0;
};

/// One row per t = 1..cfg.t_max. Without a level the native columns describe
/// the logical circuit itself.
std::vector<DepthRow> depth_table(const ExperimentConfig& cfg, std::optional<OptLevel> level);
/// `t,logical_depth,native_depth,count_1q,count_2q`.
void write_depth_csv(std::ostream& os, const std::vector<DepthRow>& rows);

struct PeriodScan {
  PeriodResult strict;
  PeriodResult insensitive;
};

/// Period of the single-coin walk on the exact N-cycle in both phase modes.
PeriodScan period_scan(int cycle, const CoinParams& coin, int t_max, double tol = 1e-8);
/// `mode,period,residual,phase`, with an empty period when none was found.
void write_period_csv(std::ostream& os, const PeriodScan& scan);

}  // namespace dtqw
