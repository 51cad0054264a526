// SPDX-License-Identifier: Apache-2.0
#include "dtqw/simulator.hpp"
#include "dtqw/transpiler.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>

using namespace dtqw;

namespace {

const std::map<std::string, CoinParams> kFourCycleCoins = {{"A", CoinParams(0.998489)},
                                                           {"B", CoinParams(0.119545)}};
const std::map<std::string, CoinParams> kThreeCycleCoins = {{"A'", CoinParams(0.264734)},
                                                            {"B'", CoinParams(0.801571)}};

Circuit walk(int cycle, int t) {
  const auto sched = cycle == 3 ? parrondo_schedule("A'A'B'B'", kThreeCycleCoins, static_cast<std::size_t>(t))
                                : parrondo_schedule("AABB", kFourCycleCoins, static_cast<std::size_t>(t));
  return build_walk_circuit(cycle, sched, t);
}

ComplexMatrix product(const std::vector<Gate>& gates, int width) {
  Circuit c(width);
  for (const auto& g : gates) c.append(g);
  return lower_to_unitary(c);
}

double aligned(const ComplexMatrix& a, const ComplexMatrix& b) { return phase_aligned_distance(a, b).distance; }

bool all_native(const std::vector<Gate>& gates) {
  return std::all_of(gates.begin(), gates.end(), [](const Gate& g) { return g.is_native(); });
}

}  // namespace

TEST(Decompose1q, CoinAHasSxRzSxCore) {
  const auto gates = decompose_1q(Gate::unitary(0, coin_operator(CoinParams(0.998489))));
  ASSERT_LE(gates.size(), 5u);
  EXPECT_LT(aligned(product(gates, 1), coin_operator(CoinParams(0.998489))), 1e-10);
  bool found = false;
  for (std::size_t i = 0; i + 2 < gates.size(); ++i) {
    if (gates[i].kind() == GateKind::SX && gates[i + 1].kind() == GateKind::RZ && gates[i + 2].kind() == GateKind::SX) {
      EXPECT_NEAR(gates[i + 1].params()[0], 3.06, 0.01);
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(Decompose1q, RzPassesThrough) {
  const auto gates = decompose_1q(Gate::rz(0, 0.3));
  ASSERT_EQ(gates.size(), 1u);
  EXPECT_EQ(gates[0], Gate::rz(0, 0.3));
  EXPECT_TRUE(decompose_1q(Gate::rz(0, 2.0 * kPi)).empty());
}

TEST(Decompose1q, NamedGates) {
  for (const Gate& g : {Gate::h(0), Gate::x(0), Gate::sx(0), Gate::phase(0, 1.2), Gate::u3(0, 0.4, -2.0, 2.9)}) {
    const auto gates = decompose_1q(g);
    EXPECT_TRUE(all_native(gates));
    EXPECT_LE(gates.size(), 5u);
    EXPECT_LT(aligned(product(gates, 1), g.matrix()), 1e-10) << gate_kind_name(g.kind());
  }
  EXPECT_EQ(decompose_1q(Gate::h(0)).size(), 3u);
  EXPECT_THROW(decompose_1q(Gate::ecr(0, 1)), std::invalid_argument);
}

TEST(Decompose1q, RandomUnitariesAndCanonicalAngles) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(-3.0 * kPi, 3.0 * kPi);
  for (int trial = 0; trial < 500; ++trial) {
    const Gate g = Gate::u3(0, angle(rng), angle(rng), angle(rng));
    const auto gates = decompose_1q(g);
    ASSERT_LE(gates.size(), 5u);
    ASSERT_LT(aligned(product(gates, 1), g.matrix()), 1e-10);
    for (const auto& n : gates) {
      if (n.kind() != GateKind::RZ) continue;
      EXPECT_GT(n.params()[0], -kPi);
      EXPECT_LE(n.params()[0], kPi);
      EXPECT_GT(std::abs(n.params()[0]), 1e-12);
    }
  }
}

TEST(DecomposeCp, Examples) {
  const auto pi_gates = decompose_cp(kPi, 0, 1);
  EXPECT_TRUE(all_native(pi_gates));
  ComplexMatrix cz = ComplexMatrix::Identity(4, 4);
  cz(3, 3) = -1.0;
  EXPECT_LT(aligned(product(pi_gates, 2), cz), 1e-9);
  EXPECT_LT(aligned(product(decompose_cp(8.0 * kPi / 3.0, 1, 0), 2),
                    product(decompose_cp(2.0 * kPi / 3.0, 1, 0), 2)),
            1e-9);
  EXPECT_TRUE(decompose_cp(0.0, 0, 1).empty());
  EXPECT_TRUE(decompose_cp(-4.0 * kPi, 0, 1).empty());
  for (double theta : {0.1, -2.5, kPi / 2.0, 7.0}) {
    EXPECT_LT(aligned(product(decompose_cp(theta, 0, 1), 2), Gate::cp(0, 1, theta).matrix()), 1e-9) << theta;
  }
}

TEST(Passes, CancellationAndFusion) {
  Circuit c(2);
  c.append(Gate::ecr(0, 1)).append(Gate::ecr(0, 1)).append(Gate::rz(0, 0.4)).append(Gate::rz(0, -0.4));
  c.append(Gate::sx(1)).append(Gate::sx(1)).append(Gate::x(1));
  EXPECT_EQ(cancel_inverse_pairs(c).size(), 3u);
  const Circuit fused = fuse_single_qubit_runs(cancel_inverse_pairs(c));
  EXPECT_TRUE(fused.empty());
  EXPECT_EQ(transpile(c, OptLevel::L1).size(), 0u);
}

TEST(Passes, CancellationRespectsInterveningGates) {
  Circuit c(2);
  c.append(Gate::ecr(0, 1)).append(Gate::sx(1)).append(Gate::ecr(0, 1));
  EXPECT_EQ(cancel_inverse_pairs(c).size(), 3u);
  Circuit flipped(2);
  flipped.append(Gate::ecr(0, 1)).append(Gate::ecr(1, 0));
  EXPECT_EQ(cancel_inverse_pairs(flipped).size(), 2u);
}

TEST(Passes, CoalesceDiagonalsMergesAcrossControlledPhases) {
  Circuit c(2);
  c.append(Gate::phase(0, 0.3)).append(Gate::cp(0, 1, 0.5)).append(Gate::rz(0, 0.2)).append(Gate::cp(1, 0, -0.5));
  c.append(Gate::h(0));
  const Circuit out = coalesce_diagonals(c);
  EXPECT_EQ(out.size(), 2u);
  EXPECT_LT(aligned(lower_to_unitary(out), lower_to_unitary(c)), 1e-12);
}

TEST(Passes, BlockConsolidationCapsEcrCount) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  Circuit c(3);
  for (int i = 0; i < 6; ++i) {
    c.append(Gate::u3(0, angle(rng), angle(rng), angle(rng)));
    c.append(Gate::cp(0, 2, angle(rng)));
  }
  const Circuit out = consolidate_two_qubit_blocks(c);
  EXPECT_EQ(depth_report(lower_to_native(out)).counts_2q, 3);
  EXPECT_LT(aligned(lower_to_unitary(out), lower_to_unitary(c)), 1e-9);
}

TEST(Transpile, SemanticsAndNativeClosure) {
  for (int cycle : {3, 4}) {
    for (int t : {0, 1, 2, 7, 13, 25}) {
      const Circuit c = walk(cycle, t);
      const ComplexMatrix u = lower_to_unitary(c);
      for (OptLevel level : {OptLevel::L0, OptLevel::L1, OptLevel::L3}) {
        const Circuit n = transpile(c, level);
        EXPECT_TRUE(is_native_circuit(n));
        EXPECT_LT(aligned(lower_to_unitary(n), u), 1e-8) << cycle << " " << t << " L" << opt_level_name(level);
        EXPECT_EQ(n.measured(), c.measured());
      }
    }
  }
}

TEST(Transpile, MonotoneAcrossLevels) {
  for (int cycle : {3, 4}) {
    for (int t : {1, 5, 10, 20}) {
      const Circuit c = walk(cycle, t);
      const Circuit l0 = transpile(c, OptLevel::L0), l1 = transpile(c, OptLevel::L1), l3 = transpile(c, OptLevel::L3);
      EXPECT_LE(l1.size(), l0.size());
      EXPECT_LE(depth_report(l1).depth, depth_report(l0).depth);
      EXPECT_LE(l3.size(), l1.size());
      EXPECT_LE(depth_report(l3).depth, depth_report(l1).depth);
    }
  }
}

TEST(Transpile, LevelThreeDepthIsIndependentOfSteps) {
  for (int cycle : {3, 4}) {
    const int reference = depth_report(transpile(walk(cycle, 5), OptLevel::L3)).depth;
    for (int t : {10, 20, 25}) {
      EXPECT_EQ(depth_report(transpile(walk(cycle, t), OptLevel::L3)).depth, reference) << cycle << " " << t;
    }
  }
}

TEST(Transpile, LevelZeroThreeCycleDepthIsAffine) {
  std::vector<double> ts, ds;
  for (int t = 1; t <= 25; ++t) {
    ts.push_back(t);
    ds.push_back(depth_report(transpile(walk(3, t), OptLevel::L0)).depth);
  }
  const double n = static_cast<double>(ts.size());
  const double mt = std::accumulate(ts.begin(), ts.end(), 0.0) / n, md = std::accumulate(ds.begin(), ds.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    sxy += (ts[i] - mt) * (ds[i] - md);
    sxx += (ts[i] - mt) * (ts[i] - mt);
    syy += (ds[i] - md) * (ds[i] - md);
  }
  const double r2 = sxy * sxy / (sxx * syy);
  EXPECT_GT(r2, 0.999);
  EXPECT_GT(sxy / sxx, 3.0);
}

TEST(Transpile, OptLevelNames) {
  EXPECT_EQ(opt_level_from_name("3"), OptLevel::L3);
  EXPECT_EQ(opt_level_from_name("L1"), OptLevel::L1);
  EXPECT_FALSE(opt_level_from_name("2").has_value());
}

TEST(Schedule, Examples) {
  EXPECT_TRUE(schedule(Circuit(2)).start_times.empty());

  Circuit chain(1);
  chain.append(Gate::sx(0)).append(Gate::rz(0, 0.2)).append(Gate::x(0));
  const ScheduledCircuit sc = schedule(chain);
  EXPECT_TRUE(sc.idle_windows.empty());
  EXPECT_DOUBLE_EQ(sc.end_time(), 2.0);

  Circuit wait(2);
  wait.append(Gate::sx(1)).append(Gate::sx(0)).append(Gate::x(0)).append(Gate::x(0)).append(Gate::ecr(0, 1));
  const ScheduledCircuit sw = schedule(wait);
  ASSERT_EQ(sw.idle_windows.size(), 1u);
  EXPECT_EQ(sw.idle_windows[0].qubit, 1);
  EXPECT_DOUBLE_EQ(sw.idle_windows[0].length(), 2.0);
  EXPECT_DOUBLE_EQ(sw.start_times[4], 3.0);
}

TEST(Dd, ExactWindowGetsFourPulses) {
  Circuit c(2);
  c.append(Gate::sx(1));
  for (int i = 0; i < 5; ++i) c.append(Gate::sx(0));
  c.append(Gate::ecr(0, 1));
  const ScheduledCircuit dd = insert_dd(schedule(c), DdSequence::XY4, 4.0);
  const auto x_count = std::count_if(dd.circuit.gates().begin(), dd.circuit.gates().end(),
                                     [](const Gate& g) { return g.kind() == GateKind::X && g.qubits()[0] == 1; });
  EXPECT_EQ(x_count, 4);
  EXPECT_TRUE(dd.idle_windows.empty());
  EXPECT_LT(aligned(lower_to_unitary(dd.circuit), lower_to_unitary(c)), 1e-12);
  EXPECT_THROW(insert_dd(schedule(c), DdSequence::XY4, 3.0), std::invalid_argument);
}

TEST(Dd, ShortWindowsUntouched) {
  Circuit c(2);
  c.append(Gate::sx(1)).append(Gate::sx(0)).append(Gate::sx(0)).append(Gate::ecr(0, 1));
  EXPECT_EQ(insert_dd(schedule(c), DdSequence::XY4, 4.0).circuit.size(), c.size());
}

TEST(Dd, KeepsUnitaryOfTranspiledWalks) {
  for (int cycle : {3, 4}) {
    for (OptLevel level : {OptLevel::L0, OptLevel::L3}) {
      const Circuit n = transpile(walk(cycle, 10), level);
      const ScheduledCircuit dd = insert_dd(schedule(n), DdSequence::XY4, 4.0);
      EXPECT_GT(dd.circuit.size(), n.size());
      EXPECT_LT(aligned(lower_to_unitary(dd.circuit), lower_to_unitary(n)), 1e-9);
    }
  }
}

TEST(Dd, HelpsUnderIdleOnlyNoise) {
  for (auto [t1, t2] : {std::pair{300.0, 200.0}, std::pair{50.0, 30.0}, std::pair{100.0, 5.0}}) {
    NoiseModel nm = NoiseModel::none();
    nm.t1 = t1;
    nm.t2 = t2;
    const Circuit n = transpile(walk(3, 10), OptLevel::L3);
    const StateVector zero = StateVector::basis(8, 0);
    const ComplexVector ideal = run_exact(n, zero).amplitudes();
    const ComplexMatrix target = ideal * ideal.adjoint();
    auto distance = [&](const ScheduledCircuit& sc) {
      const DensityMatrix rho = run_noisy(sc, DensityMatrix::from_state(zero), nm);
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho.matrix() - target, Eigen::EigenvaluesOnly);
      return 0.5 * es.eigenvalues().cwiseAbs().sum();
    };
    const ScheduledCircuit plain = schedule(n, nm.durations());
    const ScheduledCircuit with_dd = insert_dd(plain, DdSequence::XY4, 4.0 * nm.dur_1q, nm.durations());
    const double d_plain = distance(plain), d_dd = distance(with_dd);
    EXPECT_GT(d_plain, 0.0);
    EXPECT_LE(d_dd, d_plain) << t1 << " " << t2;
  }
}
