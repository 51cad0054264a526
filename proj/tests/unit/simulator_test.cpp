// SPDX-License-Identifier: Apache-2.0
#include "dtqw/simulator.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace dtqw;

namespace {

const std::map<std::string, CoinParams> kFourCycleCoins = {{"A", CoinParams(0.998489)},
                                                           {"B", CoinParams(0.119545)}};
const std::map<std::string, CoinParams> kThreeCycleCoins = {{"A'", CoinParams(0.264734)},
                                                            {"B'", CoinParams(0.801571)}};

Circuit aabb(int t) {
  return build_walk_circuit_4cycle(parrondo_schedule("AABB", kFourCycleCoins, static_cast<std::size_t>(t)), t);
}

StateVector zero_state(int width) { return StateVector::basis(std::size_t{1} << width, 0); }

Circuit random_circuit(std::mt19937_64& rng, int width, int n_gates) {
  std::uniform_int_distribution<int> kind(0, 7), qubit(0, width - 1);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  Circuit c(width);
  for (int i = 0; i < n_gates; ++i) {
    const int a = qubit(rng);
    int b = qubit(rng);
    while (width > 1 && b == a) b = qubit(rng);
    switch (width > 1 ? kind(rng) : kind(rng) % 5) {
      case 0: c.append(Gate::h(a)); break;
      case 1: c.append(Gate::sx(a)); break;
      case 2: c.append(Gate::rz(a, angle(rng))); break;
      case 3: c.append(Gate::u3(a, angle(rng), angle(rng), angle(rng))); break;
      case 4: c.append(Gate::x(a)); break;
      case 5: c.append(Gate::cp(a, b, angle(rng))); break;
      case 6: c.append(Gate::ecr(a, b)); break;
      default: c.append(Gate::phase(a, angle(rng))); break;
    }
  }
  return c;
}

ComplexVector random_state(std::mt19937_64& rng, int width) {
  std::normal_distribution<double> n01;
  ComplexVector v(Eigen::Index{1} << width);
  for (auto& x : v) x = Complex(n01(rng), n01(rng));
  return v.normalized();
}

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a - b, Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

}  // namespace

TEST(RunExact, EmptyCircuitKeepsState) {
  std::mt19937_64 rng(1);
  const StateVector psi(random_state(rng, 3));
  EXPECT_EQ(run_exact(Circuit(3), psi).amplitudes(), psi.amplitudes());
  EXPECT_THROW(run_exact(Circuit(2), psi), std::invalid_argument);
}

TEST(RunExact, AgreesWithLoweredUnitary) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    const int width = 1 + trial % 4;
    const Circuit c = random_circuit(rng, width, 30);
    const StateVector psi(random_state(rng, width));
    const StateVector out = run_exact(c, psi);
    ASSERT_LT((out.amplitudes() - lower_to_unitary(c) * psi.amplitudes()).norm(), 1e-10) << trial;
    ASSERT_NEAR(out.amplitudes().norm(), 1.0, 1e-10);
  }
}

TEST(RunExact, AabbReturnsToOriginAtTwenty) {
  const StateVector out = run_exact(aabb(20), zero_state(3));
  EXPECT_NEAR(return_probability(out, 4, Embedding::Padded), 1.0, 1e-6);
}

TEST(Measure, DeterministicState) {
  const auto d = measure_positions(zero_state(3), {0, 1}, 1000, 5);
  ASSERT_EQ(d.values.size(), 1u);
  EXPECT_EQ(d.values.at(0), 1000.0);
  EXPECT_EQ(d.shots, 1000u);
}

TEST(Measure, UniformTwoOutcomeWithinFiveSigma) {
  ComplexVector v = ComplexVector::Zero(4);
  v(0) = v(1) = 1.0 / std::sqrt(2.0);
  const auto d = measure_positions(StateVector(v), {0}, 100000, 1234);
  EXPECT_NEAR(d.values.at(0), 50000.0, 5 * 158.0);
  EXPECT_NEAR(d.values.at(1), 50000.0, 5 * 158.0);
  EXPECT_DOUBLE_EQ(d.total(), 100000.0);
}

TEST(Measure, SameSeedSameCounts) {
  const StateVector out = run_exact(aabb(7), zero_state(3));
  EXPECT_EQ(measure_positions(out, {0, 1}, 5000, 99), measure_positions(out, {0, 1}, 5000, 99));
}

TEST(Measure, ExactModeAfterTwentySteps) {
  const auto d = measure_positions(run_exact(aabb(20), zero_state(3)), {0, 1}, 0, 0);
  EXPECT_FALSE(d.sampled());
  EXPECT_NEAR(d.values.at(0), 1.0, 1e-6);
  EXPECT_NEAR(d.total(), 1.0, 1e-9);
}

TEST(Measure, OutOfRangeQubit) {
  EXPECT_THROW(measure_positions(zero_state(2), {2}, 10, 1), std::out_of_range);
}

TEST(NoiseModelTest, Validation) {
  EXPECT_NO_THROW(NoiseModel{}.validate());
  EXPECT_NO_THROW(NoiseModel::none().validate());
  NoiseModel nm;
  nm.p1 = 1.5;
  EXPECT_THROW(nm.validate(), std::invalid_argument);
  nm = NoiseModel{};
  nm.t2 = 700.0;
  EXPECT_THROW(nm.validate(), std::invalid_argument);
  nm = NoiseModel{};
  nm.dur_2q = -1.0;
  EXPECT_THROW(nm.validate(), std::invalid_argument);
}

TEST(DensityMatrixTest, RejectsInvalid) {
  EXPECT_THROW(DensityMatrix(ComplexMatrix::Identity(2, 2)), std::invalid_argument);
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 1.5;
  m(1, 1) = -0.5;
  EXPECT_THROW(DensityMatrix{m}, std::invalid_argument);
}

TEST(RunNoisy, ZeroNoiseMatchesPureState) {
  for (int t : {1, 5, 20}) {
    const Circuit c = aabb(t);
    const StateVector psi = run_exact(c, zero_state(3));
    const DensityMatrix rho = run_noisy(c, DensityMatrix::from_state(zero_state(3)), NoiseModel::none());
    EXPECT_LT((rho.matrix() - psi.amplitudes() * psi.amplitudes().adjoint()).norm(), 1e-9) << t;
  }
}

TEST(RunNoisy, FullDepolarizingGivesMaximallyMixedQubit) {
  Circuit c(2);
  c.append(Gate::h(0));
  NoiseModel nm = NoiseModel::none();
  nm.p1 = 1.0;
  std::mt19937_64 rng(8);
  const DensityMatrix rho = run_noisy(c, DensityMatrix::from_state(StateVector(random_state(rng, 2))), nm);
  EXPECT_LT((rho.reduced({0}) - 0.5 * ComplexMatrix::Identity(2, 2)).norm(), 1e-15);
}

TEST(RunNoisy, SmallNoiseLowersReturnProbability) {
  NoiseModel nm = NoiseModel::none();
  nm.p1 = nm.p2 = 1e-3;
  const Circuit c = aabb(20);
  const DensityMatrix rho = run_noisy(c, DensityMatrix::from_state(zero_state(3)), nm);
  const double noisy = readout_distribution(rho, {0, 1}, nm).values.at(0);
  const double ideal = return_probability(run_exact(c, zero_state(3)), 4, Embedding::Padded);
  EXPECT_LT(noisy, ideal);
  EXPECT_GT(noisy, 0.5);
}

TEST(RunNoisy, RejectsWideCircuits) {
  EXPECT_THROW(run_noisy(Circuit(7), DensityMatrix::from_state(zero_state(7)), NoiseModel::none()),
               std::invalid_argument);
}

TEST(Channels, PreserveTraceAndPositivity) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    ComplexMatrix rho = [&] {
      const ComplexVector a = random_state(rng, 3), b = random_state(rng, 3);
      return ComplexMatrix(0.6 * a * a.adjoint() + 0.4 * b * b.adjoint());
    }();
    apply_depolarizing(rho, {0, 2}, u01(rng));
    apply_thermal_relaxation(rho, 1, 10.0 * u01(rng), 3.0, 4.0);
    apply_depolarizing(rho, {1}, u01(rng));
    apply_unitary(rho, Gate::ecr(2, 1));
    const DensityMatrix checked(rho);  // throws if trace, hermiticity or positivity fail
    EXPECT_NEAR(checked.trace(), 1.0, 1e-9);
    EXPECT_GE(checked.min_eigenvalue(), -1e-9);
  }
}

TEST(Channels, ThermalRelaxationFormulas) {
  ComplexMatrix rho = ComplexMatrix::Constant(2, 2, 0.5);  // |+⟩⟨+|
  apply_thermal_relaxation(rho, 0, 2.0, 4.0, 5.0);
  EXPECT_NEAR(rho(1, 1).real(), 0.5 * std::exp(-0.5), 1e-15);
  EXPECT_NEAR(rho(0, 0).real(), 1.0 - 0.5 * std::exp(-0.5), 1e-15);
  EXPECT_NEAR(std::abs(rho(0, 1)), 0.5 * std::exp(-0.4), 1e-15);
}

TEST(Readout, ConfusionExamples) {
  const DensityMatrix rho = DensityMatrix::from_state(zero_state(2));
  NoiseModel nm = NoiseModel::none();
  auto d = readout_distribution(rho, {0, 1}, nm);
  EXPECT_EQ(d.values.at(0), 1.0);
  nm.readout_flip = 0.01;
  d = readout_distribution(rho, {0, 1}, nm);
  EXPECT_NEAR(d.values.at(0), 0.9801, 1e-15);
  EXPECT_NEAR(d.values.at(1), 0.0099, 1e-15);
  EXPECT_NEAR(d.values.at(2), 0.0099, 1e-15);
  EXPECT_NEAR(d.values.at(3), 0.0001, 1e-15);
  nm.readout_flip = 0.5;
  d = readout_distribution(rho, {0, 1}, nm);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(d.values.at(k), 0.25, 1e-15);
}

TEST(RunNoisy, DistanceFromIdealGrowsWithSteps) {
  const NoiseModel nm;
  double previous = -1.0;
  for (int t = 1; t <= 25; t += 4) {
    const Circuit c = aabb(t);
    const ComplexVector ideal = run_exact(c, zero_state(3)).amplitudes();
    const DensityMatrix rho = run_noisy(c, DensityMatrix::from_state(zero_state(3)), nm);
    const double d = trace_distance(rho.matrix(), ideal * ideal.adjoint());
    EXPECT_GT(d, previous) << t;
    previous = d;
  }
}

TEST(DistributionCsv, RoundTrip) {
  Distribution sampled{{{0, 70.0}, {3, 30.0}}, 100};
  Distribution exact{{{0, 0.25}, {1, 0.75}}, 0};
  for (const auto& d : {sampled, exact}) {
    std::stringstream ss;
    write_distribution_csv(ss, d);
    EXPECT_EQ(read_distribution_csv(ss), d);
  }
}
