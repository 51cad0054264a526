// SPDX-License-Identifier: Apache-2.0
#include "dtqw/walk.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace dtqw;

namespace {

const CoinParams kA(0.998489);
const CoinParams kB(0.119545);
const CoinParams kAp(0.264734);
const CoinParams kBp(0.801571);

// Block-circulant oracle written in (position, coin) order, then permuted into
// the coin-major layout. Block (j, k) is M_{(k − j) mod N}.
ComplexMatrix circulant_oracle(int n, const CoinParams& p) {
  const double c = std::sqrt(p.r());
  const double s = std::sqrt(1.0 - p.r());
  ComplexMatrix m1 = ComplexMatrix::Zero(2, 2);
  m1(0, 0) = c;
  m1(0, 1) = std::polar(s, p.a());
  ComplexMatrix mlast = ComplexMatrix::Zero(2, 2);
  mlast(1, 0) = std::polar(s, p.b());
  mlast(1, 1) = -std::polar(c, p.a() + p.b());
  ComplexMatrix u = ComplexMatrix::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      const int d = ((k - j) % n + n) % n;
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          Complex v{};
          if (d == 1) v += m1(a, b);
          if (d == n - 1) v += mlast(a, b);
          u(a * n + j, b * n + k) = v;
        }
      }
    }
  }
  return u;
}

CoinParams random_coin(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> r01(0.0, 1.0), ang(0.0, kPi);
  return CoinParams(r01(rng), ang(rng), ang(rng));
}

PeriodOptions insensitive(int t_max = 1000) {
  PeriodOptions o;
  o.t_max = t_max;
  o.mode = PhaseMode::Insensitive;
  return o;
}

}  // namespace

TEST(CoinOperator, HadamardCase) {
  const ComplexMatrix h = coin_operator(CoinParams::hadamard());
  const double s = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(h(0, 0) - s), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(h(0, 1) - s), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(h(1, 0) - s), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(h(1, 1) + s), 0.0, 1e-15);
}

TEST(CoinOperator, DiagonalWhenRIsOne) {
  const ComplexMatrix z = coin_operator(CoinParams(1.0));
  ComplexMatrix expected(2, 2);
  expected << 1, 0, 0, -1;
  EXPECT_NEAR((z - expected).norm(), 0.0, 1e-15);
}

TEST(CoinOperator, PaperCoinMagnitude) {
  const ComplexMatrix a = coin_operator(kA);
  EXPECT_NEAR(std::abs(a(0, 0)), 0.999244, 1e-6);
  EXPECT_LT(unitarity_defect(a), 1e-12);
}

TEST(CoinOperator, RejectsBadParameters) {
  EXPECT_THROW(CoinParams(1.5), std::invalid_argument);
  EXPECT_THROW(CoinParams(-0.1), std::invalid_argument);
  EXPECT_THROW(CoinParams(0.5, 2.0 * kPi), std::invalid_argument);
  EXPECT_NO_THROW(CoinParams(0.5, 4.0, 5.0));
}

TEST(ShiftOperator, FourCycleBlocks) {
  const ComplexMatrix s = shift_operator(4, Embedding::Exact);
  ComplexMatrix r0(4, 4), r1(4, 4);
  r0 << 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 1, 0, 0, 0;
  r1 << 0, 0, 0, 1, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0;
  EXPECT_EQ(s.topLeftCorner(4, 4), r0);
  EXPECT_EQ(s.bottomRightCorner(4, 4), r1);
  EXPECT_TRUE(s.topRightCorner(4, 4).isZero());
  EXPECT_TRUE(s.bottomLeftCorner(4, 4).isZero());
}

TEST(ShiftOperator, PaddedThreeCycleFixesNodeThree) {
  const ComplexMatrix s = shift_operator(3, Embedding::Padded);
  ASSERT_EQ(s.rows(), 8);
  ComplexMatrix r0(4, 4), r1(4, 4);
  r0 << 0, 1, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0, 1;
  r1 << 0, 0, 1, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1;
  EXPECT_EQ(s.topLeftCorner(4, 4), r0);
  EXPECT_EQ(s.bottomRightCorner(4, 4), r1);
}

TEST(ShiftOperator, UnitaryForAllSizes) {
  for (int n : {3, 4, 5, 6, 7, 8}) {
    for (auto e : {Embedding::Exact, Embedding::Padded}) {
      EXPECT_LT(unitarity_defect(shift_operator(n, e)), 1e-14) << n;
    }
  }
  EXPECT_THROW(shift_operator(2, Embedding::Exact), std::invalid_argument);
}

TEST(StepOperator, MatchesCirculantForm) {
  std::mt19937_64 rng(7);
  for (int n : {3, 4, 5, 8}) {
    for (int trial = 0; trial < 100; ++trial) {
      const CoinParams p = random_coin(rng);
      const ComplexMatrix u = step_operator(n, Embedding::Exact, p);
      ASSERT_LT((u - circulant_oracle(n, p)).cwiseAbs().maxCoeff(), 1e-15) << n;
      ASSERT_LT(unitarity_defect(u), 1e-12);
    }
  }
}

TEST(StepOperator, HadamardFourCyclePeriodEight) {
  const ComplexMatrix u = step_operator(4, Embedding::Exact, CoinParams::hadamard());
  ComplexMatrix p = ComplexMatrix::Identity(8, 8);
  for (int i = 0; i < 8; ++i) p = u * p;
  EXPECT_LT(phase_aligned_distance(p, ComplexMatrix::Identity(8, 8)).distance, 1e-12);
}

TEST(StepOperator, ThreeCycleR3PowerEight) {
  const ComplexMatrix u = step_operator(3, Embedding::Exact, CoinParams(2.0 / 3.0));
  ComplexMatrix p = ComplexMatrix::Identity(6, 6);
  for (int i = 0; i < 8; ++i) p = u * p;
  EXPECT_LT(phase_aligned_distance(p, ComplexMatrix::Identity(6, 6)).distance, 1e-12);
}

TEST(InitialState, Examples) {
  const auto s0 = initial_state(0.0, 0.0, 4, Embedding::Exact);
  EXPECT_EQ(s0[0], Complex(1.0));
  const auto s1 = initial_state(kPi, 0.0, 4, Embedding::Exact);
  EXPECT_NEAR(std::abs(s1[4] - Complex(1.0)), 0.0, 1e-15);
  const auto s2 = initial_state(kPi / 2, kPi / 2, 3, Embedding::Padded);
  EXPECT_NEAR(std::abs(s2[0] - Complex(1.0 / std::sqrt(2.0))), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s2[4] - Complex(0.0, 1.0 / std::sqrt(2.0))), 0.0, 1e-15);
  EXPECT_THROW(initial_state(4.0, 0.0, 4, Embedding::Exact), std::invalid_argument);
  EXPECT_THROW(initial_state(0.0, 7.0, 4, Embedding::Exact), std::invalid_argument);
}

TEST(StateVector, RejectsUnnormalized) {
  ComplexVector v = ComplexVector::Ones(2);
  EXPECT_THROW(StateVector{v}, std::invalid_argument);
}

TEST(Evolve, OneHadamardStepSplitsToNeighbours) {
  const auto psi0 = initial_state(0.0, 0.0, 4, Embedding::Exact);
  const auto traj =
      evolve(psi0, parrondo_schedule("H", {{"H", CoinParams::hadamard()}}, 1), 4, Embedding::Exact);
  ASSERT_EQ(traj.size(), 1u);
  const double s = 1.0 / std::sqrt(2.0);
  // coin 0 moves to position 3, coin 1 to position 1.
  EXPECT_NEAR(std::abs(traj[0][3]), s, 1e-15);
  EXPECT_NEAR(std::abs(traj[0][4 + 1]), s, 1e-15);
  EXPECT_NEAR(return_probability(traj[0], 4, Embedding::Exact), 0.0, 1e-15);
}

TEST(Evolve, EmptyScheduleLeavesStateAlone) {
  const auto psi0 = initial_state(0.0, 0.0, 4, Embedding::Exact);
  EXPECT_TRUE(evolve(psi0, parrondo_schedule("A", {{"A", kA}}, 0), 4, Embedding::Exact).empty());
  EXPECT_DOUBLE_EQ(return_probability(psi0, 4, Embedding::Exact), 1.0);
}

TEST(Evolve, DimensionMismatchThrows) {
  const auto psi0 = initial_state(0.0, 0.0, 4, Embedding::Exact);
  EXPECT_THROW(evolve(psi0, parrondo_schedule("A", {{"A", kA}}, 2), 5, Embedding::Exact),
               std::invalid_argument);
}

TEST(Evolve, NormPreserved) {
  std::mt19937_64 rng(3);
  const auto psi0 = initial_state(1.1, 2.2, 5, Embedding::Exact);
  const auto traj = evolve(
      psi0, parrondo_schedule("XY", {{"X", random_coin(rng)}, {"Y", random_coin(rng)}}, 50), 5,
      Embedding::Exact);
  for (const auto& s : traj) EXPECT_NEAR(s.amplitudes().norm(), 1.0, 1e-10);
}

// The 6-digit coin parameters only return to within ~2e-6 of the start state.
TEST(Evolve, AabbFourCycleReturnsAtTwenty) {
  const auto psi0 = initial_state(0.0, 0.0, 4, Embedding::Exact);
  const auto traj =
      evolve(psi0, parrondo_schedule("AABB", {{"A", kA}, {"B", kB}}, 20), 4, Embedding::Exact);
  EXPECT_LT((traj.back().amplitudes() - psi0.amplitudes()).norm(), 1e-5);
  EXPECT_NEAR(return_probability(traj.back(), 4, Embedding::Exact), 1.0, 1e-6);
}

TEST(Evolve, ApApBpBpThreeCycleReturnsAtTwenty) {
  const auto psi0 = initial_state(0.0, 0.0, 3, Embedding::Exact);
  const auto traj = evolve(psi0, parrondo_schedule("A'A'B'B'", {{"A'", kAp}, {"B'", kBp}}, 20), 3,
                           Embedding::Exact);
  EXPECT_LT((traj.back().amplitudes() - psi0.amplitudes()).norm(), 1e-5);
  EXPECT_NEAR(return_probability(traj.back(), 3, Embedding::Exact), 1.0, 1e-6);
}

TEST(Evolve, PureSchedulesNeverReturn) {
  struct Case {
    int n;
    CoinParams coin;
  };
  for (const auto& [n, coin] : {Case{4, kA}, Case{4, kB}, Case{3, kAp}, Case{3, kBp}}) {
    const auto psi0 = initial_state(0.0, 0.0, n, Embedding::Exact);
    const auto traj = evolve(psi0, parrondo_schedule("C", {{"C", coin}}, 25), n, Embedding::Exact);
    for (const auto& s : traj) EXPECT_LT(return_probability(s, n, Embedding::Exact), 0.999);
  }
}

TEST(Evolve, PaddedAgreesWithExactOnLiveStates) {
  std::mt19937_64 rng(11);
  const auto sched = parrondo_schedule("XY", {{"X", random_coin(rng)}, {"Y", random_coin(rng)}}, 30);
  const auto exact = evolve(initial_state(0.7, 1.3, 3, Embedding::Exact), sched, 3, Embedding::Exact);
  const auto padded =
      evolve(initial_state(0.7, 1.3, 3, Embedding::Padded), sched, 3, Embedding::Padded);
  for (std::size_t t = 0; t < exact.size(); ++t) {
    for (int c = 0; c < 2; ++c) {
      for (int p = 0; p < 3; ++p) {
        ASSERT_NEAR(std::abs(exact[t][c * 3 + p] - padded[t][c * 4 + p]), 0.0, 1e-10);
      }
    }
    ASSERT_NEAR(std::abs(padded[t][3]) + std::abs(padded[t][7]), 0.0, 1e-15);
  }
}

TEST(Period, PaperRegressionCoins) {
  EXPECT_EQ(find_period_power(step_operator(4, Embedding::Exact, CoinParams::hadamard()), insensitive())
                .period,
            8);
  EXPECT_EQ(find_period_power(step_operator(8, Embedding::Exact, CoinParams::hadamard()), insensitive())
                .period,
            24);
  EXPECT_EQ(find_period_power(step_operator(3, Embedding::Exact, CoinParams(2.0 / 3.0)), insensitive())
                .period,
            8);
  EXPECT_EQ(find_period_power(step_operator(3, Embedding::Exact, CoinParams((5.0 - std::sqrt(5.0)) / 6.0)),
                              insensitive())
                .period,
            10);
}

TEST(Period, HadamardOddCyclesAreChaotic) {
  for (int n : {3, 5}) {
    const auto r = find_period_power(step_operator(n, Embedding::Exact, CoinParams::hadamard()),
                                     insensitive());
    EXPECT_FALSE(r.period.has_value()) << n;
    EXPECT_EQ(r.bound, 1000);
    EXPECT_GT(r.residual, 1e-8);
  }
}

TEST(Period, EigenRouteIdentityAndR3) {
  EXPECT_EQ(find_period_eigen(ComplexMatrix::Identity(5, 5)).period, 1);
  EXPECT_EQ(find_period_eigen(step_operator(3, Embedding::Exact, CoinParams(2.0 / 3.0))).period, 8);
}

TEST(Period, RoutesAgreeOnRegressionSet) {
  struct Case {
    int n;
    CoinParams coin;
  };
  const std::vector<Case> cases = {
      {4, CoinParams::hadamard()}, {8, CoinParams::hadamard()}, {3, CoinParams(2.0 / 3.0)},
      {3, CoinParams((5.0 - std::sqrt(5.0)) / 6.0)}, {3, CoinParams::hadamard()},
      {5, CoinParams::hadamard()}, {4, kA}, {4, kB}, {3, kAp}, {3, kBp},
  };
  for (auto mode : {PhaseMode::Strict, PhaseMode::Insensitive}) {
    PeriodOptions o;
    o.mode = mode;
    for (const auto& [n, coin] : cases) {
      const ComplexMatrix u = step_operator(n, Embedding::Exact, coin);
      EXPECT_EQ(find_period_power(u, o).period, find_period_eigen(u, o).period) << n;
    }
  }
}

TEST(Period, StrictModeReportsZeroPhase) {
  const auto r = find_period_eigen(step_operator(4, Embedding::Exact, CoinParams::hadamard()));
  ASSERT_TRUE(r.period.has_value());
  EXPECT_EQ(r.phase, 0.0);
}

TEST(Period, InsensitiveFindsPhaseOnlyIdentity) {
  const ComplexMatrix u = std::polar(1.0, 0.3) * ComplexMatrix::Identity(4, 4);
  EXPECT_EQ(find_period_power(u, insensitive()).period, 1);
  PeriodOptions strict;
  strict.t_max = 5;
  EXPECT_FALSE(find_period_power(u, strict).period.has_value());
}

// The composed four-step block only reaches the 1e-8 threshold within ~6e-6
// because the coin parameters are rounded to six digits; 1e-5 captures it.
TEST(Period, AabbBlockHasPeriodFive) {
  const auto sched = parrondo_schedule("AABB", {{"A", kA}, {"B", kB}}, 4);
  const ComplexMatrix block = schedule_operator(sched, 4, Embedding::Exact);
  PeriodOptions o = insensitive(100);
  o.tol = 1e-5;
  EXPECT_EQ(find_period_eigen(block, o).period, 5);
  EXPECT_EQ(find_period_power(block, o).period, 5);
}

TEST(Period, RejectsNonUnitaryAndBadBound) {
  ComplexMatrix m = ComplexMatrix::Identity(2, 2);
  m(0, 1) = 0.5;
  EXPECT_THROW(find_period_power(m), std::invalid_argument);
  EXPECT_THROW(find_period_eigen(m), std::invalid_argument);
  PeriodOptions o;
  o.t_max = 0;
  EXPECT_THROW(find_period_power(ComplexMatrix::Identity(2, 2), o), std::invalid_argument);
}

TEST(Schedule, CyclicExpansion) {
  const std::map<std::string, CoinParams> ab = {{"A", kA}, {"B", kB}};
  EXPECT_EQ(parrondo_schedule("AABB", ab, 6).labels(),
            (std::vector<std::string>{"A", "A", "B", "B", "A", "A"}));
  EXPECT_EQ(parrondo_schedule("A", {{"A", kA}}, 3).labels(), (std::vector<std::string>{"A", "A", "A"}));
  EXPECT_TRUE(parrondo_schedule("AABB", ab, 0).labels().empty());
  EXPECT_EQ(parse_pattern("A'A'B'B'"), (std::vector<std::string>{"A'", "A'", "B'", "B'"}));
  EXPECT_THROW(parrondo_schedule("AC", ab, 2), std::invalid_argument);
}
