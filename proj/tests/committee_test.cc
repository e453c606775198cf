// Copyright 2026 The DisAgg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "disagg/committee.h"

#include <gtest/gtest.h>

#include <cmath>

#include "disagg/errors.h"
#include "disagg/prg.h"
#include "oracles.h"

namespace disagg {
namespace {

double RelErr(double got, double want) {
  if (want == 0.0) return std::abs(got);
  return std::abs(got - want) / std::abs(want);
}

TEST(ThreatConfigTest, CountsUseFloor) {
  ThreatConfig t{1000, 0.1, 0.2};
  EXPECT_EQ(t.corrupt_count(), 100u);
  EXPECT_EQ(t.dropout_count(), 200u);
  EXPECT_EQ(t.survivor_count(), 800u);
  // 0.29 * 100 is 28.999... in binary; the count is still 29.
  ThreatConfig u{100, 0.29, 0.07};
  EXPECT_EQ(u.corrupt_count(), 29u);
  EXPECT_EQ(u.dropout_count(), 7u);
  ThreatConfig v{99, 0.1, 0.1};
  EXPECT_EQ(v.corrupt_count(), 9u);
}

TEST(ThreatConfigTest, Validation) {
  EXPECT_THROW((ThreatConfig{2, 0.0, 0.0}.validate()), ParameterError);
  EXPECT_THROW((ThreatConfig{100, -0.1, 0.0}.validate()), ParameterError);
  EXPECT_THROW((ThreatConfig{100, 0.6, 0.5}.validate()), ParameterError);
  EXPECT_THROW((ThreatConfig{100, 0.1, 0.1, 0.0}.validate()), ParameterError);
  EXPECT_NO_THROW((ThreatConfig{100, 0.1, 0.1}.validate()));
}

TEST(HypergeomTest, PmfMatchesExactEnumeration) {
  for (auto [n, k, a] : std::vector<std::array<std::uint64_t, 3>>{
           {20, 7, 9}, {100, 10, 30}, {200, 40, 150}, {50, 0, 10}, {50, 50, 10}}) {
    const oracle::Hypergeom h(n, k, a);
    for (std::uint64_t x = 0; x <= a; ++x) {
      const double want = h.pmf(x);
      EXPECT_LE(RelErr(hypergeom_pmf(n, k, a, x), want), 1e-11) << n << " " << k << " " << a;
      EXPECT_LE(RelErr(hypergeom_pmf_exact(n, k, a, x), want), 1e-14);
    }
  }
}

TEST(HypergeomTest, TailsMatchExactEnumeration) {
  const std::uint64_t n = 200, k = 20, a = 120;
  const oracle::Hypergeom h(n, k, a);
  for (std::uint64_t t = 0; t <= a + 1; ++t) {
    EXPECT_LE(RelErr(hypergeom_upper_tail(n, k, a, t), h.upper(t)), 1e-12) << t;
  }
  for (std::int64_t t = -1; t <= static_cast<std::int64_t>(a); ++t) {
    EXPECT_LE(RelErr(hypergeom_lower_tail(n, k, a, t), h.lower(t)), 1e-12) << t;
  }
}

TEST(HypergeomTest, DegenerateSupports) {
  EXPECT_EQ(hypergeom_upper_tail(100, 0, 10, 1), 0.0);
  EXPECT_EQ(hypergeom_upper_tail(100, 0, 10, 0), 1.0);
  EXPECT_EQ(hypergeom_lower_tail(100, 100, 10, 9), 0.0);
  EXPECT_EQ(hypergeom_lower_tail(100, 100, 10, -1), 0.0);
  EXPECT_EQ(hypergeom_pmf(100, 5, 10, 6), 0.0);
}

TEST(HypergeomTest, WindowCoversTheMass) {
  const PmfWindow w = hypergeom_window(10000, 1000, 500);
  double sum = 0.0;
  for (double v : w.values) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_LE(w.offset, 50u);
}

TEST(BftTest, MatchesConvolutionOracle) {
  for (auto [n, g, d, a] : std::vector<std::tuple<std::uint64_t, double, double, std::uint64_t>>{
           {60, 0.1, 0.2, 30}, {200, 0.05, 0.1, 90}, {150, 0.2, 0.1, 40}}) {
    ThreatConfig t{n, g, d};
    const auto want = oracle::ConvolvedBft(n, t.corrupt_count(), t.dropout_count(), a);
    EXPECT_LE(RelErr(bft_tail(n, g, d, a), want.value()), 1e-12);
  }
}

TEST(SolverTest, NoAdversaryGivesSmallestCommittee) {
  const CommitteeSolution s = solve_committee(ThreatConfig{1000, 0.0, 0.0}, 1);
  EXPECT_EQ(s.params, (CommitteeParams{3, 1, 2, 1}));
  EXPECT_EQ(s.tail_corrupt, 0.0);
  EXPECT_EQ(s.tail_survive, 0.0);
}

TEST(SolverTest, ThousandClientsMatchesBruteForce) {
  const ThreatConfig t{1000, 0.1, 0.1};
  const CommitteeSolution s = min_aggregators(t);
  const auto want = oracle::BruteForceSolve(1000, 100, 900, 100, 40, 40, 1, false);
  ASSERT_TRUE(want.has_value());
  EXPECT_EQ(s.params.a, want->a);
  EXPECT_EQ(s.params.t_c, want->t_c);
  EXPECT_EQ(s.params.t_r, want->t_r);
  // Frozen from the exact scan above.
  EXPECT_EQ(s.params, (CommitteeParams{48, 24, 25, 1}));
}

TEST(SolverTest, RandomConfigsMatchBruteForce) {
  Prg rng(2024);
  int feasible = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const std::uint64_t n = 10 + rng.below(191);
    const std::uint64_t g = rng.below(31), d = rng.below(31);
    const unsigned kc = 5 + static_cast<unsigned>(rng.below(36));
    const unsigned ks = 5 + static_cast<unsigned>(rng.below(36));
    const std::uint64_t rho = 1 + rng.below(10);
    const bool bft = rng.below(4) == 0;
    ThreatConfig t{n, g / 100.0, d / 100.0, double(kc), double(ks), bft};
    const std::uint64_t kc_count = g * n / 100, kd_count = d * n / 100;
    ASSERT_EQ(t.corrupt_count(), kc_count);
    ASSERT_EQ(t.dropout_count(), kd_count);
    const auto want =
        oracle::BruteForceSolve(n, kc_count, n - kd_count, kd_count, kc, ks, rho, bft);
    if (!want) {
      EXPECT_THROW(solve_committee(t, rho), NoSolutionError);
      continue;
    }
    ++feasible;
    const CommitteeSolution s = solve_committee(t, rho);
    EXPECT_EQ(s.params.a, want->a) << "trial " << trial;
    EXPECT_EQ(s.params.t_c, want->t_c);
    EXPECT_EQ(s.params.t_r, want->t_r);
    EXPECT_EQ(s.params.rho, rho);
  }
  EXPECT_GT(feasible, 10);
}

TEST(SolverTest, TableAgreesWithSolve) {
  CommitteeSolver solver(ThreatConfig{5000, 0.1, 0.2});
  const auto table = solver.min_committee_table(300);
  CommitteeSolver fresh(ThreatConfig{5000, 0.1, 0.2});
  for (std::uint64_t rho : {1u, 2u, 17u, 100u, 250u, 300u}) {
    EXPECT_EQ(table[rho], fresh.solve(rho).params.a) << rho;
  }
  for (std::uint64_t r = 2; r < table.size(); ++r) EXPECT_GE(table[r], table[r - 1]);
}

TEST(SolverTest, InfeasibleNamesBinding) {
  try {
    solve_committee(ThreatConfig{50, 0.3, 0.3}, 40);
    FAIL() << "expected NoSolutionError";
  } catch (const NoSolutionError& e) {
    EXPECT_FALSE(e.binding().empty());
  }
  EXPECT_THROW(solve_committee(ThreatConfig{10, 0.0, 0.0}, 9), NoSolutionError);
  EXPECT_THROW(solve_committee(ThreatConfig{100, 0.1, 0.1}, 0), ParameterError);
}

TEST(SolverTest, BftOnlyAddsConstraints) {
  ThreatConfig plain{2000, 0.1, 0.2};
  ThreatConfig bft = plain;
  bft.bft = true;
  const auto a = solve_committee(plain, 10);
  const auto b = solve_committee(bft, 10);
  EXPECT_GE(b.params.a, a.params.a);
  EXPECT_LT(b.bft_tail, bft.p_corrupt());
}

// Calibration values frozen from this solver at kappa = 40, gamma = 0.1 and
// delta = 0.2, each confirmed by the exact oracle: A feasible, A - 1 not.
struct Frozen {
  std::uint64_t n, rho, a;
};

class FrozenCommitteeTest : public ::testing::TestWithParam<Frozen> {};

TEST_P(FrozenCommitteeTest, MinimalAndExact) {
  const Frozen f = GetParam();
  const ThreatConfig t{f.n, 0.1, 0.2};
  const CommitteeSolution s = solve_committee(t, f.rho);
  EXPECT_EQ(s.params.a, f.a);
  const std::uint64_t kc = t.corrupt_count(), ks = t.survivor_count();
  oracle::Committee c;
  ASSERT_TRUE(oracle::ExactFeasible(f.n, kc, ks, 40, 40, f.rho, f.a, &c));
  EXPECT_EQ(c.t_c, s.params.t_c);
  EXPECT_EQ(c.t_r, s.params.t_r);
  EXPECT_FALSE(oracle::ExactFeasible(f.n, kc, ks, 40, 40, f.rho, f.a - 1));
}

INSTANTIATE_TEST_SUITE_P(Calibration, FrozenCommitteeTest,
                         ::testing::Values(Frozen{10000, 100, 270}, Frozen{10000, 250, 528},
                                           Frozen{10000, 305, 619}, Frozen{100000, 250, 535},
                                           Frozen{100000, 500, 946}));

}  // namespace
}  // namespace disagg
