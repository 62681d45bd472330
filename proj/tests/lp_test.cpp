// Copyright 2026 The dynmatch Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <random>

#include "dynmatch/lp.hpp"
#include "oracle.hpp"

namespace dynmatch::lp {
namespace {

using testing::RandomSpec;
using testing::SmallInstance;

MatchLpSpec to_spec(const SmallInstance& s) {
  MatchLpSpec spec;
  spec.caps.assign(s.caps.view().begin(), s.caps.view().end());
  for (const Case& c : s.cases) {
    LpCase lc;
    lc.size = c.size;
    for (const Score& sc : c.scores) {
      lc.scores.push_back(sc.compatible() ? std::optional<double>(sc.value())
                                          : std::nullopt);
    }
    spec.cases.push_back(std::move(lc));
  }
  return spec;
}

TEST(Simplex, TextbookMaximum) {
  Simplex lp;
  const int x = lp.add_variable(3);
  const int y = lp.add_variable(5);
  const int r0 = lp.add_row({{x, 1}}, Simplex::RowSense::kLe, 4);
  const int r1 = lp.add_row({{y, 2}}, Simplex::RowSense::kLe, 12);
  const int r2 = lp.add_row({{x, 3}, {y, 2}}, Simplex::RowSense::kLe, 18);
  ASSERT_EQ(lp.maximize(), Simplex::Status::kOptimal);
  EXPECT_NEAR(lp.objective_value(), 36, 1e-9);
  EXPECT_NEAR(lp.value(x), 2, 1e-9);
  EXPECT_NEAR(lp.value(y), 6, 1e-9);
  EXPECT_NEAR(lp.row_dual(r0), 0, 1e-9);
  EXPECT_NEAR(lp.row_dual(r1), 1.5, 1e-9);
  EXPECT_NEAR(lp.row_dual(r2), 1, 1e-9);
}

TEST(Simplex, BoundsEqualitiesAndMinimize) {
  Simplex lp;
  const int x = lp.add_variable(1, 3.0);
  const int y = lp.add_variable(2);
  lp.add_row({{x, 1}, {y, 1}}, Simplex::RowSense::kEq, 5);
  lp.add_row({{y, 1}}, Simplex::RowSense::kGe, 1);
  ASSERT_EQ(lp.minimize(), Simplex::Status::kOptimal);
  EXPECT_NEAR(lp.value(x), 3, 1e-9);
  EXPECT_NEAR(lp.value(y), 2, 1e-9);
  EXPECT_NEAR(lp.objective_value(), 7, 1e-9);
}

TEST(Simplex, DetectsInfeasibleAndUnbounded) {
  Simplex a;
  const int x = a.add_variable(1);
  a.add_row({{x, 1}}, Simplex::RowSense::kGe, 5);
  a.add_row({{x, 1}}, Simplex::RowSense::kLe, 3);
  EXPECT_EQ(a.maximize(), Simplex::Status::kInfeasible);
  Simplex b;
  const int y = b.add_variable(1);
  b.add_row({{y, -1}}, Simplex::RowSense::kLe, 2);
  EXPECT_EQ(b.maximize(), Simplex::Status::kUnbounded);
}

TEST(MatchLpSpec, CheckRejectsMissingInfiniteColumn) {
  MatchLpSpec spec;
  spec.caps = {Capacity::Finite(1)};
  spec.cases.push_back({1, {0.5}});
  EXPECT_THROW(spec.check(), Error);
  spec.caps.push_back(Capacity::Infinite());
  EXPECT_THROW(spec.check(), Error);  // case does not cover both
  spec.cases[0].scores.push_back(0.0);
  EXPECT_NO_THROW(spec.check());
}

// Both routes on random instances with mixed sizes, including zero and
// infinite capacities.
TEST(SolveLp, TransportMatchesSimplex) {
  std::mt19937_64 rng(1);
  RandomSpec rs;
  rs.max_cases = 10;
  rs.infinite_rate = 0.15;
  for (int t = 0; t < 300; ++t) {
    const SmallInstance s = testing::random_instance(rng, rs);
    const MatchLpSpec spec = to_spec(s);
    const LpSolution a = solve_lp(spec);
    const LpSolution b = reference::solve_lp(spec);
    ASSERT_NEAR(a.value, b.value, 1e-6) << "instance " << t;
    // Primal feasibility of the transport answer.
    const size_t m = spec.num_affiliates();
    std::vector<double> load(m, 0.0);
    for (size_t i = 0; i < spec.cases.size(); ++i) {
      double row = 0.0;
      for (size_t l = 0; l < m; ++l) {
        const double x = a.at(i, l);
        EXPECT_GE(x, -1e-9);
        if (!spec.cases[i].scores[l]) {
          EXPECT_EQ(x, 0.0);
        }
        row += x;
        load[l] += x * spec.cases[i].size;
      }
      EXPECT_NEAR(row, 1.0, 1e-9);
    }
    for (size_t l = 0; l < m; ++l) {
      if (!spec.caps[l].is_infinite()) {
        EXPECT_LE(load[l], spec.caps[l].value() + 1e-9);
      }
    }
  }
}

void expect_dual_feasible(const MatchLpSpec& spec, const DualSolution& d) {
  const size_t m = spec.num_affiliates();
  for (size_t l = 0; l < m; ++l) {
    EXPECT_GE(d.prices[l], -1e-9);
    if (spec.caps[l].is_infinite()) {
      EXPECT_EQ(d.prices[l], 0.0);
    }
  }
  for (size_t i = 0; i < spec.cases.size(); ++i) {
    for (size_t l = 0; l < m; ++l) {
      if (!spec.cases[i].scores[l]) continue;
      EXPECT_GE(d.case_duals[i] + 1e-7,
                *spec.cases[i].scores[l] - spec.cases[i].size * d.prices[l]);
    }
  }
  EXPECT_NEAR(d.dual_value(spec.caps), d.primal_value, 1e-6);
}

TEST(ExtremalDuals, TransportMatchesReferenceFace) {
  std::mt19937_64 rng(2);
  RandomSpec rs;
  rs.max_cases = 9;
  rs.infinite_rate = 0.1;
  for (int t = 0; t < 200; ++t) {
    const SmallInstance s = testing::random_instance(rng, rs);
    const MatchLpSpec spec = to_spec(s);
    for (Extremality sense : {Extremality::kMaximal, Extremality::kMinimal}) {
      const DualSolution a = extremal_duals(spec, sense);
      const DualSolution b = reference::extremal_duals(spec, sense);
      expect_dual_feasible(spec, a);
      expect_dual_feasible(spec, b);
      for (size_t l = 0; l < spec.num_affiliates(); ++l) {
        ASSERT_NEAR(a.prices[l], b.prices[l], 1e-6)
            << "instance " << t << " affiliate " << l;
      }
    }
  }
}

TEST(ExtremalDuals, MaximalDominatesMinimal) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    const MatchLpSpec spec = to_spec(testing::random_instance(rng, {}));
    const DualSolution hi = extremal_duals(spec, Extremality::kMaximal);
    const DualSolution lo = extremal_duals(spec, Extremality::kMinimal);
    for (size_t l = 0; l < spec.num_affiliates(); ++l) {
      EXPECT_GE(hi.prices[l] + 1e-9, lo.prices[l]);
    }
  }
}

TEST(ExtremalDuals, PerCoordinateFaceAgreesWithSum) {
  std::mt19937_64 rng(4);
  RandomSpec rs;
  rs.unit = true;
  rs.max_cases = 8;
  for (int t = 0; t < 60; ++t) {
    const MatchLpSpec spec = to_spec(testing::random_instance(rng, rs));
    for (Extremality sense : {Extremality::kMaximal, Extremality::kMinimal}) {
      const DualSolution a = reference::extremal_duals(spec, sense, false);
      const DualSolution b = reference::extremal_duals(spec, sense, true);
      for (size_t l = 0; l < spec.num_affiliates(); ++l) {
        EXPECT_NEAR(a.prices[l], b.prices[l], 1e-6);
      }
    }
  }
}

// Unit sizes: both extremal price vectors are marginal values of one unit
// of capacity, computed here by dynamic programming.
TEST(ExtremalDuals, MarginalValuesOnUnitInstances) {
  std::mt19937_64 rng(5);
  RandomSpec rs;
  rs.unit = true;
  rs.max_cases = 10;
  rs.max_real = 5;
  rs.max_capacity = 4;
  for (int t = 0; t < 150; ++t) {
    const SmallInstance s = testing::random_instance(rng, rs);
    const MatchLpSpec spec = to_spec(s);
    const double base = testing::dp_opt(s.cases, s.caps, s.sink);
    const DualSolution hi = extremal_duals(spec, Extremality::kMaximal);
    const DualSolution lo = extremal_duals(spec, Extremality::kMinimal);
    for (size_t l = 0; l < s.sink; ++l) {
      const double up =
          testing::dp_opt(s.cases, testing::shifted(s.caps, l, 1), s.sink);
      EXPECT_NEAR(lo.prices[l], up - base, 1e-6);
      if (s.caps[l].value() >= 1) {
        const double down =
            testing::dp_opt(s.cases, testing::shifted(s.caps, l, -1), s.sink);
        EXPECT_NEAR(hi.prices[l], base - down, 1e-6);
      }
    }
  }
}

TEST(TransportSolver, EveryPrefixIsOptimal) {
  std::mt19937_64 rng(6);
  RandomSpec rs;
  rs.max_cases = 8;
  for (int t = 0; t < 100; ++t) {
    const SmallInstance s = testing::random_instance(rng, rs);
    const size_t m = s.num_affiliates();
    TransportSolver solver(s.caps.view());
    for (size_t i = 0; i < s.cases.size(); ++i) {
      const Case& c = s.cases[i];
      std::vector<double> v(m, 0.0);
      std::vector<uint8_t> allowed(m, 0);
      for (size_t l = 0; l < m; ++l) {
        if (!c.scores[l].compatible()) continue;
        allowed[l] = 1;
        v[l] = c.scores[l].value() / c.size;
      }
      solver.add_case(c.size, v, allowed);
      MatchLpSpec prefix = to_spec(s);
      prefix.cases.resize(i + 1);
      EXPECT_NEAR(solver.objective(), reference::solve_lp(prefix).value, 1e-6);
      for (size_t l = 0; l < m; ++l) {
        if (!s.caps[l].is_infinite()) {
          EXPECT_LE(solver.load(l), s.caps[l].value());
        }
      }
    }
  }
}

TEST(TransportSolver, TiesFollowScanOrder) {
  const std::vector<Capacity> caps = {Capacity::Finite(5), Capacity::Finite(5),
                                      Capacity::Infinite()};
  const std::vector<double> v = {0.5, 0.5, 0.0};
  const std::vector<uint8_t> allowed = {1, 1, 1};
  TransportSolver forward(caps);
  forward.add_case(2, v, allowed);
  EXPECT_EQ(forward.flow(0, 0), 2);
  const std::vector<size_t> order = {1, 0, 2};
  TransportSolver reversed(caps, order);
  reversed.add_case(2, v, allowed);
  EXPECT_EQ(reversed.flow(0, 1), 2);
}

MatchLpSpec literal(std::vector<Capacity> caps,
                    std::vector<std::pair<int, std::vector<double>>> cases) {
  MatchLpSpec spec;
  spec.caps = std::move(caps);
  for (auto& [size, u] : cases) {
    LpCase c;
    c.size = size;
    for (double v : u) c.scores.push_back(v);
    spec.cases.push_back(std::move(c));
  }
  return spec;
}

TEST(SolveLp, SingleCase) {
  const MatchLpSpec spec =
      literal({Capacity::Finite(1), Capacity::Infinite()}, {{1, {5, 0}}});
  const LpSolution s = solve_lp(spec);
  EXPECT_EQ(s.at(0, 0), 1.0);
  EXPECT_EQ(s.value, 5.0);
}

// Four integral assignments: (a, a) is infeasible, the best of the rest
// is one case on each affiliate.
TEST(SolveLp, TwoUnitCasesShareOneSlot) {
  const MatchLpSpec spec = literal(
      {Capacity::Finite(1), Capacity::Infinite(), Capacity::Infinite()},
      {{1, {3, 1, 0}}, {1, {3, 1, 0}}});
  EXPECT_NEAR(solve_lp(spec).value, 4.0, 1e-12);
  EXPECT_NEAR(reference::solve_lp(spec).value, 4.0, 1e-9);
}

TEST(ExtremalDuals, UnbindableCapacityIsFree) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 100; ++t) {
    SmallInstance s = testing::random_instance(rng, {});
    int64_t total = 0;
    for (const Case& c : s.cases) total += c.size;
    const size_t l = t % s.sink;
    s.caps.set(l, Capacity::Finite(total + 1 + t % 3));
    const MatchLpSpec spec = to_spec(s);
    EXPECT_EQ(extremal_duals(spec, Extremality::kMaximal).prices[l], 0.0);
    EXPECT_EQ(extremal_duals(spec, Extremality::kMinimal).prices[l], 0.0);
  }
}

}  // namespace
}  // namespace dynmatch::lp
