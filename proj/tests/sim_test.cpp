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

#include <sstream>

#include "dynmatch/data.hpp"
#include "dynmatch/sim.hpp"
#include "dynmatch/svg.hpp"
#include "oracle.hpp"

namespace dynmatch::sim {
namespace {

Instance year(uint64_t seed, bool revision = false) {
  data::GeneratorConfig cfg;
  cfg.num_affiliates = 6;
  cfg.total_refugees = 250;
  cfg.seed = seed;
  cfg.revision = revision;
  return data::generate(cfg);
}

ReplayConfig policy(potentials::Method m, int k = 2) {
  ReplayConfig rc;
  rc.policy.method = m;
  rc.policy.k = k;
  rc.policy.seed = 1;
  return rc;
}

// Capacity, compatibility and bookkeeping invariants of one replay.
// `bounded`: the benchmark uses the capacities the policy ran under.
void expect_consistent(const Instance& inst, const ReplayResult& r,
                       bool bounded = true) {
  const size_t sink = inst.sink_index();
  ASSERT_EQ(r.per_arrival.size(), inst.cases.size());
  ASSERT_EQ(r.remaining_after.size(), inst.cases.size());
  double cum = 0.0;
  int64_t refugees = 0;
  int64_t matched = 0;
  for (size_t i = 0; i < inst.cases.size(); ++i) {
    const Case& c = inst.cases[i];
    const ArrivalRecord& a = r.per_arrival[i];
    EXPECT_EQ(a.case_id, c.id);
    if (a.affiliate != sink) {
      EXPECT_TRUE(c.scores[a.affiliate].compatible());
      matched += c.size;
    }
    refugees += c.size;
    cum += a.match_score;
    EXPECT_EQ(a.refugees_so_far, refugees);
    EXPECT_NEAR(a.cumulative_employment, cum, 1e-9);
    EXPECT_NEAR(a.match_score_per_refugee, a.match_score / c.size, 1e-12);
    EXPECT_GE(a.priced_capacity, -1e-12);
    for (int64_t left : r.remaining_after[i]) EXPECT_GE(left, -1);
    for (size_t l = 0; l < r.remaining_after[i].size(); ++l) {
      if (r.remaining_after[i][l] == -1) continue;
      EXPECT_GE(r.remaining_after[i][l], 0);
    }
  }
  EXPECT_NEAR(r.total_employment, cum, 1e-9);
  EXPECT_EQ(r.matched_refugees, matched);
  EXPECT_EQ(r.total_refugees, refugees);
  if (bounded) {
    EXPECT_LE(r.total_employment, r.hindsight_value + 1e-9);
  }
}

TEST(CapacityMode, Names) {
  for (auto m : {CapacityMode::kFinal, CapacityMode::kInitial,
                 CapacityMode::kInitialWithRevision}) {
    EXPECT_EQ(parse_capacity_mode(capacity_mode_name(m)), m);
  }
  EXPECT_THROW(parse_capacity_mode("bogus"), Error);
}

TEST(TriangleSmooth, HandComputed) {
  const std::vector<double> s = {0, 0, 3};
  const auto out = triangle_smooth(s, 1);
  EXPECT_DOUBLE_EQ(out[0], 0.0);
  EXPECT_DOUBLE_EQ(out[1], 0.75);
  EXPECT_DOUBLE_EQ(out[2], 2.0);
  EXPECT_EQ(triangle_smooth(s, 0), s);
  EXPECT_THROW(triangle_smooth(s, -1), Error);
}

TEST(TriangleSmooth, PreservesConstantsAndBounds) {
  std::vector<double> c(40, 2.5);
  for (double v : triangle_smooth(c, 7)) EXPECT_NEAR(v, 2.5, 1e-12);
  std::vector<double> x;
  for (int i = 0; i < 60; ++i) x.push_back((i * 37) % 11);
  for (double v : triangle_smooth(x, 500)) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 10.0);
  }
}

TEST(Replay, EveryPolicyIsConsistent) {
  const Instance inst = year(1);
  std::optional<double> h;
  for (auto m : {potentials::Method::kZero, potentials::Method::kPot1,
                 potentials::Method::kPot2}) {
    const ReplayResult r = replay(inst, policy(m), h);
    h = r.hindsight_value;
    expect_consistent(inst, r);
    EXPECT_GT(r.optimum_ratio, 0.5);
    EXPECT_LE(r.optimum_ratio, 1.0 + 1e-12);
  }
}

TEST(Replay, HindsightIsTheBenchmark) {
  const Instance inst = year(2);
  ReplayConfig rc;
  rc.hindsight = true;
  const ReplayResult r = replay(inst, rc);
  expect_consistent(inst, r);
  EXPECT_EQ(r.policy, "hindsight");
  EXPECT_DOUBLE_EQ(r.optimum_ratio, 1.0);
  EXPECT_DOUBLE_EQ(r.hindsight_value,
                   hindsight_optimum(inst, inst.final_caps).value);
}

TEST(Replay, DeterministicForFixedSeed) {
  const Instance inst = year(3);
  const ReplayResult a = replay(inst, policy(potentials::Method::kPot2));
  const ReplayResult b = replay(inst, policy(potentials::Method::kPot2));
  EXPECT_EQ(a.placement, b.placement);
  EXPECT_EQ(a.total_employment, b.total_employment);
}

TEST(Replay, UnbatchedGreedyIsDirectGreedy) {
  const Instance inst = year(4);
  ReplayConfig rc = policy(potentials::Method::kZero);
  rc.batched = false;
  const ReplayResult r = replay(inst, rc);
  EXPECT_EQ(r.placement,
            testing::direct_greedy(inst, inst.final_caps,
                                   policies::default_tie_order(inst.affiliates)));
}

TEST(Replay, CapacityModes) {
  const Instance inst = year(5, true);
  for (auto mode : {CapacityMode::kFinal, CapacityMode::kInitial,
                    CapacityMode::kInitialWithRevision}) {
    for (bool info_only : {false, true}) {
      ReplayConfig rc = policy(potentials::Method::kPot1, 1);
      rc.capacity_mode = mode;
      rc.revision_info_only = info_only;
      const ReplayResult r = replay(inst, rc);
      expect_consistent(inst, r, mode != CapacityMode::kInitialWithRevision);
      const CapacityProfile& start =
          mode == CapacityMode::kFinal ? inst.final_caps : inst.initial_caps;
      for (size_t l = 0; l < start.size(); ++l) {
        EXPECT_EQ(r.remaining_start[l],
                  start[l].is_infinite() ? -1 : start[l].value());
      }
    }
  }
}

TEST(Replay, RevisionCapsLaterPlacements) {
  const Instance inst = year(6, true);
  ReplayConfig rc = policy(potentials::Method::kZero);
  rc.capacity_mode = CapacityMode::kInitialWithRevision;
  const ReplayResult r = replay(inst, rc);
  const Revision& rev = inst.revisions.front();
  const size_t sink = inst.sink_index();
  // Refugees placed per affiliate at or after the revision's batch never
  // push an affiliate past max(revised, used before the revision).
  const std::vector<BatchRange> batches = inst.batches();
  size_t first = inst.cases.size();
  for (const BatchRange& b : batches) {
    if (inst.cases[b.end - 1].arrival_index >= rev.arrival_index) {
      first = b.begin;
      break;
    }
  }
  std::vector<int64_t> before(inst.affiliates.size(), 0);
  std::vector<int64_t> total(inst.affiliates.size(), 0);
  for (size_t i = 0; i < inst.cases.size(); ++i) {
    const size_t l = r.placement[i];
    total[l] += inst.cases[i].size;
    if (i < first) before[l] += inst.cases[i].size;
  }
  for (size_t l = 0; l < inst.affiliates.size(); ++l) {
    if (l == sink) continue;
    EXPECT_LE(total[l], std::max(rev.caps[l].value(), before[l]));
  }
}

TEST(PricedCapacity, StartsAtOneAndDecreases) {
  const Instance inst = year(7);
  const ReplayResult r = replay(inst, policy(potentials::Method::kZero));
  double prev = 1.0;
  for (const ArrivalRecord& a : r.per_arrival) {
    EXPECT_LE(a.priced_capacity, prev + 1e-12);
    EXPECT_GE(a.priced_capacity, 0.0);
    prev = a.priced_capacity;
  }
  std::vector<double> zero(inst.affiliates.size(), 0.0);
  for (double v : priced_capacity_curve(zero, r)) EXPECT_EQ(v, 1.0);
}

TEST(PricedCapacity, ExplicitPrices) {
  const Instance inst = year(8);
  const ReplayResult r = replay(inst, policy(potentials::Method::kZero));
  std::vector<double> p(inst.affiliates.size(), 0.0);
  p[0] = 1.0;
  const auto curve = priced_capacity_curve(p, r);
  for (size_t t = 0; t < curve.size(); ++t) {
    EXPECT_NEAR(curve[t],
                static_cast<double>(r.remaining_after[t][0]) /
                    static_cast<double>(r.remaining_start[0]),
                1e-12);
  }
}

TEST(Outputs, CsvSummaryAndCharts) {
  const Instance inst = year(9);
  const ReplayResult r = replay(inst, policy(potentials::Method::kZero));
  std::ostringstream csv;
  write_metrics_csv(r, csv);
  std::istringstream lines(csv.str());
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header.rfind("arrival_index,case_id,affiliate", 0), 0u);
  size_t rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  EXPECT_EQ(rows, inst.cases.size());
  const nlohmann::json s = summary_json(r);
  EXPECT_EQ(s["policy"], "greedy");
  EXPECT_EQ(s["arrivals"], inst.cases.size());
  EXPECT_DOUBLE_EQ(match_fraction(r), s["matched_refugee_fraction"].get<double>());

  const std::vector<ReplayResult> runs = {r};
  const svg::Figures f = svg::figures(runs, 20);
  for (const std::string* doc :
       {&f.employment, &f.match_score, &f.priced_capacity, &f.cumulative}) {
    EXPECT_EQ(doc->rfind("<svg", 0), 0u);
    EXPECT_NE(doc->find("greedy"), std::string::npos);
    EXPECT_NE(doc->find("</svg>"), std::string::npos);
  }
}

TEST(MatchFraction, EmptyIsOne) {
  ReplayResult r;
  EXPECT_EQ(match_fraction(r), 1.0);
}

TEST(TriangleSmooth, UnitImpulseGivesTriangle) {
  const int w = 5;
  std::vector<double> x(41, 0.0);
  x[20] = 1.0;
  const auto out = triangle_smooth(x, w);
  const double norm = (w + 1) * (w + 1);  // sum of the weights
  double mass = 0.0;
  for (int i = 0; i < 41; ++i) {
    const int d = std::abs(i - 20);
    EXPECT_NEAR(out[i], d <= w ? (w + 1 - d) / norm : 0.0, 1e-15) << i;
    EXPECT_DOUBLE_EQ(out[i], out[40 - i]);
    mass += out[i];
  }
  EXPECT_NEAR(mass, 1.0, 1e-12);
}

TEST(Replay, GreedyIsOptimalWithoutBindingCapacity) {
  Instance inst = year(11);
  std::vector<Capacity> big;
  for (size_t l = 0; l < inst.affiliates.size(); ++l) {
    big.push_back(l == inst.sink_index() ? Capacity::Infinite()
                                         : Capacity::Finite(100000));
  }
  inst.initial_caps = inst.final_caps = CapacityProfile(big);
  const ReplayResult r = replay(inst, policy(potentials::Method::kZero));
  EXPECT_NEAR(r.optimum_ratio, 1.0, 1e-12);
}

TEST(Replay, TightYearsFavorPotentialsAtK9) {
  double greedy = 0.0, pot = 0.0;
  for (uint64_t seed = 1; seed <= 50; ++seed) {
    data::GeneratorConfig cfg;
    cfg.num_affiliates = 12;
    cfg.total_refugees = 980;
    cfg.seed = seed;
    const Instance inst = data::generate(cfg);
    const ReplayResult g = replay(inst, policy(potentials::Method::kZero));
    const ReplayResult p =
        replay(inst, policy(potentials::Method::kPot2, 9), g.hindsight_value);
    greedy += g.optimum_ratio / 50;
    pot += p.optimum_ratio / 50;
  }
  EXPECT_LT(greedy, pot);
}

TEST(PricedCapacity, HindsightSpendsNearlyEverything) {
  data::GeneratorConfig cfg;
  cfg.num_affiliates = 8;
  cfg.total_refugees = 600;
  cfg.tightness = 1.0;
  cfg.seed = 12;
  const Instance inst = data::generate(cfg);
  ReplayConfig h;
  h.hindsight = true;
  const ReplayResult opt = replay(inst, h);
  const ReplayResult g = replay(inst, policy(potentials::Method::kZero),
                                opt.hindsight_value);
  const auto prices = year_prices(inst);
  const auto oc = priced_capacity_curve(prices, opt);
  const auto gc = priced_capacity_curve(prices, g);
  EXPECT_LT(oc.back(), 0.05);
  const size_t mid = (oc.size() - 1) / 2;
  EXPECT_LT(gc[mid], oc[mid]);
}

TEST(PricedCapacity, NothingPlacedStaysFlat) {
  Instance inst = year(13);
  const size_t sink = inst.sink_index();
  for (Case& c : inst.cases) {
    for (size_t l = 0; l < sink; ++l) {
      c.scores[l] = Score::Incompatible(c.scores[l].estimate().value_or(0));
    }
  }
  const ReplayResult r = replay(inst, policy(potentials::Method::kZero), 1.0);
  std::vector<double> p(inst.affiliates.size(), 1.0);
  p[sink] = 0.0;
  for (double v : priced_capacity_curve(p, r)) EXPECT_EQ(v, 1.0);
}

}  // namespace
}  // namespace dynmatch::sim
