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

#include <cmath>
#include <random>
#include <set>

#include "dynmatch/data.hpp"
#include "dynmatch/potentials.hpp"
#include "oracle.hpp"

namespace dynmatch::potentials {
namespace {

std::vector<Case> pool_with_days(const std::vector<int>& days) {
  std::vector<Case> pool;
  for (size_t i = 0; i < days.size(); ++i) {
    Case c;
    c.id = "h" + std::to_string(i);
    c.size = 1 + static_cast<int>(i % 3);
    c.day = days[i];
    c.scores = {Score::Of(0.5), Score::Of(0.0)};
    pool.push_back(c);
  }
  return pool;
}

TEST(Seeds, DeterministicAndDistinct) {
  EXPECT_EQ(splitmix64(42), splitmix64(42));
  std::set<uint64_t> seen;
  for (uint64_t c = 0; c < 4; ++c) {
    for (uint64_t t = 0; t < 8; ++t) {
      for (uint64_t a = 0; a < 2; ++a) {
        seen.insert(trajectory_seed(7, c, t, a));
      }
    }
  }
  EXPECT_EQ(seen.size(), 64u);
  EXPECT_NE(trajectory_seed(7, 0, 0, 0), trajectory_seed(8, 0, 0, 0));
}

TEST(TrajectoryConfig, Check) {
  TrajectoryConfig c;
  EXPECT_NO_THROW(c.check());
  c.k = 0;
  EXPECT_THROW(c.check(), Error);
}

TEST(SamplingWindow, RecentHalfYear) {
  std::vector<int> days;
  for (int d = -300; d <= 0; d += 2) days.push_back(d);
  const auto pool = pool_with_days(days);
  const SamplingWindow w(pool, 0, 182, 30);
  EXPECT_EQ(w.span_days(), 182);
  for (size_t i = 0; i < w.size(); ++i) {
    EXPECT_GT(w[i].day, -182);
    EXPECT_LE(w[i].day, 0);
  }
  EXPECT_EQ(w.size(), 91u);  // even days in (-182, 0]
}

TEST(SamplingWindow, WidensWhenSparse) {
  std::vector<int> days;
  for (int d = -360; d <= -200; d += 4) days.push_back(d);
  for (int d = -20; d <= 0; d += 2) days.push_back(d);
  const auto pool = pool_with_days(days);
  const SamplingWindow year(pool, 0, 182, 30);
  EXPECT_EQ(year.span_days(), 365);
  EXPECT_EQ(year.size(), pool.size());
  const SamplingWindow all(pool, 0, 182, 1000);
  EXPECT_EQ(all.span_days(), 0);
  EXPECT_EQ(all.size(), pool.size());
  EXPECT_THROW(SamplingWindow({}, 0, 182, 30), Error);
}

TEST(SamplingWindow, SampleDrawsMembers) {
  const auto pool = pool_with_days({-5, -4, -3, -2, -1});
  const SamplingWindow w(pool, 0, 182, 1);
  EXPECT_DOUBLE_EQ(w.mean_size(), (1 + 2 + 3 + 1 + 2) / 5.0);
  std::mt19937_64 a(3), b(3);
  const auto s1 = w.sample(50, a);
  const auto s2 = w.sample(50, b);
  EXPECT_EQ(s1, s2);
  ASSERT_EQ(s1.size(), 50u);
  for (const Case* c : s1) {
    EXPECT_GE(c, pool.data());
    EXPECT_LT(c, pool.data() + pool.size());
  }
}

TEST(SamplingWindow, EdgeCasesAndMeanSize) {
  const auto one = pool_with_days({-1});
  const SamplingWindow w1(one, 0, 182, 1);
  std::mt19937_64 rng(8);
  EXPECT_TRUE(w1.sample(0, rng).empty());
  const auto three = w1.sample(3, rng);
  ASSERT_EQ(three.size(), 3u);
  for (const Case* c : three) EXPECT_EQ(c, &one[0]);

  std::vector<int> days(60, -3);
  const auto pool = pool_with_days(days);  // sizes 1, 2, 3 repeating
  const SamplingWindow w(pool, 0, 182, 1);
  double mean = 0.0, var = 0.0;
  for (const Case& c : pool) mean += c.size;
  mean /= static_cast<double>(pool.size());
  for (const Case& c : pool) var += (c.size - mean) * (c.size - mean);
  var /= static_cast<double>(pool.size());
  const int draws = 10000;
  double total = 0.0;
  for (const Case* c : w.sample(draws, rng)) total += c->size;
  EXPECT_LE(std::abs(total / draws - mean), 3.0 * std::sqrt(var / draws));
}

struct Fixture {
  Instance inst;
  std::vector<Case> batch;
};

Fixture fixture(uint64_t seed, double tightness = 0.95) {
  data::GeneratorConfig cfg;
  cfg.num_affiliates = 6;
  cfg.total_refugees = 300;
  cfg.tightness = tightness;
  cfg.seed = seed;
  Fixture f;
  f.inst = data::generate(cfg);
  const BatchRange b = f.inst.batches().front();
  f.batch.assign(f.inst.cases.begin() + b.begin, f.inst.cases.begin() + b.end);
  return f;
}

TEST(Potentials, ZeroLengthGivesZeros) {
  const Fixture f = fixture(1);
  const SamplingWindow w(f.inst.history_pool, 0, 182, 30);
  TrajectoryConfig cfg;
  const PotentialVector a = pot1(f.inst.final_caps, w, 0, cfg, 0);
  const PotentialVector b = pot2(f.inst.final_caps, f.batch, w, 0, cfg, 0);
  for (double v : a.p) EXPECT_EQ(v, 0.0);
  for (double v : b.p) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(a.method, Method::kPot1);
  EXPECT_EQ(b.method, Method::kPot2);
}

TEST(Potentials, AverageOfExplicitTrajectories) {
  const Fixture f = fixture(2);
  const SamplingWindow w(f.inst.history_pool, 0, 182, 30);
  TrajectoryConfig cfg;
  cfg.k = 4;
  cfg.seed = 99;
  const CapacityProfile& caps = f.inst.final_caps;
  const int64_t length = 90;
  for (Method method : {Method::kPot1, Method::kPot2}) {
    const PotentialVector got =
        method == Method::kPot1 ? pot1(caps, w, length, cfg, 3)
                                : pot2(caps, f.batch, w, length, cfg, 3);
    std::vector<double> want(caps.size(), 0.0);
    for (int j = 0; j < cfg.k; ++j) {
      std::mt19937_64 rng(trajectory_seed(99, 3, static_cast<uint64_t>(j), 0));
      std::vector<const Case*> cases;
      if (method == Method::kPot2) {
        for (const Case& c : f.batch) cases.push_back(&c);
      }
      for (const Case* c : w.sample(length, rng)) cases.push_back(c);
      const auto p = trajectory_prices(
          caps, cases,
          method == Method::kPot1 ? lp::Extremality::kMaximal
                                  : lp::Extremality::kMinimal,
          Backend::kSimplex);
      for (size_t l = 0; l < caps.size(); ++l) want[l] += p[l] / cfg.k;
    }
    for (size_t l = 0; l < caps.size(); ++l) {
      EXPECT_NEAR(got.p[l], want[l], 1e-6) << method_name(method) << " " << l;
    }
  }
}

TEST(Potentials, SerialAndParallelAgreeExactly) {
  const Fixture f = fixture(3);
  const SamplingWindow w(f.inst.history_pool, 0, 182, 30);
  TrajectoryConfig cfg;
  cfg.k = 6;
  cfg.seed = 5;
  cfg.execution = Execution::kSerial;
  const PotentialVector s = pot2(f.inst.final_caps, f.batch, w, 120, cfg, 0);
  cfg.execution = Execution::kParallel;
  const PotentialVector p = pot2(f.inst.final_caps, f.batch, w, 120, cfg, 0);
  EXPECT_EQ(s.p, p.p);
}

TEST(Potentials, NonNegativeAndZeroOnInfinite) {
  const Fixture f = fixture(4);
  const SamplingWindow w(f.inst.history_pool, 0, 182, 30);
  TrajectoryConfig cfg;
  const PotentialVector p = pot1(f.inst.final_caps, w, 150, cfg, 0);
  for (size_t l = 0; l < p.p.size(); ++l) {
    EXPECT_GE(p.p[l], 0.0);
    if (f.inst.final_caps[l].is_infinite()) {
      EXPECT_EQ(p.p[l], 0.0);
    }
  }
}

TEST(Potentials, SlackCapacityIsFree) {
  const Fixture f = fixture(5);
  std::vector<Capacity> big(f.inst.final_caps.size(), Capacity::Finite(100000));
  big[f.inst.sink_index()] = Capacity::Infinite();
  const SamplingWindow w(f.inst.history_pool, 0, 182, 30);
  TrajectoryConfig cfg;
  const PotentialVector p = pot2(CapacityProfile(big), f.batch, w, 100, cfg, 0);
  for (double v : p.p) EXPECT_NEAR(v, 0.0, 1e-9);
}

// One unit-size trajectory: Pot1 prices are marginal losses of one unit.
TEST(Potentials, SingleTrajectoryMarginalValues) {
  std::mt19937_64 gen(6);
  testing::RandomSpec rs;
  rs.unit = true;
  rs.max_cases = 12;
  rs.max_real = 3;
  rs.max_capacity = 3;
  for (int t = 0; t < 30; ++t) {
    testing::SmallInstance s = testing::random_instance(gen, rs);
    for (Case& c : s.cases) c.day = -1;
    const SamplingWindow w(s.cases, 0, 182, 1);
    TrajectoryConfig cfg;
    cfg.k = 1;
    cfg.seed = static_cast<uint64_t>(t);
    const int64_t length = 10;
    const PotentialVector got = pot1(s.caps, w, length, cfg, 0);
    std::mt19937_64 rng(trajectory_seed(cfg.seed, 0, 0, 0));
    std::vector<Case> sample;
    for (const Case* c : w.sample(length, rng)) sample.push_back(*c);
    const double base = testing::dp_opt(sample, s.caps, s.sink);
    for (size_t l = 0; l < s.sink; ++l) {
      if (s.caps[l].value() < 1) continue;
      const double down =
          testing::dp_opt(sample, testing::shifted(s.caps, l, -1), s.sink);
      EXPECT_NEAR(got.p[l], base - down, 1e-6);
    }
  }
}

// One unit-size trajectory: some optimal matching of batch plus future
// gives every case an affiliate maximizing u - p at the Pot2 prices.
TEST(Potentials, Pot2PricesSupportAnOptimalMatching) {
  std::mt19937_64 gen(7);
  testing::RandomSpec rs;
  rs.unit = true;
  rs.max_cases = 10;
  rs.max_real = 3;
  rs.max_capacity = 3;
  for (int t = 0; t < 40; ++t) {
    testing::SmallInstance s = testing::random_instance(gen, rs);
    for (Case& c : s.cases) c.day = -1;
    const size_t nb = std::min<size_t>(3, s.cases.size());
    const std::vector<Case> batch(s.cases.begin(), s.cases.begin() + nb);
    const SamplingWindow w(s.cases, 0, 182, 1);
    TrajectoryConfig cfg;
    cfg.k = 1;
    cfg.seed = static_cast<uint64_t>(t);
    const int64_t length = 6;
    const PotentialVector got = pot2(s.caps, batch, w, length, cfg, 0);
    std::mt19937_64 rng(trajectory_seed(cfg.seed, 0, 0, 0));
    std::vector<Case> all = batch;
    for (const Case* c : w.sample(length, rng)) all.push_back(*c);
    const size_t m = s.num_affiliates();
    std::vector<uint8_t> demanded(all.size() * m, 0);
    for (size_t i = 0; i < all.size(); ++i) {
      double best = 0.0;  // the sink
      for (size_t l = 0; l < m; ++l) {
        if (all[i].scores[l].compatible()) {
          best = std::max(best, all[i].scores[l].value() - got.p[l]);
        }
      }
      for (size_t l = 0; l < m; ++l) {
        demanded[i * m + l] =
            (l == s.sink || all[i].scores[l].compatible()) &&
            (l == s.sink ? 0.0 : all[i].scores[l].value() - got.p[l]) >=
                best - 1e-9;
      }
    }
    const double opt = testing::dp_opt(all, s.caps, s.sink);
    EXPECT_NEAR(testing::dp_opt(all, s.caps, s.sink, &demanded), opt, 1e-9)
        << "instance " << t;
  }
}

double spread(const Fixture& f, int k, int repeats) {
  const SamplingWindow w(f.inst.history_pool, 0, 365, 30);
  TrajectoryConfig cfg;
  cfg.k = k;
  cfg.seed = 17;
  std::vector<std::vector<double>> runs;
  for (int r = 0; r < repeats; ++r) {
    runs.push_back(pot1(f.inst.final_caps, w, 60, cfg,
                        static_cast<uint64_t>(r)).p);
  }
  double total = 0.0;
  for (size_t l = 0; l < f.inst.final_caps.size(); ++l) {
    double mean = 0.0, var = 0.0;
    for (const auto& p : runs) mean += p[l];
    mean /= repeats;
    for (const auto& p : runs) var += (p[l] - mean) * (p[l] - mean);
    total += std::sqrt(var / (repeats - 1));
  }
  return total;
}

// The sample spread of the averaged prices falls like 1 / sqrt(k).
TEST(Potentials, SpreadShrinksWithK) {
  const Fixture f = fixture(8);
  const double s1 = spread(f, 1, 60);
  const double s9 = spread(f, 9, 60);
  const double s81 = spread(f, 81, 60);
  ASSERT_GT(s81, 0.0);
  EXPECT_GE(s1 / s9, 3.0 / 2.0);
  EXPECT_LE(s1 / s9, 3.0 * 2.0);
  EXPECT_GE(s9 / s81, 3.0 / 2.0);
  EXPECT_LE(s9 / s81, 3.0 * 2.0);
}

}  // namespace
}  // namespace dynmatch::potentials
