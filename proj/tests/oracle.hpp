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

// Brute-force oracles and random instance generators shared by the unit,
// property and acceptance tests. Nothing here calls the LP or the
// branch-and-bound code.

#ifndef DYNMATCH_TESTS_ORACLE_HPP_
#define DYNMATCH_TESTS_ORACLE_HPP_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dynmatch/model.hpp"

namespace dynmatch::testing {

struct RandomSpec {
  int max_cases = 8;
  int max_real = 4;  // real affiliates; the sink is appended last
  int max_size = 4;
  bool unit = false;
  int max_capacity = 8;
  double incompatible_rate = 0.2;
  double infinite_rate = 0.0;  // real affiliates with infinite capacity
  int denominator = 8;         // scores are multiples of 1/denominator
};

struct SmallInstance {
  std::vector<Case> cases;
  CapacityProfile caps;
  size_t sink = 0;
  size_t num_affiliates() const { return caps.size(); }
};

inline SmallInstance random_instance(std::mt19937_64& rng,
                                     const RandomSpec& spec) {
  std::uniform_int_distribution<int> ncases(1, spec.max_cases);
  std::uniform_int_distribution<int> nreal(1, spec.max_real);
  std::uniform_int_distribution<int> size(1, spec.unit ? 1 : spec.max_size);
  std::uniform_int_distribution<int> cap(0, spec.max_capacity);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  SmallInstance out;
  const int m = nreal(rng);
  std::vector<Capacity> caps;
  for (int l = 0; l < m; ++l) {
    caps.push_back(unif(rng) < spec.infinite_rate ? Capacity::Infinite()
                                                  : Capacity::Finite(cap(rng)));
  }
  caps.push_back(Capacity::Infinite());
  out.caps = CapacityProfile(caps);
  out.sink = static_cast<size_t>(m);
  const int n = ncases(rng);
  for (int i = 0; i < n; ++i) {
    Case c;
    c.id = "c" + std::to_string(i + 1);
    c.size = size(rng);
    c.arrival_index = i + 1;
    std::uniform_int_distribution<int> num(0, spec.denominator * c.size);
    for (int l = 0; l < m; ++l) {
      const double v = static_cast<double>(num(rng)) / spec.denominator;
      c.scores.push_back(unif(rng) < spec.incompatible_rate
                             ? Score::Incompatible(v)
                             : Score::Of(v));
    }
    c.scores.push_back(Score::Of(0.0));
    out.cases.push_back(std::move(c));
  }
  return out;
}

inline std::vector<Affiliate> affiliates_for(const SmallInstance& s) {
  std::vector<Affiliate> out;
  for (size_t l = 0; l < s.num_affiliates(); ++l) {
    Affiliate a;
    a.id = l == s.sink ? "sink" : "a" + std::to_string(l + 1);
    a.capacity = s.caps[l];
    a.is_unmatched_sink = l == s.sink;
    out.push_back(a);
  }
  return out;
}

inline Instance to_instance(const SmallInstance& s) {
  Instance inst;
  inst.affiliates = affiliates_for(s);
  inst.cases = s.cases;
  for (size_t i = 0; i < inst.cases.size(); ++i) {
    inst.cases[i].batch_id = static_cast<int>(i);
  }
  inst.initial_caps = s.caps;
  inst.final_caps = s.caps;
  return inst;
}

struct BruteResult {
  double objective = -std::numeric_limits<double>::infinity();
  double value = 0.0;
  std::vector<size_t> placement;
  int64_t leaves = 0;
};

// Exhaustive enumeration of every placement of every case on compatible,
// fitting affiliates (the sink always). Objective per case is
// u - s p + eps s off the sink.
inline BruteResult brute_force(std::span<const Case> cases,
                               const CapacityProfile& caps, size_t sink,
                               std::span<const double> p = {},
                               double eps = 0.0) {
  const size_t n = cases.size();
  const size_t m = caps.size();
  BruteResult best;
  std::vector<size_t> cur(n, sink);
  std::vector<int64_t> left(m, 0);
  for (size_t l = 0; l < m; ++l) {
    left[l] = caps[l].is_infinite() ? std::numeric_limits<int64_t>::max()
                                    : caps[l].value();
  }
  auto rec = [&](auto&& self, size_t i, double obj, double val) -> void {
    if (i == n) {
      ++best.leaves;
      if (obj > best.objective) {
        best.objective = obj;
        best.value = val;
        best.placement = cur;
      }
      return;
    }
    const Case& c = cases[i];
    for (size_t l = 0; l < m; ++l) {
      if (l != sink && !c.scores[l].compatible()) continue;
      if (left[l] < c.size) continue;
      double o = 0.0;
      double v = 0.0;
      if (l != sink) {
        v = c.scores[l].value();
        o = v - c.size * (p.empty() ? 0.0 : p[l]) + eps * c.size;
      }
      left[l] -= c.size;
      cur[i] = l;
      self(self, i + 1, obj + o, val + v);
      left[l] += c.size;
    }
    cur[i] = sink;
  };
  rec(rec, 0, 0.0, 0.0);
  return best;
}

// Best total employment by dynamic programming over remaining capacity
// vectors. `allowed` (cases x affiliates), when given, further restricts
// the pairs. Returns -inf when nothing is feasible.
inline double dp_opt(std::span<const Case> cases, const CapacityProfile& caps,
                     size_t sink, const std::vector<uint8_t>* allowed = nullptr) {
  const size_t n = cases.size();
  const size_t m = caps.size();
  int64_t total = 0;
  for (const Case& c : cases) total += c.size;
  std::vector<int64_t> start(m);
  for (size_t l = 0; l < m; ++l) {
    start[l] = caps[l].is_infinite() ? total : std::min(total, caps[l].value());
  }
  std::map<std::pair<size_t, std::vector<int64_t>>, double> memo;
  const double kNone = -std::numeric_limits<double>::infinity();
  auto rec = [&](auto&& self, size_t i, std::vector<int64_t>& left) -> double {
    if (i == n) return 0.0;
    const auto key = std::make_pair(i, left);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    double best = kNone;
    const Case& c = cases[i];
    for (size_t l = 0; l < m; ++l) {
      if (allowed && !(*allowed)[i * m + l]) continue;
      if (l != sink && !c.scores[l].compatible()) continue;
      if (left[l] < c.size) continue;
      left[l] -= c.size;
      const double rest = self(self, i + 1, left);
      left[l] += c.size;
      if (rest == kNone) continue;
      best = std::max(best, rest + (l == sink ? 0.0 : c.scores[l].value()));
    }
    memo.emplace(key, best);
    return best;
  };
  return rec(rec, 0, start);
}

inline CapacityProfile shifted(const CapacityProfile& caps, size_t l,
                               int64_t delta) {
  CapacityProfile out = caps;
  out.set(l, Capacity::Finite(caps[l].value() + delta));
  return out;
}

// Greedy written directly: each case goes to the compatible affiliate with
// room and the highest score, ties by `tie_order`, else to the sink.
inline std::vector<size_t> direct_greedy(const Instance& inst,
                                         const CapacityProfile& caps,
                                         std::span<const size_t> tie_order) {
  const size_t sink = inst.sink_index();
  CapacityProfile left = caps;
  std::vector<size_t> out;
  for (const Case& c : inst.cases) {
    std::optional<size_t> best;
    double best_u = 0.0;
    for (size_t l : tie_order) {
      if (l == sink || !c.scores[l].compatible() || !left[l].fits(c.size)) {
        continue;
      }
      if (!best || c.scores[l].value() > best_u) {
        best = l;
        best_u = c.scores[l].value();
      }
    }
    const size_t l = best.value_or(sink);
    if (!left[l].is_infinite()) left.decrement(l, c.size);
    out.push_back(l);
  }
  return out;
}

}  // namespace dynmatch::testing

#endif  // DYNMATCH_TESTS_ORACLE_HPP_
