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

// Exact integral matching: branch-and-bound over the transportation LP
// relaxation, the hindsight optimum, and the matched-refugee accounting.

#ifndef DYNMATCH_MATCHING_HPP_
#define DYNMATCH_MATCHING_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "dynmatch/lp.hpp"
#include "dynmatch/model.hpp"

namespace dynmatch {

struct Assignment {
  std::vector<size_t> placement;  // affiliate per case
  double value = 0.0;             // sum of u at the placements
  double objective = 0.0;         // value - sum s p + eps * matched size
  std::vector<int64_t> consumed;  // refugees placed per affiliate
  int64_t matched_refugees = 0;   // refugees not at the sink
  bool proven_optimal = true;     // false only if the node limit was hit
  int64_t nodes = 0;              // branch-and-bound nodes evaluated
};

struct IlpOptions {
  std::span<const double> potentials;  // empty: all zero
  double epsilon_matched = 0.0;        // per-refugee bonus off the sink
  // Affiliate preference for ties, first preferred; empty: index order.
  std::span<const size_t> tie_order;
  int64_t node_limit = 200000;
};

// Bonus used when none is configured: 1e-6 / (1 + total refugees).
double default_epsilon(int64_t total_refugees);

// Maximizes sum (u - s p + eps s [l != sink]) x over integral placements
// that respect `caps`, on compatible pairs only. `sink` must have infinite
// capacity.
Assignment solve_ilp(std::span<const Case> cases, const CapacityProfile& caps,
                     size_t sink, const IlpOptions& options = {});

// Employment value of the best integral matching.
double opt(std::span<const Case> cases, const CapacityProfile& caps,
           size_t sink);

// Best year-long matching under `caps`, then every case left at the sink
// that scores zero at an affiliate with room is moved there, in arrival
// order and tie order.
Assignment hindsight_optimum(const Instance& instance,
                             const CapacityProfile& caps,
                             std::span<const size_t> tie_order = {});

// Recomputes value, consumed and matched_refugees from `placement`.
// Incompatible placements (forced overrides) count their estimate, or 0.
void recompute_totals(std::span<const Case> cases, size_t sink,
                      size_t num_affiliates, Assignment& a);

}  // namespace dynmatch

#endif  // DYNMATCH_MATCHING_HPP_
