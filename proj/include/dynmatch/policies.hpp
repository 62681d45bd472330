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

// Online allocation: potential match (one case at a time), potential match
// with batching, and greedy as the zero-potential special case. The Engine
// also tracks how many arrivals are still expected.

#ifndef DYNMATCH_POLICIES_HPP_
#define DYNMATCH_POLICIES_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dynmatch/matching.hpp"
#include "dynmatch/model.hpp"
#include "dynmatch/potentials.hpp"

namespace dynmatch::policies {

enum class ArrivalMode { kKnownN, kCapacityFraction, kManualOverride };

const char* arrival_mode_name(ArrivalMode m);

// Used for the case-size average when nothing has been observed yet.
inline constexpr double kDefaultCaseSize = 2.5;

struct PolicyConfig {
  potentials::Method method = potentials::Method::kZero;
  int k = 5;
  // Affiliate preference on ties, first preferred. Empty: index order with
  // the sink last.
  std::vector<size_t> tie_order;
  // Per-refugee bonus off the sink. Unset: default_epsilon of the batch.
  std::optional<double> epsilon_matched;
  ArrivalMode arrival_mode = ArrivalMode::kCapacityFraction;
  double capacity_fraction = 0.91;
  std::optional<double> predicted_total_refugees;  // kManualOverride
  int lookback_days = 182;
  int min_window_cases = 30;
  uint64_t seed = 0;
  potentials::Execution execution = potentials::Execution::kParallel;
  potentials::Backend backend = potentials::Backend::kTransport;

  void check() const;  // throws Error("invalid_config")
};

struct Decision {
  std::string case_id;
  size_t affiliate = 0;
  bool forced = false;  // incompatible placement confirmed by a person
};

struct EngineState {
  CapacityProfile governing;  // capacities in force (initial or revised)
  CapacityProfile remaining;
  std::vector<int64_t> used;  // refugees placed per affiliate
  int64_t arrived_refugees = 0;
  int64_t arrived_cases = 0;
  double expected_total_refugees = 0.0;  // capacity-based modes
  uint64_t computations = 0;             // potential computations so far
  std::vector<Decision> log;
};

class Engine {
 public:
  // `history` seeds the sampling pool; committed arrivals join it.
  Engine(std::vector<Affiliate> affiliates, const CapacityProfile& caps,
         std::vector<Case> history, PolicyConfig config);

  const PolicyConfig& config() const { return config_; }
  const EngineState& state() const { return state_; }
  const std::vector<Affiliate>& affiliates() const { return affiliates_; }
  const std::vector<Case>& pool() const { return pool_; }
  std::span<const size_t> tie_order() const { return tie_order_; }
  size_t sink() const { return sink_; }

  // Needed by ArrivalMode::kKnownN.
  void set_known_total_cases(int64_t n) { known_total_cases_ = n; }

  // Cases still expected after `pending_cases` / `pending_refugees` beyond
  // the committed arrivals. `now_day` anchors the case-size window.
  double expected_remaining_cases(int64_t pending_cases,
                                  int64_t pending_refugees, int now_day) const;
  // Average case size over the lookback window, the pool, or the default.
  double average_case_size(int now_day) const;

  // Potentials for allocating `batch` (already observed), per the
  // configured method. Counts as one computation.
  potentials::PotentialVector compute_potentials(std::span<const Case> batch);

  double epsilon_for(std::span<const Case> batch) const;

  // argmax over fitting compatible affiliates of u/s - p + eps, ties by the
  // tie order. Does not change state.
  size_t pm_choice(const Case& c, std::span<const double> p) const;
  // Batch ILP against the current remaining capacities. Does not change
  // state.
  Assignment recommend(std::span<const Case> batch,
                       std::span<const double> p) const;

  // Applies placements. Throws Error("capacity_exceeded") or
  // Error("incompatible_without_force") without changing anything.
  void commit(std::span<const Case> batch, std::span<const size_t> placement,
              std::span<const uint8_t> force = {});

  size_t pm_step(const Case& c);
  Assignment pmb_step(std::span<const Case> batch);

  // remaining = max(0, new - used). With `update_capacities` false only
  // the expected arrival total follows the revision.
  void apply_revision(const CapacityProfile& caps, bool update_capacities = true,
                      bool update_expectation = true);
  // Unset returns to the capacity-fraction rule. Throws
  // Error("invalid_prediction") on non-positive values.
  void set_arrival_prediction(std::optional<double> total_refugees);

  // Reinstates a saved state and sampling pool (crash recovery). The
  // affiliates and configuration stay as constructed.
  void restore(EngineState state, std::vector<Case> pool);

 private:
  std::vector<Affiliate> affiliates_;
  PolicyConfig config_;
  size_t sink_ = 0;
  std::vector<size_t> tie_order_;
  std::vector<size_t> tie_rank_;
  std::vector<Case> pool_;
  EngineState state_;
  int64_t known_total_cases_ = -1;
};

// Index order with the sink moved last.
std::vector<size_t> default_tie_order(std::span<const Affiliate> affiliates);

}  // namespace dynmatch::policies

#endif  // DYNMATCH_POLICIES_HPP_
