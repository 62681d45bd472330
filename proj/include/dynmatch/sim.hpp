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

// Fiscal-year replay and the metrics derived from it.

#ifndef DYNMATCH_SIM_HPP_
#define DYNMATCH_SIM_HPP_

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "dynmatch/model.hpp"
#include "dynmatch/policies.hpp"
#include "json.hpp"

namespace dynmatch::sim {

enum class CapacityMode { kFinal, kInitial, kInitialWithRevision };

const char* capacity_mode_name(CapacityMode m);
CapacityMode parse_capacity_mode(const std::string& name);

struct ReplayConfig {
  policies::PolicyConfig policy;
  bool hindsight = false;  // replay the hindsight optimum instead of a policy
  bool batched = true;     // false: every case is allocated on its own
  CapacityMode capacity_mode = CapacityMode::kFinal;
  // kInitialWithRevision only: revisions change the expected arrivals but
  // not the capacities.
  bool revision_info_only = false;
};

struct ArrivalRecord {
  int arrival_index = 0;
  std::string case_id;
  size_t affiliate = 0;
  int64_t refugees_so_far = 0;
  double match_score = 0.0;
  double match_score_per_refugee = 0.0;
  double cumulative_employment = 0.0;
  double priced_capacity = 1.0;
};

struct ReplayResult {
  std::vector<ArrivalRecord> per_arrival;
  std::vector<size_t> placement;  // per case, arrival order
  // Finite remaining capacity per affiliate before the first and after
  // every arrival; -1 marks an infinite capacity.
  std::vector<int64_t> remaining_start;
  std::vector<std::vector<int64_t>> remaining_after;

  double total_employment = 0.0;
  double hindsight_value = 0.0;
  double optimum_ratio = 1.0;
  int64_t matched_refugees = 0;
  int64_t total_refugees = 0;
  double matched_refugee_fraction = 1.0;

  std::string policy;
  std::string capacity_mode;
  int k = 0;
  uint64_t seed = 0;
  double seconds = 0.0;
};

// Capacities the hindsight benchmark uses in each mode; revised runs are
// measured against the final capacities.
const CapacityProfile& benchmark_caps(const Instance& instance,
                                      CapacityMode mode);

// `hindsight_value` skips recomputing the benchmark when known.
ReplayResult replay(const Instance& instance, const ReplayConfig& config,
                    std::optional<double> hindsight_value = std::nullopt);

// Maximal capacity prices of the full-year LP under the final capacities.
std::vector<double> year_prices(const Instance& instance);

// sum_l p_l remaining_l after each arrival divided by the starting value;
// all ones when the starting value is 0.
std::vector<double> priced_capacity_curve(const Instance& instance,
                                          const ReplayResult& result);
std::vector<double> priced_capacity_curve(std::span<const double> prices,
                                          const ReplayResult& result);

// Weights (width + 1 - |d|) for |d| <= width, truncated and renormalized
// at the ends.
std::vector<double> triangle_smooth(std::span<const double> series,
                                    int width = 500);

// Refugees placed at real affiliates over all refugees; 1 when empty.
double match_fraction(const ReplayResult& result);

void write_metrics_csv(const ReplayResult& result, std::ostream& out);
nlohmann::json summary_json(const ReplayResult& result);

}  // namespace dynmatch::sim

#endif  // DYNMATCH_SIM_HPP_
