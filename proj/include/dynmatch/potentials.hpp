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

// Capacity potentials estimated from sampled future arrivals.
//
// Pot1 averages the maximal capacity prices of the LP over a sampled
// future. Pot2 adds the current batch to each sampled future and averages
// the minimal prices instead.

#ifndef DYNMATCH_POTENTIALS_HPP_
#define DYNMATCH_POTENTIALS_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "dynmatch/lp.hpp"
#include "dynmatch/model.hpp"

namespace dynmatch::potentials {

enum class Method { kZero, kPot1, kPot2 };
enum class Execution { kSerial, kParallel };
enum class Backend { kTransport, kSimplex };

const char* method_name(Method m);

struct TrajectoryConfig {
  int k = 5;
  int lookback_days = 182;
  // Fewer cases than this in the window widens it to a year, then to the
  // whole pool.
  int min_window_cases = 30;
  uint64_t seed = 0;
  Execution execution = Execution::kParallel;
  Backend backend = Backend::kTransport;

  void check() const;  // throws Error("invalid_config")
};

struct PotentialVector {
  std::vector<double> p;  // per refugee, one per affiliate
  Method method = Method::kZero;
  int k_used = 0;
};

uint64_t splitmix64(uint64_t x);

// Seed of one trajectory attempt, independent of scheduling.
uint64_t trajectory_seed(uint64_t run_seed, uint64_t computation,
                         uint64_t trajectory, uint64_t attempt);

// The cases sampled from: those of `pool` with day in (now - lookback, now],
// widened as described in TrajectoryConfig.
class SamplingWindow {
 public:
  // Throws Error("empty_history") if `pool` is empty.
  SamplingWindow(std::span<const Case> pool, int now_day, int lookback_days,
                 int min_cases = 30);

  size_t size() const { return members_.size(); }
  const Case& operator[](size_t i) const { return *members_[i]; }
  int span_days() const { return span_days_; }  // 0 means the whole pool
  double mean_size() const;

  // `length` i.i.d. uniform draws with replacement.
  std::vector<const Case*> sample(int64_t length, std::mt19937_64& rng) const;

 private:
  std::vector<const Case*> members_;
  int span_days_ = 0;
};

// Pot1 with `length` future cases per trajectory. Length 0 gives zeros.
// `computation` distinguishes successive calls within one run.
PotentialVector pot1(const CapacityProfile& caps, const SamplingWindow& window,
                     int64_t length, const TrajectoryConfig& config,
                     uint64_t computation);

PotentialVector pot2(const CapacityProfile& caps, std::span<const Case> batch,
                     const SamplingWindow& window, int64_t length,
                     const TrajectoryConfig& config, uint64_t computation);

// Capacity prices of one explicit case list; the building block of both
// procedures, exposed for tests.
std::vector<double> trajectory_prices(const CapacityProfile& caps,
                                      std::span<const Case* const> cases,
                                      lp::Extremality sense, Backend backend);

}  // namespace dynmatch::potentials

#endif  // DYNMATCH_POTENTIALS_HPP_
