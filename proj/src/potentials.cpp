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

#include "dynmatch/potentials.hpp"

#include <exception>

namespace dynmatch::potentials {

const char* method_name(Method m) {
  switch (m) {
    case Method::kZero: return "zero";
    case Method::kPot1: return "pot1";
    case Method::kPot2: return "pot2";
  }
  return "unknown";
}

void TrajectoryConfig::check() const {
  if (k < 1) throw Error("invalid_config", "k must be at least 1");
  if (lookback_days <= 0) {
    throw Error("invalid_config", "lookback must be positive");
  }
  if (min_window_cases < 0) {
    throw Error("invalid_config", "min_window_cases must be non-negative");
  }
}

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t trajectory_seed(uint64_t run_seed, uint64_t computation,
                         uint64_t trajectory, uint64_t attempt) {
  uint64_t h = splitmix64(run_seed);
  h = splitmix64(h ^ computation);
  h = splitmix64(h ^ trajectory);
  return splitmix64(h ^ attempt);
}

SamplingWindow::SamplingWindow(std::span<const Case> pool, int now_day,
                               int lookback_days, int min_cases) {
  if (pool.empty()) {
    throw Error("empty_history", "no past arrivals to sample trajectories from");
  }
  for (int days : {lookback_days, std::max(lookback_days, 365)}) {
    members_.clear();
    for (const Case& c : pool) {
      if (c.day > now_day - days && c.day <= now_day) members_.push_back(&c);
    }
    if (static_cast<int>(members_.size()) >= min_cases && !members_.empty()) {
      span_days_ = days;
      return;
    }
  }
  members_.clear();
  for (const Case& c : pool) members_.push_back(&c);
  span_days_ = 0;
}

double SamplingWindow::mean_size() const {
  double total = 0.0;
  for (const Case* c : members_) total += c->size;
  return total / static_cast<double>(members_.size());
}

std::vector<const Case*> SamplingWindow::sample(int64_t length,
                                                std::mt19937_64& rng) const {
  std::vector<const Case*> out;
  out.reserve(static_cast<size_t>(std::max<int64_t>(0, length)));
  std::uniform_int_distribution<size_t> pick(0, members_.size() - 1);
  for (int64_t i = 0; i < length; ++i) out.push_back(members_[pick(rng)]);
  return out;
}

std::vector<double> trajectory_prices(const CapacityProfile& caps,
                                      std::span<const Case* const> cases,
                                      lp::Extremality sense, Backend backend) {
  lp::MatchLpSpec spec;
  spec.caps.assign(caps.view().begin(), caps.view().end());
  spec.cases.reserve(cases.size());
  for (const Case* c : cases) {
    lp::LpCase row;
    row.size = c->size;
    row.scores.resize(caps.size());
    for (size_t l = 0; l < caps.size(); ++l) {
      if (c->scores.at(l).compatible()) row.scores[l] = c->scores[l].value();
    }
    spec.cases.push_back(std::move(row));
  }
  const lp::DualSolution d = backend == Backend::kTransport
                                 ? lp::extremal_duals(spec, sense)
                                 : lp::reference::extremal_duals(spec, sense);
  return d.prices;
}

namespace {

PotentialVector average(const CapacityProfile& caps,
                        std::span<const Case> batch,
                        const SamplingWindow& window, int64_t length,
                        const TrajectoryConfig& config, uint64_t computation,
                        Method method) {
  config.check();
  const size_t m = caps.size();
  PotentialVector out;
  out.method = method;
  out.k_used = config.k;
  out.p.assign(m, 0.0);
  if (length <= 0) return out;

  const lp::Extremality sense = method == Method::kPot1
                                    ? lp::Extremality::kMaximal
                                    : lp::Extremality::kMinimal;
  const int k = config.k;
  std::vector<std::vector<double>> prices(static_cast<size_t>(k));
  std::vector<std::exception_ptr> failures(static_cast<size_t>(k));

  auto run = [&](int j) {
    for (uint64_t attempt = 0;; ++attempt) {
      try {
        std::mt19937_64 rng(trajectory_seed(config.seed, computation,
                                            static_cast<uint64_t>(j), attempt));
        std::vector<const Case*> cases;
        cases.reserve(batch.size() + static_cast<size_t>(length));
        for (const Case& c : batch) cases.push_back(&c);
        for (const Case* c : window.sample(length, rng)) cases.push_back(c);
        prices[j] = trajectory_prices(caps, cases, sense, config.backend);
        return;
      } catch (const lp::NumericalFailure&) {
        if (attempt >= 1) {
          failures[j] = std::current_exception();
          return;
        }
      } catch (...) {
        failures[j] = std::current_exception();
        return;
      }
    }
  };

  if (config.execution == Execution::kParallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int j = 0; j < k; ++j) run(j);
  } else {
    for (int j = 0; j < k; ++j) run(j);
  }

  for (int j = 0; j < k; ++j) {
    if (failures[j]) std::rethrow_exception(failures[j]);
  }
  for (int j = 0; j < k; ++j) {
    for (size_t l = 0; l < m; ++l) out.p[l] += prices[j][l];
  }
  for (size_t l = 0; l < m; ++l) {
    out.p[l] = caps[l].is_infinite() ? 0.0 : std::max(0.0, out.p[l] / k);
  }
  return out;
}

}  // namespace

PotentialVector pot1(const CapacityProfile& caps, const SamplingWindow& window,
                     int64_t length, const TrajectoryConfig& config,
                     uint64_t computation) {
  return average(caps, {}, window, length, config, computation, Method::kPot1);
}

PotentialVector pot2(const CapacityProfile& caps, std::span<const Case> batch,
                     const SamplingWindow& window, int64_t length,
                     const TrajectoryConfig& config, uint64_t computation) {
  return average(caps, batch, window, length, config, computation,
                 Method::kPot2);
}

}  // namespace dynmatch::potentials
