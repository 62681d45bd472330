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

#include "dynmatch/policies.hpp"

#include <algorithm>
#include <cmath>

namespace dynmatch::policies {

const char* arrival_mode_name(ArrivalMode m) {
  switch (m) {
    case ArrivalMode::kKnownN: return "known_n";
    case ArrivalMode::kCapacityFraction: return "capacity_fraction";
    case ArrivalMode::kManualOverride: return "manual_override";
  }
  return "unknown";
}

void PolicyConfig::check() const {
  if (k < 1) throw Error("invalid_config", "k must be at least 1");
  if (!(capacity_fraction > 0.0 && capacity_fraction <= 1.0)) {
    throw Error("invalid_config", "capacity_fraction must lie in (0, 1]");
  }
  if (lookback_days <= 0) {
    throw Error("invalid_config", "lookback must be positive");
  }
  if (epsilon_matched && !(*epsilon_matched >= 0.0)) {
    throw Error("invalid_config", "epsilon_matched must be non-negative");
  }
  if (arrival_mode == ArrivalMode::kManualOverride &&
      !(predicted_total_refugees && *predicted_total_refugees > 0.0)) {
    throw Error("invalid_config", "manual override needs a positive prediction");
  }
}

std::vector<size_t> default_tie_order(std::span<const Affiliate> affiliates) {
  std::vector<size_t> order;
  std::optional<size_t> sink;
  for (size_t l = 0; l < affiliates.size(); ++l) {
    if (affiliates[l].is_unmatched_sink) {
      sink = l;
    } else {
      order.push_back(l);
    }
  }
  if (sink) order.push_back(*sink);
  return order;
}

Engine::Engine(std::vector<Affiliate> affiliates, const CapacityProfile& caps,
               std::vector<Case> history, PolicyConfig config)
    : affiliates_(std::move(affiliates)),
      config_(std::move(config)),
      pool_(std::move(history)) {
  config_.check();
  const std::optional<size_t> sink = find_sink(affiliates_);
  if (!sink) throw Error("invalid_instance", "no unmatched sink");
  sink_ = *sink;
  if (caps.size() != affiliates_.size()) {
    throw Error("invalid_instance", "capacity profile does not match affiliates");
  }
  tie_order_ = config_.tie_order.empty() ? default_tie_order(affiliates_)
                                         : config_.tie_order;
  if (tie_order_.size() != affiliates_.size()) {
    throw Error("invalid_config", "tie order must rank every affiliate");
  }
  tie_rank_.assign(affiliates_.size(), affiliates_.size());
  for (size_t r = 0; r < tie_order_.size(); ++r) {
    if (tie_order_[r] >= affiliates_.size() ||
        tie_rank_[tie_order_[r]] != affiliates_.size()) {
      throw Error("invalid_config", "tie order is not a permutation");
    }
    tie_rank_[tie_order_[r]] = r;
  }
  state_.governing = caps;
  state_.remaining = caps;
  state_.used.assign(caps.size(), 0);
  state_.expected_total_refugees =
      config_.capacity_fraction * static_cast<double>(caps.finite_total());
}

double Engine::average_case_size(int now_day) const {
  if (pool_.empty()) return kDefaultCaseSize;
  const potentials::SamplingWindow window(pool_, now_day, config_.lookback_days,
                                          config_.min_window_cases);
  return window.mean_size();
}

double Engine::expected_remaining_cases(int64_t pending_cases,
                                        int64_t pending_refugees,
                                        int now_day) const {
  if (config_.arrival_mode == ArrivalMode::kKnownN) {
    if (known_total_cases_ < 0) {
      throw Error("invalid_config", "known_n mode needs the total case count");
    }
    return static_cast<double>(std::max<int64_t>(
        0, known_total_cases_ - state_.arrived_cases - pending_cases));
  }
  const double target =
      config_.arrival_mode == ArrivalMode::kManualOverride
          ? config_.predicted_total_refugees.value_or(0.0)
          : state_.expected_total_refugees;
  const double left = target - static_cast<double>(state_.arrived_refugees +
                                                   pending_refugees);
  if (left <= 0.0) return 0.0;
  return left / average_case_size(now_day);
}

potentials::PotentialVector Engine::compute_potentials(
    std::span<const Case> batch) {
  const uint64_t computation = state_.computations++;
  potentials::PotentialVector out;
  out.method = config_.method;
  out.p.assign(affiliates_.size(), 0.0);
  if (config_.method == potentials::Method::kZero) return out;

  int64_t refugees = 0;
  for (const Case& c : batch) refugees += c.size;
  int now_day = 0;
  if (!batch.empty()) {
    now_day = batch.front().day;
  } else if (!pool_.empty()) {
    now_day = pool_.back().day;
  }
  const int64_t length = std::llround(expected_remaining_cases(
      static_cast<int64_t>(batch.size()), refugees, now_day));
  out.k_used = config_.k;
  if (length <= 0) return out;

  potentials::TrajectoryConfig traj;
  traj.k = config_.k;
  traj.lookback_days = config_.lookback_days;
  traj.min_window_cases = config_.min_window_cases;
  traj.seed = config_.seed;
  traj.execution = config_.execution;
  traj.backend = config_.backend;
  const potentials::SamplingWindow window(pool_, now_day, config_.lookback_days,
                                          config_.min_window_cases);
  if (config_.method == potentials::Method::kPot1) {
    return potentials::pot1(state_.remaining, window, length, traj,
                            computation);
  }
  return potentials::pot2(state_.remaining, batch, window, length, traj,
                          computation);
}

double Engine::epsilon_for(std::span<const Case> batch) const {
  if (config_.epsilon_matched) return *config_.epsilon_matched;
  int64_t refugees = 0;
  for (const Case& c : batch) refugees += c.size;
  return default_epsilon(refugees);
}

size_t Engine::pm_choice(const Case& c, std::span<const double> p) const {
  const double eps = epsilon_for(std::span<const Case>(&c, 1));
  size_t best = sink_;
  double best_value = 0.0;
  bool found = false;
  for (size_t l : tie_order_) {
    double v;
    if (l == sink_) {
      v = 0.0;
    } else {
      if (!c.scores.at(l).compatible() || !state_.remaining[l].fits(c.size)) {
        continue;
      }
      const double pl = p.empty() ? 0.0 : p[l];
      v = c.scores[l].value() / c.size - pl + eps;
    }
    if (!found || v > best_value) {
      best = l;
      best_value = v;
      found = true;
    }
  }
  return best;
}

Assignment Engine::recommend(std::span<const Case> batch,
                             std::span<const double> p) const {
  IlpOptions options;
  options.potentials = p;
  options.epsilon_matched = epsilon_for(batch);
  options.tie_order = tie_order_;
  return solve_ilp(batch, state_.remaining, sink_, options);
}

void Engine::commit(std::span<const Case> batch,
                    std::span<const size_t> placement,
                    std::span<const uint8_t> force) {
  if (placement.size() != batch.size()) {
    throw Error("invalid_request", "one placement per case required");
  }
  if (!force.empty() && force.size() != batch.size()) {
    throw Error("invalid_request", "one force flag per case required");
  }
  CapacityProfile remaining = state_.remaining;
  for (size_t i = 0; i < batch.size(); ++i) {
    const Case& c = batch[i];
    const size_t l = placement[i];
    if (l >= affiliates_.size()) {
      throw Error("unknown_affiliate", "placement outside the affiliate list");
    }
    if (c.scores.size() != affiliates_.size()) {
      throw Error("invalid_case", "case " + c.id +
                                      " does not cover every affiliate");
    }
    if (l != sink_ && !c.scores[l].compatible() &&
        (force.empty() || !force[i])) {
      throw Error("incompatible_without_force",
                  "case " + c.id + " is incompatible with " +
                      affiliates_[l].id);
    }
    if (!remaining[l].fits(c.size)) {
      throw Error("capacity_exceeded", "case " + c.id + " does not fit at " +
                                           affiliates_[l].id);
    }
    remaining.decrement(l, c.size);
  }
  state_.remaining = std::move(remaining);
  for (size_t i = 0; i < batch.size(); ++i) {
    const Case& c = batch[i];
    const size_t l = placement[i];
    state_.used[l] += c.size;
    state_.arrived_refugees += c.size;
    state_.arrived_cases += 1;
    const bool forced = l != sink_ && !c.scores[l].compatible();
    state_.log.push_back({c.id, l, forced});
    pool_.push_back(c);
  }
}

size_t Engine::pm_step(const Case& c) {
  const std::span<const Case> one(&c, 1);
  const potentials::PotentialVector p = compute_potentials(one);
  const size_t l = pm_choice(c, p.p);
  const size_t placement[] = {l};
  commit(one, placement);
  return l;
}

Assignment Engine::pmb_step(std::span<const Case> batch) {
  const potentials::PotentialVector p = compute_potentials(batch);
  Assignment a = recommend(batch, p.p);
  commit(batch, a.placement);
  return a;
}

void Engine::apply_revision(const CapacityProfile& caps, bool update_capacities,
                            bool update_expectation) {
  if (caps.size() != affiliates_.size()) {
    throw Error("invalid_revision", "revision does not cover every affiliate");
  }
  if (!caps[sink_].is_infinite()) {
    throw Error("invalid_revision", "sink capacity must stay infinite");
  }
  if (update_capacities) {
    state_.governing = caps;
    for (size_t l = 0; l < caps.size(); ++l) {
      if (caps[l].is_infinite()) {
        state_.remaining.set(l, Capacity::Infinite());
      } else {
        state_.remaining.set(
            l, Capacity::Finite(std::max<int64_t>(0, caps[l].value() -
                                                         state_.used[l])));
      }
    }
  }
  if (update_expectation) {
    state_.expected_total_refugees =
        config_.capacity_fraction * static_cast<double>(caps.finite_total());
  }
}

void Engine::set_arrival_prediction(std::optional<double> total_refugees) {
  if (!total_refugees) {
    config_.arrival_mode = ArrivalMode::kCapacityFraction;
    config_.predicted_total_refugees.reset();
    return;
  }
  if (!(*total_refugees > 0.0) || !std::isfinite(*total_refugees)) {
    throw Error("invalid_prediction", "prediction must be positive");
  }
  config_.arrival_mode = ArrivalMode::kManualOverride;
  config_.predicted_total_refugees = total_refugees;
}

void Engine::restore(EngineState state, std::vector<Case> pool) {
  const size_t m = affiliates_.size();
  if (state.governing.size() != m || state.remaining.size() != m ||
      state.used.size() != m) {
    throw Error("invalid_state", "saved state does not match affiliates");
  }
  state_ = std::move(state);
  pool_ = std::move(pool);
}

}  // namespace dynmatch::policies
