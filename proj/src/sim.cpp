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

#include "dynmatch/sim.hpp"

#include <chrono>
#include <cstdlib>

#include "dynmatch/matching.hpp"
#include "dynmatch/potentials.hpp"

namespace dynmatch::sim {

namespace {

std::vector<int64_t> snapshot(const CapacityProfile& caps) {
  std::vector<int64_t> out(caps.size());
  for (size_t l = 0; l < caps.size(); ++l) {
    out[l] = caps[l].is_infinite() ? -1 : caps[l].value();
  }
  return out;
}

void record(const Case& c, size_t l, size_t sink, CapacityProfile& remaining,
            ReplayResult& r) {
  if (!remaining[l].is_infinite()) remaining.decrement(l, c.size);
  const double u = l == sink ? 0.0 : c.scores[l].estimate().value_or(0.0);
  ArrivalRecord a;
  a.arrival_index = c.arrival_index;
  a.case_id = c.id;
  a.affiliate = l;
  r.total_refugees += c.size;
  a.refugees_so_far = r.total_refugees;
  a.match_score = u;
  a.match_score_per_refugee = u / c.size;
  r.total_employment += u;
  a.cumulative_employment = r.total_employment;
  if (l != sink) r.matched_refugees += c.size;
  r.per_arrival.push_back(std::move(a));
  r.placement.push_back(l);
  r.remaining_after.push_back(snapshot(remaining));
}

}  // namespace

const char* capacity_mode_name(CapacityMode m) {
  switch (m) {
    case CapacityMode::kFinal: return "final";
    case CapacityMode::kInitial: return "initial";
    case CapacityMode::kInitialWithRevision: return "initial_with_revision";
  }
  return "unknown";
}

CapacityMode parse_capacity_mode(const std::string& name) {
  if (name == "final") return CapacityMode::kFinal;
  if (name == "initial") return CapacityMode::kInitial;
  if (name == "initial_with_revision") return CapacityMode::kInitialWithRevision;
  throw Error("invalid_config", "unknown capacity mode '" + name + "'");
}

const CapacityProfile& benchmark_caps(const Instance& instance,
                                      CapacityMode mode) {
  return mode == CapacityMode::kInitial ? instance.initial_caps
                                        : instance.final_caps;
}

std::vector<double> year_prices(const Instance& instance) {
  std::vector<const Case*> cases;
  cases.reserve(instance.cases.size());
  for (const Case& c : instance.cases) cases.push_back(&c);
  return potentials::trajectory_prices(instance.final_caps, cases,
                                       lp::Extremality::kMaximal,
                                       potentials::Backend::kTransport);
}

ReplayResult replay(const Instance& instance, const ReplayConfig& config,
                    std::optional<double> hindsight_value) {
  const auto start = std::chrono::steady_clock::now();
  const size_t sink = instance.sink_index();
  const std::vector<size_t> tie_order =
      config.policy.tie_order.empty()
          ? policies::default_tie_order(instance.affiliates)
          : config.policy.tie_order;

  ReplayResult r;
  r.capacity_mode = capacity_mode_name(config.capacity_mode);
  r.seed = config.policy.seed;
  r.k = config.policy.method == potentials::Method::kZero ? 0 : config.policy.k;

  if (config.hindsight) {
    r.policy = "hindsight";
    r.k = 0;
    const CapacityProfile& caps = benchmark_caps(instance, config.capacity_mode);
    const Assignment a = hindsight_optimum(instance, caps, tie_order);
    CapacityProfile remaining = caps;
    r.remaining_start = snapshot(remaining);
    for (size_t i = 0; i < instance.cases.size(); ++i) {
      record(instance.cases[i], a.placement[i], sink, remaining, r);
    }
    hindsight_value = r.total_employment;
  } else {
    r.policy = config.policy.method == potentials::Method::kZero
                   ? "greedy"
                   : potentials::method_name(config.policy.method);
    const CapacityProfile& caps0 = config.capacity_mode == CapacityMode::kFinal
                                       ? instance.final_caps
                                       : instance.initial_caps;
    policies::PolicyConfig policy = config.policy;
    policy.tie_order = tie_order;
    policies::Engine engine(instance.affiliates, caps0, instance.history_pool,
                            policy);
    engine.set_known_total_cases(static_cast<int64_t>(instance.cases.size()));
    r.remaining_start = snapshot(caps0);

    size_t next_revision = 0;
    for (const BatchRange& b : instance.batches()) {
      const std::span<const Case> batch(instance.cases.data() + b.begin,
                                        b.size());
      if (config.capacity_mode == CapacityMode::kInitialWithRevision) {
        while (next_revision < instance.revisions.size() &&
               instance.revisions[next_revision].arrival_index <=
                   batch.back().arrival_index) {
          engine.apply_revision(instance.revisions[next_revision].caps,
                                !config.revision_info_only, true);
          ++next_revision;
        }
      }
      CapacityProfile remaining = engine.state().remaining;
      if (config.batched) {
        const Assignment a = engine.pmb_step(batch);
        for (size_t i = 0; i < batch.size(); ++i) {
          record(batch[i], a.placement[i], sink, remaining, r);
        }
      } else {
        for (const Case& c : batch) {
          const size_t l = engine.pm_step(c);
          record(c, l, sink, remaining, r);
        }
      }
    }
  }

  if (!hindsight_value) {
    hindsight_value =
        hindsight_optimum(instance, benchmark_caps(instance, config.capacity_mode),
                          tie_order)
            .value;
  }
  r.hindsight_value = *hindsight_value;
  r.optimum_ratio =
      r.hindsight_value > 0.0 ? r.total_employment / r.hindsight_value : 1.0;
  r.matched_refugee_fraction = match_fraction(r);

  const std::vector<double> curve =
      priced_capacity_curve(year_prices(instance), r);
  for (size_t t = 0; t < curve.size(); ++t) {
    r.per_arrival[t].priced_capacity = curve[t];
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            start)
                  .count();
  return r;
}

std::vector<double> priced_capacity_curve(std::span<const double> prices,
                                          const ReplayResult& result) {
  auto priced = [&](std::span<const int64_t> remaining) {
    double total = 0.0;
    for (size_t l = 0; l < remaining.size() && l < prices.size(); ++l) {
      if (remaining[l] > 0) total += prices[l] * static_cast<double>(remaining[l]);
    }
    return total;
  };
  const double base = priced(result.remaining_start);
  std::vector<double> out(result.remaining_after.size(), 1.0);
  if (base == 0.0) return out;
  for (size_t t = 0; t < out.size(); ++t) {
    out[t] = priced(result.remaining_after[t]) / base;
  }
  return out;
}

std::vector<double> priced_capacity_curve(const Instance& instance,
                                          const ReplayResult& result) {
  return priced_capacity_curve(year_prices(instance), result);
}

std::vector<double> triangle_smooth(std::span<const double> series,
                                    int width) {
  if (width < 0) throw Error("invalid_config", "width must be non-negative");
  const int n = static_cast<int>(series.size());
  std::vector<double> out(series.size());
  for (int t = 0; t < n; ++t) {
    double num = 0.0;
    double den = 0.0;
    const int lo = std::max(0, t - width);
    const int hi = std::min(n - 1, t + width);
    for (int s = lo; s <= hi; ++s) {
      const double w = width + 1 - std::abs(s - t);
      num += w * series[s];
      den += w;
    }
    out[t] = num / den;
  }
  return out;
}

double match_fraction(const ReplayResult& result) {
  if (result.total_refugees == 0) return 1.0;
  return static_cast<double>(result.matched_refugees) /
         static_cast<double>(result.total_refugees);
}

void write_metrics_csv(const ReplayResult& result, std::ostream& out) {
  out << "arrival_index,case_id,affiliate,refugees_so_far,match_score,"
         "match_score_per_refugee,cumulative_employment,priced_capacity\n";
  char buf[256];
  for (const ArrivalRecord& a : result.per_arrival) {
    std::snprintf(buf, sizeof(buf), "%d,%s,%zu,%lld,%.17g,%.17g,%.17g,%.17g\n",
                  a.arrival_index, a.case_id.c_str(), a.affiliate,
                  static_cast<long long>(a.refugees_so_far), a.match_score,
                  a.match_score_per_refugee, a.cumulative_employment,
                  a.priced_capacity);
    out << buf;
  }
}

nlohmann::json summary_json(const ReplayResult& result) {
  return {
      {"policy", result.policy},
      {"capacity_mode", result.capacity_mode},
      {"k", result.k},
      {"seed", result.seed},
      {"total_employment", result.total_employment},
      {"hindsight_value", result.hindsight_value},
      {"optimum_ratio", result.optimum_ratio},
      {"matched_refugees", result.matched_refugees},
      {"total_refugees", result.total_refugees},
      {"matched_refugee_fraction", result.matched_refugee_fraction},
      {"arrivals", result.per_arrival.size()},
      {"seconds", result.seconds},
  };
}

}  // namespace dynmatch::sim
