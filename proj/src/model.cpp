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

#include "dynmatch/model.hpp"

#include <algorithm>
#include <cmath>

namespace dynmatch {

Capacity Capacity::Finite(int64_t refugees) {
  if (refugees < 0) {
    throw Error("invalid_capacity",
                "capacity must be non-negative, got " +
                    std::to_string(refugees));
  }
  if (refugees == kInfinite) return Infinite();
  return Capacity(refugees);
}

void CapacityProfile::decrement(size_t a, int64_t size) {
  Capacity& c = caps_.at(a);
  if (c.is_infinite()) return;
  if (size > c.value()) {
    throw Error("capacity_exceeded",
                "placing " + std::to_string(size) + " refugees at affiliate " +
                    std::to_string(a) + " exceeds remaining capacity " +
                    std::to_string(c.value()));
  }
  c = Capacity::Finite(c.value() - size);
}

int64_t CapacityProfile::finite_total() const {
  int64_t total = 0;
  for (const Capacity& c : caps_) {
    if (!c.is_infinite()) total += c.value();
  }
  return total;
}

double Score::value() const {
  if (!compatible_) throw std::logic_error("value() of an incompatible score");
  return value_;
}

bool CompatRule::admits(const CaseAttributes& attrs, int size) const {
  auto allowed = [](const std::vector<std::string>& list,
                    const std::string& v) {
    return list.empty() || std::find(list.begin(), list.end(), v) != list.end();
  };
  return allowed(nationalities, attrs.nationality) &&
         allowed(languages, attrs.language) && size >= min_size &&
         size <= max_size && (single_parent_ok || !attrs.single_parent);
}

std::optional<size_t> find_sink(std::span<const Affiliate> affiliates) {
  std::optional<size_t> sink;
  for (size_t a = 0; a < affiliates.size(); ++a) {
    if (!affiliates[a].is_unmatched_sink) continue;
    if (sink) return std::nullopt;
    sink = a;
  }
  return sink;
}

size_t Instance::sink_index() const {
  auto s = find_sink(affiliates);
  if (!s) throw Error("invalid_instance", "no unique unmatched sink");
  return *s;
}

std::vector<BatchRange> Instance::batches() const {
  std::vector<BatchRange> out;
  for (size_t i = 0; i < cases.size(); ++i) {
    if (i == 0 || cases[i].batch_id != cases[i - 1].batch_id) {
      if (!out.empty()) out.back().end = i;
      out.push_back({i, i});
    }
  }
  if (!out.empty()) out.back().end = cases.size();
  return out;
}

int64_t Instance::total_refugees() const {
  int64_t total = 0;
  for (const Case& c : cases) total += c.size;
  return total;
}

namespace {

void check_profile(const std::string& name, const CapacityProfile& caps,
                   const Instance& inst, std::optional<size_t> sink,
                   std::vector<Violation>& out) {
  if (caps.size() != inst.affiliates.size()) {
    out.push_back({name, "profile has " + std::to_string(caps.size()) +
                             " entries for " +
                             std::to_string(inst.affiliates.size()) +
                             " affiliates"});
    return;
  }
  if (sink && !caps[*sink].is_infinite()) {
    out.push_back({name, "unmatched sink capacity must be infinite"});
  }
}

void check_case(const std::string& where, const Case& c,
                std::span<const Affiliate> affiliates,
                std::optional<size_t> sink, std::vector<Violation>& out) {
  const std::string entity = where + " case " + c.id;
  if (c.size < 1) out.push_back({entity, "size must be positive"});
  if (c.scores.size() != affiliates.size()) {
    out.push_back({entity, "score map does not cover every affiliate"});
    return;
  }
  for (size_t a = 0; a < c.scores.size(); ++a) {
    const Score& s = c.scores[a];
    if (sink && a == *sink) {
      if (!s.compatible() || s.value() != 0.0) {
        out.push_back({entity, "score at unmatched sink must be 0"});
      }
      continue;
    }
    if (!s.compatible()) continue;
    const double v = s.value();
    if (!std::isfinite(v) || v < 0.0 || v > static_cast<double>(c.size)) {
      out.push_back({entity, "score at affiliate " + affiliates[a].id +
                                 " outside [0, size]"});
    }
  }
  if (c.pool == Pool::kUsTies) {
    int compatible_real = 0;
    for (size_t a = 0; a < c.scores.size(); ++a) {
      if (sink && a == *sink) continue;
      if (c.scores[a].compatible()) ++compatible_real;
    }
    if (compatible_real != 1) {
      out.push_back({entity,
                     "US-ties case needs exactly one compatible affiliate"});
    }
  }
}

}  // namespace

std::vector<Violation> validate_case(const Case& c,
                                     std::span<const Affiliate> affiliates) {
  std::vector<Violation> out;
  check_case("batch", c, affiliates, find_sink(affiliates), out);
  return out;
}

std::vector<Violation> validate(const Instance& inst) {
  std::vector<Violation> out;
  int sinks = 0;
  for (const Affiliate& a : inst.affiliates) sinks += a.is_unmatched_sink;
  std::optional<size_t> sink = find_sink(inst.affiliates);
  if (sinks == 0) out.push_back({"instance", "no unmatched sink"});
  if (sinks > 1) out.push_back({"instance", "more than one unmatched sink"});
  if (sink) {
    const Affiliate& s = inst.affiliates[*sink];
    if (!s.capacity.is_infinite()) {
      out.push_back({"affiliate " + s.id, "unmatched sink must be infinite"});
    }
    if (!(s.compat == CompatRule{})) {
      out.push_back({"affiliate " + s.id,
                     "unmatched sink must not restrict compatibility"});
    }
  }

  check_profile("initial_caps", inst.initial_caps, inst, sink, out);
  check_profile("final_caps", inst.final_caps, inst, sink, out);
  for (size_t r = 0; r < inst.revisions.size(); ++r) {
    const std::string name = "revision " + std::to_string(r);
    check_profile(name, inst.revisions[r].caps, inst, sink, out);
    if (r > 0 &&
        inst.revisions[r].arrival_index < inst.revisions[r - 1].arrival_index) {
      out.push_back({name, "revisions out of arrival order"});
    }
  }

  for (size_t i = 0; i < inst.cases.size(); ++i) {
    const Case& c = inst.cases[i];
    check_case("year", c, inst.affiliates, sink, out);
    if (i > 0) {
      const Case& prev = inst.cases[i - 1];
      if (c.arrival_index <= prev.arrival_index) {
        out.push_back({"year case " + c.id, "cases out of arrival order"});
      }
      if (c.batch_id < prev.batch_id) {
        out.push_back({"year case " + c.id,
                       "batch ids not contiguous in arrival order"});
      }
    }
  }
  for (const Case& c : inst.history_pool) {
    check_case("history", c, inst.affiliates, sink, out);
  }
  return out;
}

namespace {

void append_split(const Case& c, std::vector<Case>& out, int* next_index) {
  const double size = static_cast<double>(c.size);
  for (int k = 0; k < c.size; ++k) {
    Case unit = c;
    unit.size = 1;
    if (c.size > 1) unit.id = c.id + "#" + std::to_string(k + 1);
    if (next_index) unit.arrival_index = (*next_index)++;
    for (Score& s : unit.scores) {
      if (s.compatible()) {
        s = Score::Of(s.value() / size);
      } else if (auto e = s.estimate()) {
        s = Score::Incompatible(*e / size);
      }
    }
    out.push_back(std::move(unit));
  }
}

}  // namespace

Instance split_unit(const Instance& inst) {
  Instance out = inst;
  out.cases.clear();
  out.history_pool.clear();
  int next_index = 1;
  for (const Case& c : inst.cases) append_split(c, out.cases, &next_index);
  for (const Case& c : inst.history_pool) {
    append_split(c, out.history_pool, nullptr);
  }
  // A revision moves with the first sibling of the case it preceded.
  for (Revision& r : out.revisions) {
    int refugees_before = 0;
    for (const Case& c : inst.cases) {
      if (c.arrival_index >= r.arrival_index) break;
      refugees_before += c.size;
    }
    r.arrival_index = refugees_before + 1;
  }
  return out;
}

}  // namespace dynmatch
