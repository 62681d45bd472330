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

// Domain types shared by every other module: affiliates, cases, capacity
// profiles and the instance container that a fiscal-year replay runs on.

#ifndef DYNMATCH_MODEL_HPP_
#define DYNMATCH_MODEL_HPP_

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dynmatch {

// Base class of every error the library raises. `code` is a short
// machine-readable tag (used verbatim by the HTTP service).
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

// A capacity, counted in refugees: a non-negative integer or infinite.
class Capacity {
 public:
  constexpr Capacity() = default;
  static constexpr Capacity Infinite() { return Capacity(kInfinite); }
  static Capacity Finite(int64_t refugees);

  constexpr bool is_infinite() const { return value_ == kInfinite; }
  // Undefined for infinite capacities; callers check is_infinite() first.
  constexpr int64_t value() const { return value_; }
  constexpr bool fits(int64_t size) const {
    return is_infinite() || size <= value_;
  }

  friend constexpr bool operator==(Capacity, Capacity) = default;

 private:
  static constexpr int64_t kInfinite = std::numeric_limits<int64_t>::max();
  constexpr explicit Capacity(int64_t v) : value_(v) {}
  int64_t value_ = 0;
};

// Remaining (or announced) capacity per affiliate, indexed like
// Instance::affiliates.
class CapacityProfile {
 public:
  CapacityProfile() = default;
  explicit CapacityProfile(std::vector<Capacity> caps)
      : caps_(std::move(caps)) {}

  size_t size() const { return caps_.size(); }
  const Capacity& operator[](size_t a) const { return caps_[a]; }
  std::span<const Capacity> view() const { return caps_; }

  void set(size_t a, Capacity c) { caps_.at(a) = c; }
  // c - size * e_a. Throws Error("capacity_exceeded") if it would go negative.
  void decrement(size_t a, int64_t size);
  // Sum over finite entries.
  int64_t finite_total() const;

  friend bool operator==(const CapacityProfile&,
                         const CapacityProfile&) = default;

 private:
  std::vector<Capacity> caps_;
};

// Per-pair employment score. Incompatible pairs are a distinct state and
// never enter the optimizer; they may still carry the regression estimate
// that staff see when forcing an override.
class Score {
 public:
  Score() = default;
  static Score Of(double value) { return Score(true, value, std::nullopt); }
  static Score Incompatible(std::optional<double> estimate = std::nullopt) {
    return Score(false, 0.0, estimate);
  }

  bool compatible() const { return compatible_; }
  // Throws std::logic_error on an incompatible score.
  double value() const;
  // Compatible: the score. Incompatible: the stored estimate, if any.
  std::optional<double> estimate() const {
    return compatible_ ? std::optional<double>(value_) : estimate_;
  }

  friend bool operator==(const Score&, const Score&) = default;

 private:
  Score(bool c, double v, std::optional<double> e)
      : compatible_(c), value_(v), estimate_(e) {}
  bool compatible_ = false;
  double value_ = 0.0;
  std::optional<double> estimate_;
};

struct CaseAttributes {
  std::string nationality;
  std::string language;
  bool single_parent = false;

  friend bool operator==(const CaseAttributes&,
                         const CaseAttributes&) = default;
};

// Affiliate restrictions; an empty list admits every value.
struct CompatRule {
  std::vector<std::string> nationalities;
  std::vector<std::string> languages;
  int min_size = 1;
  int max_size = std::numeric_limits<int>::max();
  bool single_parent_ok = true;

  bool admits(const CaseAttributes& attrs, int size) const;

  friend bool operator==(const CompatRule&, const CompatRule&) = default;
};

struct Affiliate {
  std::string id;
  Capacity capacity;
  bool is_unmatched_sink = false;
  CompatRule compat;

  friend bool operator==(const Affiliate&, const Affiliate&) = default;
};

enum class Pool { kFree, kUsTies };

struct Case {
  std::string id;
  int size = 1;
  std::vector<Score> scores;  // one per affiliate
  CaseAttributes attributes;
  Pool pool = Pool::kFree;
  int arrival_index = 0;  // 1-based within the year; <= 0 for history
  int batch_id = 0;
  int day = 0;  // calendar day relative to the start of the fiscal year

  friend bool operator==(const Case&, const Case&) = default;
};

struct Revision {
  int arrival_index = 0;  // takes effect before this arrival is allocated
  CapacityProfile caps;

  friend bool operator==(const Revision&, const Revision&) = default;
};

// Half-open range of case positions forming one batch.
struct BatchRange {
  size_t begin = 0;
  size_t end = 0;
  size_t size() const { return end - begin; }
};

struct Instance {
  std::vector<Affiliate> affiliates;
  std::vector<Case> cases;  // ordered by arrival_index
  CapacityProfile initial_caps;
  CapacityProfile final_caps;
  std::vector<Revision> revisions;
  std::vector<Case> history_pool;

  // Index of the unique unmatched sink; throws Error("invalid_instance")
  // when there is not exactly one.
  size_t sink_index() const;
  // Contiguous batch partition derived from batch_id.
  std::vector<BatchRange> batches() const;
  int64_t total_refugees() const;

  friend bool operator==(const Instance&, const Instance&) = default;
};

struct Violation {
  std::string entity;
  std::string rule;
};

// Every broken type invariant, in a stable order. Empty iff valid.
std::vector<Violation> validate(const Instance& instance);
// The per-case subset of validate().
std::vector<Violation> validate_case(const Case& c,
                                     std::span<const Affiliate> affiliates);

// Replaces each size-s case by s single-refugee siblings carrying 1/s of
// the original scores. Siblings stay adjacent and keep the batch id.
Instance split_unit(const Instance& instance);

// Index of the sink within `affiliates`, or nullopt.
std::optional<size_t> find_sink(std::span<const Affiliate> affiliates);

}  // namespace dynmatch

#endif  // DYNMATCH_MODEL_HPP_
