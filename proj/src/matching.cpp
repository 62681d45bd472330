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

#include "dynmatch/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>

namespace dynmatch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One branching decision: case `i` is placed at `l` (fix) or kept away
// from it.
struct Fixing {
  int i;
  int l;
  bool fix;
};

// Node LPs share a solver holding every case that no node has branched on
// yet; a node copies it and inserts the branched cases with its own
// fixings. A case fixed to a real affiliate keeps the sink at a prohibitive
// penalty, so any flow there signals an infeasible node.
class BranchAndBound {
 public:
  BranchAndBound(std::span<const Case> cases, const CapacityProfile& caps,
                 size_t sink, const IlpOptions& options)
      : cases_(cases), caps_(caps), sink_(sink), m_(caps.size()) {
    if (sink >= m_ || !caps[sink].is_infinite()) {
      throw Error("invalid_instance", "sink must have infinite capacity");
    }
    if (!options.potentials.empty() && options.potentials.size() != m_) {
      throw Error("invalid_instance", "one potential per affiliate required");
    }
    if (options.tie_order.empty()) {
      for (size_t l = 0; l < m_; ++l) order_.push_back(l);
    } else {
      order_.assign(options.tie_order.begin(), options.tie_order.end());
    }
    rank_.assign(m_, 0);
    for (size_t r = 0; r < order_.size(); ++r) rank_.at(order_[r]) = r;
    node_limit_ = options.node_limit;

    const size_t n = cases.size();
    per_refugee_.assign(n * m_, 0.0);
    compatible_.assign(n * m_, 0);
    double scale = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const Case& c = cases[i];
      if (c.scores.size() != m_) {
        throw Error("invalid_instance", "case " + c.id +
                                            " does not cover every affiliate");
      }
      double widest = 0.0;
      for (size_t l = 0; l < m_; ++l) {
        if (l == sink) {
          compatible_[i * m_ + l] = 1;
          continue;
        }
        const Score& s = c.scores[l];
        if (!s.compatible()) continue;
        const double p = options.potentials.empty() ? 0.0 : options.potentials[l];
        compatible_[i * m_ + l] = caps[l].fits(c.size);
        per_refugee_[i * m_ + l] =
            s.value() / c.size - p + options.epsilon_matched;
        widest = std::max(widest, std::abs(per_refugee_[i * m_ + l]));
      }
      scale += widest * c.size;
    }
    penalty_ = 1.0 + 4.0 * scale;
    touched_.assign(n, 0);
  }

  Assignment run() {
    std::priority_queue<Entry> open;
    int64_t seq = 0;
    int64_t nodes = 0;
    bool limited = false;

    auto evaluate = [&](Node&& node) {
      ++nodes;
      std::optional<Relaxation> r = relax(node);
      if (!r || !improves(r->bound)) return;
      heuristic(node, *r);
      if (r->branch_case < 0) return;  // integral: heuristic recorded it
      if (!improves(r->bound)) return;
      node.bound = r->bound;
      node.branch_case = r->branch_case;
      node.branch_aff = r->branch_aff;
      storage_.push_back(std::move(node));
      open.push({storage_.back().bound, seq++, storage_.size() - 1});
    };

    evaluate(Node{});
    while (!open.empty()) {
      if (nodes >= node_limit_) {
        limited = true;
        break;
      }
      const Entry e = open.top();
      open.pop();
      Node node = std::move(storage_[e.index]);
      storage_[e.index] = Node{};
      if (!improves(node.bound)) continue;
      const int i = node.branch_case;
      const int l = node.branch_aff;
      if (!touched_[i]) {
        touched_[i] = 1;
        touched_list_.push_back(i);
        std::sort(touched_list_.begin(), touched_list_.end());
        base_.reset();
      }
      Node one = node;
      one.fixings.push_back({i, l, true});
      Node zero = std::move(node);
      zero.fixings.push_back({i, l, false});
      evaluate(std::move(one));
      evaluate(std::move(zero));
    }

    Assignment out;
    out.placement = best_;
    out.proven_optimal = !limited;
    out.nodes = nodes;
    return out;
  }

 private:
  struct Node {
    std::vector<Fixing> fixings;
    double bound = 0.0;
    int branch_case = -1;
    int branch_aff = -1;
  };
  struct Entry {
    double bound;
    int64_t seq;
    size_t index;
    bool operator<(const Entry& o) const {
      if (bound != o.bound) return bound < o.bound;
      return seq > o.seq;
    }
  };
  struct Relaxation {
    double bound = 0.0;
    std::vector<int> flows;  // cases x affiliates
    std::vector<int> fixed;  // affiliate per case or -1
    std::vector<uint8_t> allowed;  // touched cases only; cases x affiliates
    std::vector<int64_t> residual;  // capacity left after fixed cases
    int branch_case = -1;
    int branch_aff = -1;
  };

  double adjusted(size_t i, size_t l) const {
    return per_refugee_[i * m_ + l] * cases_[i].size;
  }

  bool improves(double bound) const {
    if (best_.empty()) return true;
    return bound > best_value_ + 1e-11 * std::max(1.0, std::abs(best_value_));
  }

  void build_base() {
    base_.emplace(caps_.view(), order_);
    base_rows_.assign(cases_.size(), -1);
    std::vector<double> v(m_);
    std::vector<uint8_t> ok(m_);
    for (size_t i = 0; i < cases_.size(); ++i) {
      if (touched_[i]) continue;
      for (size_t l = 0; l < m_; ++l) {
        ok[l] = compatible_[i * m_ + l];
        v[l] = per_refugee_[i * m_ + l];
      }
      base_rows_[i] = static_cast<int>(base_->num_cases());
      base_->add_case(cases_[i].size, v, ok);
    }
  }

  std::optional<Relaxation> relax(const Node& node) {
    const size_t n = cases_.size();
    Relaxation r;
    r.fixed.assign(n, -1);
    r.allowed.assign(n * m_, 0);
    for (int i : touched_list_) {
      for (size_t l = 0; l < m_; ++l) {
        r.allowed[i * m_ + l] = compatible_[i * m_ + l];
      }
    }
    for (const Fixing& f : node.fixings) {
      if (f.fix) {
        r.fixed[f.i] = f.l;
      } else {
        r.allowed[static_cast<size_t>(f.i) * m_ + f.l] = 0;
      }
    }
    r.residual.assign(m_, 0);
    for (size_t l = 0; l < m_; ++l) {
      if (!caps_[l].is_infinite()) r.residual[l] = caps_[l].value();
    }
    for (size_t i = 0; i < n; ++i) {
      if (r.fixed[i] < 0 || caps_[r.fixed[i]].is_infinite()) continue;
      r.residual[r.fixed[i]] -= cases_[i].size;
      if (r.residual[r.fixed[i]] < 0) return std::nullopt;
    }

    if (!base_) build_base();
    if (!have_root_ && node.fixings.empty()) capture_root(*base_);
    lp::TransportSolver solver = *base_;
    std::vector<int> rows(n, -1);
    for (size_t i = 0; i < n; ++i) rows[i] = base_rows_[i];
    std::vector<double> v(m_);
    std::vector<uint8_t> ok(m_);
    for (int i : touched_list_) {
      const size_t iu = static_cast<size_t>(i);
      for (size_t l = 0; l < m_; ++l) {
        v[l] = per_refugee_[iu * m_ + l];
        ok[l] = r.allowed[iu * m_ + l] &&
                (caps_[l].is_infinite() || r.residual[l] >= cases_[iu].size);
      }
      if (r.fixed[iu] >= 0) {
        const size_t l = static_cast<size_t>(r.fixed[iu]);
        std::fill(ok.begin(), ok.end(), 0);
        ok[l] = 1;
        ok[sink_] = 1;
        if (l != sink_) v[sink_] = -penalty_;
      }
      rows[iu] = static_cast<int>(solver.num_cases());
      solver.add_case(cases_[iu].size, v, ok);
    }

    r.flows.assign(n * m_, 0);
    double bound = 0.0;
    double best_gap = kInf;  // negated weight, smaller is better
    for (size_t i = 0; i < n; ++i) {
      const int size = cases_[i].size;
      const size_t row = static_cast<size_t>(rows[i]);
      for (size_t l = 0; l < m_; ++l) {
        const int w = solver.flow(row, l);
        if (w == 0) continue;
        r.flows[i * m_ + l] = w;
        if (r.fixed[i] >= 0) {
          if (static_cast<int>(l) != r.fixed[i]) return std::nullopt;
          continue;
        }
        bound += per_refugee_[i * m_ + l] * w;
        if (w == size) continue;
        // Branch on the fractional pair carrying the most objective weight.
        const double gap = -std::abs(per_refugee_[i * m_ + l]) * w;
        const bool better =
            gap < best_gap - 1e-12 ||
            (std::abs(gap - best_gap) <= 1e-12 &&
             (static_cast<int>(i) < r.branch_case ||
              (static_cast<int>(i) == r.branch_case &&
               rank_[l] < rank_[static_cast<size_t>(r.branch_aff)])));
        if (better) {
          best_gap = gap;
          r.branch_case = static_cast<int>(i);
          r.branch_aff = static_cast<int>(l);
        }
      }
      if (r.fixed[i] >= 0) bound += adjusted(i, static_cast<size_t>(r.fixed[i]));
    }
    r.bound = bound;
    return r;
  }

  // Keeps integral LP placements and places split cases greedily.
  void heuristic(const Node&, const Relaxation& r) {
    const size_t n = cases_.size();
    std::vector<size_t> placement(n, sink_);
    std::vector<int64_t> residual = r.residual;
    std::vector<size_t> split;
    for (size_t i = 0; i < n; ++i) {
      if (r.fixed[i] >= 0) {
        placement[i] = static_cast<size_t>(r.fixed[i]);
        continue;
      }
      bool whole = false;
      for (size_t l = 0; l < m_; ++l) {
        if (r.flows[i * m_ + l] == cases_[i].size) {
          placement[i] = l;
          if (!caps_[l].is_infinite()) residual[l] -= cases_[i].size;
          whole = true;
        }
      }
      if (!whole) split.push_back(i);
    }
    for (size_t i : split) {
      size_t pick = sink_;
      double pick_value = 0.0;
      for (size_t l : order_) {
        const bool ok = touched_[i] ? r.allowed[i * m_ + l]
                                    : compatible_[i * m_ + l];
        if (!ok || l == sink_) continue;
        if (!caps_[l].is_infinite() && residual[l] < cases_[i].size) continue;
        if (adjusted(i, l) > pick_value) {
          pick = l;
          pick_value = adjusted(i, l);
        }
      }
      placement[i] = pick;
      if (!caps_[pick].is_infinite()) residual[pick] -= cases_[i].size;
    }
    double value = 0.0;
    for (size_t i = 0; i < n; ++i) value += adjusted(i, placement[i]);
    if (improves(value)) {
      best_ = std::move(placement);
      best_value_ = value;
      fix_by_reduced_cost();
    }
  }

  // Records root duals: y_i per refugee and the prices.
  void capture_root(const lp::TransportSolver& root) {
    root_bound_ = root.objective();
    root_prices_.assign(root.prices().begin(), root.prices().end());
    have_root_ = true;
  }

  // An arc whose root reduced cost exceeds the gap to the incumbent cannot
  // appear in any better solution.
  void fix_by_reduced_cost() {
    if (!have_root_) return;
    const double gap = root_bound_ - best_value_ +
                       1e-9 * std::max(1.0, std::abs(best_value_));
    bool changed = false;
    for (size_t i = 0; i < cases_.size(); ++i) {
      double y = -kInf;
      for (size_t l = 0; l < m_; ++l) {
        if (compatible_[i * m_ + l]) {
          y = std::max(y, per_refugee_[i * m_ + l] - root_prices_[l]);
        }
      }
      for (size_t l = 0; l < m_; ++l) {
        if (!compatible_[i * m_ + l] || l == sink_) continue;
        const double rc =
            (y - (per_refugee_[i * m_ + l] - root_prices_[l])) * cases_[i].size;
        if (rc > gap) {
          compatible_[i * m_ + l] = 0;
          changed = true;
        }
      }
    }
    if (changed) base_.reset();
  }

  std::span<const Case> cases_;
  const CapacityProfile& caps_;
  size_t sink_;
  size_t m_;
  std::vector<size_t> order_;
  std::vector<size_t> rank_;
  int64_t node_limit_ = 0;
  std::vector<double> per_refugee_;
  std::vector<uint8_t> compatible_;
  double penalty_ = 1.0;
  bool have_root_ = false;
  double root_bound_ = 0.0;
  std::vector<double> root_prices_;
  std::vector<uint8_t> touched_;
  std::vector<int> touched_list_;
  std::optional<lp::TransportSolver> base_;
  std::vector<int> base_rows_;
  std::vector<Node> storage_;
  std::vector<size_t> best_;
  double best_value_ = -kInf;
};

}  // namespace

double default_epsilon(int64_t total_refugees) {
  return 1e-6 / (1.0 + static_cast<double>(total_refugees));
}

void recompute_totals(std::span<const Case> cases, size_t sink,
                      size_t num_affiliates, Assignment& a) {
  a.value = 0.0;
  a.matched_refugees = 0;
  a.consumed.assign(num_affiliates, 0);
  for (size_t i = 0; i < cases.size(); ++i) {
    const size_t l = a.placement.at(i);
    a.consumed.at(l) += cases[i].size;
    if (l == sink) continue;
    a.matched_refugees += cases[i].size;
    a.value += cases[i].scores[l].estimate().value_or(0.0);
  }
}

Assignment solve_ilp(std::span<const Case> cases, const CapacityProfile& caps,
                     size_t sink, const IlpOptions& options) {
  BranchAndBound bnb(cases, caps, sink, options);
  Assignment out = bnb.run();
  if (out.placement.empty()) out.placement.assign(cases.size(), sink);
  recompute_totals(cases, sink, caps.size(), out);
  out.objective = 0.0;
  for (size_t i = 0; i < cases.size(); ++i) {
    const size_t l = out.placement[i];
    if (l == sink) continue;
    const double p = options.potentials.empty() ? 0.0 : options.potentials[l];
    out.objective += cases[i].scores[l].value() - cases[i].size * p +
                     options.epsilon_matched * cases[i].size;
  }
  return out;
}

double opt(std::span<const Case> cases, const CapacityProfile& caps,
           size_t sink) {
  return solve_ilp(cases, caps, sink).value;
}

Assignment hindsight_optimum(const Instance& instance,
                             const CapacityProfile& caps,
                             std::span<const size_t> tie_order) {
  const size_t sink = instance.sink_index();
  IlpOptions options;
  options.tie_order = tie_order;
  Assignment out = solve_ilp(instance.cases, caps, sink, options);

  std::vector<size_t> order(tie_order.begin(), tie_order.end());
  if (order.empty()) {
    for (size_t l = 0; l < caps.size(); ++l) order.push_back(l);
  }
  std::vector<int64_t> room(caps.size(), 0);
  for (size_t l = 0; l < caps.size(); ++l) {
    if (!caps[l].is_infinite()) room[l] = caps[l].value() - out.consumed[l];
  }
  for (size_t i = 0; i < instance.cases.size(); ++i) {
    if (out.placement[i] != sink) continue;
    const Case& c = instance.cases[i];
    for (size_t l : order) {
      if (l == sink || !c.scores[l].compatible() || c.scores[l].value() != 0.0) {
        continue;
      }
      if (!caps[l].is_infinite() && room[l] < c.size) continue;
      out.placement[i] = l;
      if (!caps[l].is_infinite()) room[l] -= c.size;
      break;
    }
  }
  const double objective = out.objective;
  recompute_totals(instance.cases, sink, caps.size(), out);
  out.objective = objective;
  return out;
}

}  // namespace dynmatch
