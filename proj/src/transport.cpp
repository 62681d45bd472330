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

// Successive shortest augmenting paths on the affiliate graph.
//
// State: integral refugee flows w[j][l], per-refugee prices p[l] >= 0 with
// p[l] = 0 whenever l has slack, and complementary slackness
//   w[j][l] > 0  =>  v[j][l] - p[l] = max_k (v[j][k] - p[k]).
// Inserting a case routes its refugees one shortest path at a time. A path
// enters some affiliate, then repeatedly displaces a refugee of case j from
// affiliate a to affiliate b, and ends at an affiliate with slack. Reduced
// costs y[j] - (v[j][b] - p[b]) are non-negative, so Dijkstra applies, and
// the usual potential update keeps them so.

#include <algorithm>
#include <cmath>

#include "dynmatch/lp.hpp"

namespace dynmatch::lp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TransportSolver::TransportSolver(std::span<const Capacity> caps,
                                 std::span<const size_t> scan_order)
    : caps_(caps.begin(), caps.end()),
      rank_(caps.size()),
      members_(caps.size()),
      load_(caps.size(), 0),
      price_(caps.size(), 0.0),
      dist_(caps.size()),
      parent_aff_(caps.size()),
      parent_case_(caps.size()),
      settled_(caps.size()) {
  if (scan_order.empty()) {
    for (size_t l = 0; l < rank_.size(); ++l) rank_[l] = l;
  } else {
    if (scan_order.size() != caps.size()) {
      throw Error("invalid_lp", "scan order must rank every affiliate");
    }
    for (size_t r = 0; r < scan_order.size(); ++r) rank_.at(scan_order[r]) = r;
  }
}

void TransportSolver::add_member(size_t i, size_t l) {
  const size_t m = caps_.size();
  if (member_pos_[i * m + l] >= 0) return;
  member_pos_[i * m + l] = static_cast<int>(members_[l].size());
  members_[l].push_back(static_cast<int>(i));
}

void TransportSolver::remove_member(size_t i, size_t l) {
  const size_t m = caps_.size();
  const int pos = member_pos_[i * m + l];
  if (pos < 0) return;
  std::vector<int>& list = members_[l];
  const int moved = list.back();
  list[pos] = moved;
  member_pos_[static_cast<size_t>(moved) * m + l] = pos;
  list.pop_back();
  member_pos_[i * m + l] = -1;
}

void TransportSolver::add_case(int size, std::span<const double> value,
                               std::span<const uint8_t> allowed) {
  const size_t m = caps_.size();
  if (value.size() != m || allowed.size() != m) {
    throw Error("invalid_lp", "case does not cover every affiliate");
  }
  if (size < 1) throw Error("invalid_lp", "case size must be positive");
  bool has_sink = false;
  for (size_t l = 0; l < m; ++l) {
    has_sink |= allowed[l] && caps_[l].is_infinite();
  }
  if (!has_sink) {
    throw Error("invalid_lp", "case has no infinite-capacity column");
  }
  const size_t i = sizes_.size();
  sizes_.push_back(size);
  value_.insert(value_.end(), value.begin(), value.end());
  allowed_.insert(allowed_.end(), allowed.begin(), allowed.end());
  flow_.resize(flow_.size() + m, 0);
  member_pos_.resize(member_pos_.size() + m, -1);
  route(i);
}

void TransportSolver::route(size_t i) {
  const size_t m = caps_.size();
  const double* vi = &value_[i * m];
  const uint8_t* ai = &allowed_[i * m];
  int remaining = sizes_[i];
  // Each augmentation finishes the case, fills a terminal, or empties an
  // exchange arc.
  int64_t budget = 16 * (static_cast<int64_t>(sizes_.size() + m) +
                         remaining) + 1000;

  while (remaining > 0) {
    if (--budget < 0) {
      throw NumericalFailure("transport solver exceeded augmentation budget");
    }
    double yi = -kInf;
    for (size_t l = 0; l < m; ++l) {
      if (ai[l] && usable(l)) yi = std::max(yi, vi[l] - price_[l]);
    }
    for (size_t l = 0; l < m; ++l) {
      settled_[l] = 0;
      parent_case_[l] = -1;
      parent_aff_[l] = -1;
      dist_[l] = (ai[l] && usable(l))
                     ? std::max(0.0, yi - (vi[l] - price_[l]))
                     : kInf;
    }

    int target = -1;
    double reach = kInf;
    for (size_t step = 0; step < m; ++step) {
      int a = -1;
      for (size_t l = 0; l < m; ++l) {
        if (settled_[l] || dist_[l] == kInf) continue;
        if (a < 0 || dist_[l] < dist_[a] ||
            (dist_[l] == dist_[a] && rank_[l] < rank_[a])) {
          a = static_cast<int>(l);
        }
      }
      if (a < 0) break;
      settled_[a] = 1;
      if (terminal(a)) {
        target = a;
        reach = dist_[a];
        break;
      }
      const double da = dist_[a];
      const double pa = price_[a];
      for (int j : members_[a]) {
        const double* vj = &value_[static_cast<size_t>(j) * m];
        const uint8_t* aj = &allowed_[static_cast<size_t>(j) * m];
        const double yj = vj[a] - pa;
        for (size_t b = 0; b < m; ++b) {
          if (settled_[b] || !aj[b] || !usable(b)) continue;
          const double nd = da + std::max(0.0, yj - (vj[b] - price_[b]));
          if (nd < dist_[b]) {
            dist_[b] = nd;
            parent_aff_[b] = a;
            parent_case_[b] = j;
          }
        }
      }
    }
    if (target < 0) {
      throw NumericalFailure("no augmenting path to an affiliate with slack");
    }

    for (size_t l = 0; l < m; ++l) {
      if (settled_[l] && static_cast<int>(l) != target) {
        price_[l] += reach - dist_[l];
      }
    }

    int delta = remaining;
    if (!caps_[target].is_infinite()) {
      delta = static_cast<int>(
          std::min<int64_t>(delta, caps_[target].value() - load_[target]));
    }
    for (int b = target; parent_case_[b] >= 0; b = parent_aff_[b]) {
      const size_t j = static_cast<size_t>(parent_case_[b]);
      delta = std::min(delta, flow_[j * m + parent_aff_[b]]);
    }

    int b = target;
    while (parent_case_[b] >= 0) {
      const size_t j = static_cast<size_t>(parent_case_[b]);
      const int a = parent_aff_[b];
      flow_[j * m + a] -= delta;
      if (flow_[j * m + a] == 0) remove_member(j, a);
      if (flow_[j * m + b] == 0) add_member(j, b);
      flow_[j * m + b] += delta;
      b = a;
    }
    if (flow_[i * m + b] == 0) add_member(i, b);
    flow_[i * m + b] += delta;
    load_[target] += delta;
    remaining -= delta;
  }
}

double TransportSolver::objective() const {
  double total = 0.0;
  for (size_t k = 0; k < flow_.size(); ++k) {
    if (flow_[k] != 0) total += value_[k] * flow_[k];
  }
  return total;
}

std::vector<double> TransportSolver::extremal_prices(Extremality sense) const {
  const size_t m = caps_.size();
  const size_t anchor = m;  // virtual node fixed at price 0
  const size_t nodes = m + 1;
  // w[u][v]: tightest bound in p[v] <= p[u] + w[u][v]; shortest paths
  // after closure.
  std::vector<double> w(nodes * nodes, kInf);
  auto relax = [&](size_t u, size_t v, double weight) {
    double& cur = w[u * nodes + v];
    cur = std::min(cur, weight);
  };
  for (size_t l = 0; l < m; ++l) {
    relax(l, anchor, 0.0);  // p[l] >= 0
    if (!usable(l)) continue;
    if (terminal(l)) relax(anchor, l, 0.0);  // slack forces p[l] = 0
  }
  // Complementary slackness for every positive flow, including flow on
  // affiliates with slack.
  for (size_t a = 0; a < m; ++a) {
    for (int j : members_[a]) {
      const double* vj = &value_[static_cast<size_t>(j) * m];
      const uint8_t* aj = &allowed_[static_cast<size_t>(j) * m];
      for (size_t b = 0; b < m; ++b) {
        if (b == a || !aj[b] || !usable(b)) continue;
        // p[a] - p[b] <= v[j][a] - v[j][b]
        relax(b, a, vj[a] - vj[b]);
      }
    }
  }
  for (size_t v = 0; v < nodes; ++v) {
    w[v * nodes + v] = std::min(0.0, w[v * nodes + v]);
  }
  for (size_t k = 0; k < nodes; ++k) {
    for (size_t u = 0; u < nodes; ++u) {
      const double uk = w[u * nodes + k];
      if (uk == kInf) continue;
      for (size_t v = 0; v < nodes; ++v) {
        const double kv = w[k * nodes + v];
        if (kv == kInf) continue;
        if (uk + kv < w[u * nodes + v]) w[u * nodes + v] = uk + kv;
      }
    }
  }

  std::vector<double> p(m, 0.0);
  for (size_t l = 0; l < m; ++l) {
    if (!usable(l) || terminal(l)) continue;
    const double v = sense == Extremality::kMaximal ? w[anchor * nodes + l]
                                                    : -w[l * nodes + anchor];
    if (!std::isfinite(v)) {
      throw NumericalFailure("optimal dual face unbounded at a full affiliate");
    }
    p[l] = std::max(0.0, v);
  }

  // Zero-capacity affiliates: smallest price that keeps every case's
  // current best option optimal.
  for (size_t b = 0; b < m; ++b) {
    if (usable(b)) continue;
    double lo = 0.0;
    for (size_t j = 0; j < sizes_.size(); ++j) {
      const double* vj = &value_[j * m];
      const uint8_t* aj = &allowed_[j * m];
      if (!aj[b]) continue;
      double yj = -kInf;
      for (size_t l = 0; l < m; ++l) {
        if (aj[l] && usable(l)) yj = std::max(yj, vj[l] - p[l]);
      }
      lo = std::max(lo, vj[b] - yj);
    }
    p[b] = lo;
  }
  return p;
}

}  // namespace dynmatch::lp
