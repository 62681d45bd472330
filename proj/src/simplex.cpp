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

#include <algorithm>
#include <cmath>

#include "dynmatch/lp.hpp"

namespace dynmatch::lp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-9;

// Full tableau of B^-1 [A | b] plus the reduced-cost row.
struct Tableau {
  int rows = 0;
  int cols = 0;
  std::vector<double> t;  // rows x cols
  std::vector<double> beta;
  std::vector<double> d;  // reduced costs c_j - c_B B^-1 a_j
  std::vector<double> upper;
  std::vector<uint8_t> at_upper;
  std::vector<int> basis;
  std::vector<int> position;  // basis row of a column or -1

  double& at(int r, int c) { return t[static_cast<size_t>(r) * cols + c]; }

  void pivot(int r, int q) {
    const double inv = 1.0 / at(r, q);
    double* pr = &t[static_cast<size_t>(r) * cols];
    for (int c = 0; c < cols; ++c) pr[c] *= inv;
    pr[q] = 1.0;
    for (int i = 0; i < rows; ++i) {
      if (i == r) continue;
      double* pi = &t[static_cast<size_t>(i) * cols];
      const double f = pi[q];
      if (f == 0.0) continue;
      for (int c = 0; c < cols; ++c) pi[c] -= f * pr[c];
      pi[q] = 0.0;
    }
    const double f = d[q];
    if (f != 0.0) {
      for (int c = 0; c < cols; ++c) d[c] -= f * pr[c];
      d[q] = 0.0;
    }
    position[basis[r]] = -1;
    basis[r] = q;
    position[q] = r;
  }

  void price(std::span<const double> cost) {
    for (int c = 0; c < cols; ++c) {
      double z = 0.0;
      for (int i = 0; i < rows; ++i) z += cost[basis[i]] * at(i, c);
      d[c] = cost[c] - z;
    }
  }
};

enum class Outcome { kOptimal, kUnbounded, kIterationLimit };

Outcome iterate(Tableau& tab, std::span<const uint8_t> may_enter,
                int64_t limit, int degeneracy_threshold, int64_t& iterations) {
  int degenerate_run = 0;
  while (true) {
    if (iterations >= limit) return Outcome::kIterationLimit;
    const bool bland = degenerate_run >= degeneracy_threshold;
    int q = -1;
    double best = 0.0;
    for (int c = 0; c < tab.cols; ++c) {
      if (tab.position[c] >= 0 || !may_enter[c]) continue;
      const double dc = tab.d[c];
      const bool up = tab.at_upper[c];
      if (!up && !(dc > kOptimalityTol && tab.upper[c] > 0.0)) continue;
      if (up && !(dc < -kOptimalityTol)) continue;
      if (bland) {
        q = c;
        break;
      }
      if (std::abs(dc) > best) {
        best = std::abs(dc);
        q = c;
      }
    }
    if (q < 0) return Outcome::kOptimal;
    ++iterations;

    const double dir = tab.at_upper[q] ? -1.0 : 1.0;
    double theta = tab.upper[q];  // bound flip
    int leave = -1;
    bool leave_to_upper = false;
    double leave_alpha = 0.0;
    for (int r = 0; r < tab.rows; ++r) {
      const double rate = -dir * tab.at(r, q);  // d beta_r / d theta
      if (std::abs(rate) <= kPivotTol) continue;
      const int bv = tab.basis[r];
      double limit_r;
      bool to_upper;
      if (rate < 0.0) {
        limit_r = std::max(0.0, tab.beta[r]) / -rate;
        to_upper = false;
      } else {
        if (tab.upper[bv] == kInf) continue;
        limit_r = std::max(0.0, tab.upper[bv] - tab.beta[r]) / rate;
        to_upper = true;
      }
      bool take = limit_r < theta - 1e-12;
      if (!take && leave >= 0 && std::abs(limit_r - theta) <= 1e-12) {
        take = bland ? bv < tab.basis[leave]
                     : std::abs(rate) > std::abs(leave_alpha);
      }
      if (leave < 0 && limit_r <= theta) take = true;
      if (take) {
        theta = limit_r;
        leave = r;
        leave_to_upper = to_upper;
        leave_alpha = rate;
      }
    }
    if (theta == kInf) return Outcome::kUnbounded;
    degenerate_run = theta <= 1e-12 ? degenerate_run + 1 : 0;

    for (int r = 0; r < tab.rows; ++r) {
      tab.beta[r] += -dir * tab.at(r, q) * theta;
    }
    if (leave < 0) {
      tab.at_upper[q] = !tab.at_upper[q];
      continue;
    }
    const int out = tab.basis[leave];
    const double entering_value =
        dir > 0 ? theta : tab.upper[q] - theta;
    tab.pivot(leave, q);
    tab.beta[leave] = entering_value;
    tab.at_upper[out] = leave_to_upper;
    tab.at_upper[q] = 0;
  }
}

}  // namespace

int Simplex::add_variable(double objective, double upper) {
  if (!(upper >= 0.0)) throw Error("invalid_lp", "upper bound below zero");
  obj_.push_back(objective);
  upper_.push_back(upper);
  return static_cast<int>(obj_.size()) - 1;
}

int Simplex::add_row(std::vector<std::pair<int, double>> coeffs,
                     RowSense sense, double rhs) {
  for (const auto& [var, coef] : coeffs) {
    if (var < 0 || var >= num_variables()) {
      throw Error("invalid_lp", "row references unknown variable");
    }
    (void)coef;
  }
  rows_.push_back({std::move(coeffs), sense, rhs});
  return static_cast<int>(rows_.size()) - 1;
}

Simplex::Status Simplex::maximize() { return solve(obj_); }

Simplex::Status Simplex::minimize() {
  std::vector<double> neg(obj_.size());
  for (size_t j = 0; j < obj_.size(); ++j) neg[j] = -obj_[j];
  Status s = solve(neg);
  objective_ = -objective_;
  for (double& y : duals_) y = -y;
  return s;
}

Simplex::Status Simplex::solve(std::span<const double> objective) {
  const int n = num_variables();
  const int m = num_rows();
  int slacks = 0;
  for (const Row& row : rows_) slacks += row.sense != RowSense::kEq;

  Tableau tab;
  tab.rows = m;
  tab.cols = n + slacks + m;
  tab.t.assign(static_cast<size_t>(m) * tab.cols, 0.0);
  tab.beta.assign(m, 0.0);
  tab.d.assign(tab.cols, 0.0);
  tab.upper.assign(tab.cols, kInf);
  tab.at_upper.assign(tab.cols, 0);
  tab.basis.assign(m, -1);
  tab.position.assign(tab.cols, -1);
  for (int j = 0; j < n; ++j) tab.upper[j] = upper_[j];

  std::vector<double> sign(m, 1.0);
  int next_slack = n;
  const int first_art = n + slacks;
  for (int r = 0; r < m; ++r) {
    const Row& row = rows_[r];
    sign[r] = row.rhs < 0.0 ? -1.0 : 1.0;
    for (const auto& [var, coef] : row.coeffs) tab.at(r, var) += sign[r] * coef;
    if (row.sense == RowSense::kLe) tab.at(r, next_slack++) = sign[r];
    if (row.sense == RowSense::kGe) tab.at(r, next_slack++) = -sign[r];
    tab.at(r, first_art + r) = 1.0;
    tab.beta[r] = sign[r] * row.rhs;
    tab.basis[r] = first_art + r;
    tab.position[first_art + r] = r;
  }

  std::vector<uint8_t> may_enter(tab.cols, 1);
  iterations_ = 0;

  // Phase 1: drive the artificials to zero.
  std::vector<double> phase1(tab.cols, 0.0);
  for (int r = 0; r < m; ++r) phase1[first_art + r] = -1.0;
  tab.price(phase1);
  Outcome o = iterate(tab, may_enter, iteration_limit, degeneracy_threshold,
                      iterations_);
  if (o == Outcome::kIterationLimit) return Status::kIterationLimit;
  double infeasibility = 0.0;
  for (int r = 0; r < m; ++r) {
    if (tab.basis[r] >= first_art) infeasibility += std::abs(tab.beta[r]);
  }
  if (infeasibility > kFeasibilityTol * (1.0 + m)) return Status::kInfeasible;

  for (int c = first_art; c < tab.cols; ++c) {
    may_enter[c] = 0;
    tab.upper[c] = 0.0;
  }
  // Pivot basic artificials out where a structural column allows it.
  for (int r = 0; r < m; ++r) {
    if (tab.basis[r] < first_art) continue;
    int best = -1;
    double mag = kPivotTol * 1e3;
    for (int c = 0; c < first_art; ++c) {
      if (tab.position[c] >= 0 || tab.at_upper[c]) continue;
      if (std::abs(tab.at(r, c)) > mag) {
        mag = std::abs(tab.at(r, c));
        best = c;
      }
    }
    if (best >= 0) {
      const int out = tab.basis[r];
      const double value = tab.beta[r] / tab.at(r, best);
      for (int i = 0; i < m; ++i) {
        if (i != r) tab.beta[i] -= tab.at(i, best) * value;
      }
      tab.pivot(r, best);
      tab.beta[r] = value;
      tab.at_upper[out] = 0;
    }
  }

  // Phase 2.
  std::vector<double> cost(tab.cols, 0.0);
  for (int j = 0; j < n; ++j) cost[j] = objective[j];
  tab.price(cost);
  o = iterate(tab, may_enter, iteration_limit, degeneracy_threshold,
              iterations_);
  if (o == Outcome::kIterationLimit) return Status::kIterationLimit;
  if (o == Outcome::kUnbounded) return Status::kUnbounded;

  values_.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    if (tab.position[j] >= 0) {
      values_[j] = tab.beta[tab.position[j]];
    } else if (tab.at_upper[j]) {
      values_[j] = tab.upper[j];
    }
  }
  objective_ = 0.0;
  for (int j = 0; j < n; ++j) objective_ += objective[j] * values_[j];
  // y = c_B B^-1; the artificial block of the tableau holds B^-1.
  duals_.assign(m, 0.0);
  for (int r = 0; r < m; ++r) {
    double y = 0.0;
    for (int i = 0; i < m; ++i) y += cost[tab.basis[i]] * tab.at(i, first_art + r);
    duals_[r] = sign[r] * y;
  }
  return Status::kOptimal;
}

}  // namespace dynmatch::lp
