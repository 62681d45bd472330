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

// Matching LP relaxation and its capacity shadow prices.
//
//   maximize   sum_i sum_l u[i][l] x[i][l]
//   subject to sum_l x[i][l] = 1              for every case i
//              sum_i s[i] x[i][l] <= c[l]     for every finite-capacity l
//              0 <= x[i][l] <= 1              for every allowed pair
//
// Two independent routes solve it:
//  * the default route treats the LP as a transportation problem in refugee
//    units (w = s x) and solves it with TransportSolver; extremal prices
//    are shortest-path distances over the optimal dual face;
//  * lp::reference solves the x-form with the dense Simplex and obtains
//    extremal prices by re-optimizing sum_l p[l] over the optimal face of
//    the explicit dual LP.

#ifndef DYNMATCH_LP_HPP_
#define DYNMATCH_LP_HPP_

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dynmatch/model.hpp"

namespace dynmatch::lp {

inline constexpr double kFeasibilityTol = 1e-7;
inline constexpr double kOptimalityTol = 1e-7;
inline constexpr double kReportTol = 1e-6;

class NumericalFailure : public Error {
 public:
  explicit NumericalFailure(const std::string& message)
      : Error("numerical_failure", message) {}
};

struct LpCase {
  int size = 1;
  // One entry per affiliate; nullopt means the pair has no variable.
  std::vector<std::optional<double>> scores;
};

struct MatchLpSpec {
  std::vector<Capacity> caps;  // infinite capacities get no row
  std::vector<LpCase> cases;

  size_t num_affiliates() const { return caps.size(); }
  // Throws Error("invalid_lp") unless every case covers every affiliate
  // and has an allowed infinite-capacity column.
  void check() const;
};

enum class Extremality { kMaximal, kMinimal };

struct DualSolution {
  std::vector<double> prices;      // p[l] >= 0, zero on infinite capacity
  std::vector<double> case_duals;  // y[i] = max_l u[i][l] - s[i] p[l]
  Extremality extremality = Extremality::kMaximal;
  double primal_value = 0.0;

  // sum_i y[i] + sum_l p[l] c[l] over finite capacities.
  double dual_value(std::span<const Capacity> caps) const;
};

struct LpSolution {
  std::vector<double> x;  // cases x affiliates, row-major
  double value = 0.0;
  size_t num_affiliates = 0;

  double at(size_t i, size_t l) const { return x[i * num_affiliates + l]; }
};

LpSolution solve_lp(const MatchLpSpec& spec);
DualSolution extremal_duals(const MatchLpSpec& spec, Extremality sense);

// Incremental shortest-augmenting-path solver for the refugee-unit
// transportation problem. Cases are inserted one at a time; after each
// insertion the flow is optimal for the cases inserted so far. Flows are
// integral in refugees, so the only fractional x are split cases.
class TransportSolver {
 public:
  // `scan_order` ranks affiliates for tie-breaking (first = preferred);
  // empty means index order.
  TransportSolver(std::span<const Capacity> caps,
                  std::span<const size_t> scan_order = {});

  // `value_per_refugee[l]` is the objective coefficient of one refugee of
  // this case at l; `allowed[l] == 0` removes the pair. At least one
  // allowed affiliate must have infinite capacity.
  void add_case(int size, std::span<const double> value_per_refugee,
                std::span<const uint8_t> allowed);

  size_t num_cases() const { return sizes_.size(); }
  size_t num_affiliates() const { return caps_.size(); }
  int flow(size_t i, size_t l) const { return flow_[i * caps_.size() + l]; }
  int64_t load(size_t l) const { return load_[l]; }
  double objective() const;
  // Optimal per-refugee prices maintained by the solver (not extremal).
  std::span<const double> prices() const { return price_; }

  // Element-wise maximal or minimal optimal prices of the capacity rows,
  // per refugee. Affiliates with zero capacity get the smallest price
  // consistent with dual feasibility in both senses (their price is
  // otherwise unbounded above).
  std::vector<double> extremal_prices(Extremality sense) const;

 private:
  bool usable(size_t l) const {
    return caps_[l].is_infinite() || caps_[l].value() > 0;
  }
  bool terminal(size_t l) const {
    return caps_[l].is_infinite() || load_[l] < caps_[l].value();
  }
  void route(size_t i);
  void add_member(size_t i, size_t l);
  void remove_member(size_t i, size_t l);

  std::vector<Capacity> caps_;
  std::vector<size_t> rank_;
  std::vector<int> sizes_;
  std::vector<double> value_;    // per refugee, cases x affiliates
  std::vector<uint8_t> allowed_;  // cases x affiliates
  std::vector<int> flow_;        // refugees, cases x affiliates
  std::vector<int> member_pos_;  // position in members_[l] or -1
  std::vector<std::vector<int>> members_;
  std::vector<int64_t> load_;
  std::vector<double> price_;
  // Dijkstra scratch.
  std::vector<double> dist_;
  std::vector<int> parent_aff_;
  std::vector<int> parent_case_;
  std::vector<uint8_t> settled_;
};

// Dense bounded-variable primal simplex. Variables have lower bound 0 and
// an optional finite upper bound. Dantzig pricing switches to Bland's rule
// after a run of degenerate pivots.
class Simplex {
 public:
  enum class RowSense { kLe, kGe, kEq };
  enum class Status { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

  int add_variable(double objective,
                   double upper = std::numeric_limits<double>::infinity());
  int add_row(std::vector<std::pair<int, double>> coeffs, RowSense sense,
              double rhs);
  void set_objective(int var, double objective) { obj_.at(var) = objective; }

  Status maximize();
  Status minimize();

  double objective_value() const { return objective_; }
  double value(int var) const { return values_.at(var); }
  // Shadow price of a row for the last solved sense.
  double row_dual(int row) const { return duals_.at(row); }
  int num_variables() const { return static_cast<int>(obj_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  int64_t iterations() const { return iterations_; }

  int64_t iteration_limit = 200000;
  int degeneracy_threshold = 50;

 private:
  struct Row {
    std::vector<std::pair<int, double>> coeffs;
    RowSense sense;
    double rhs;
  };
  Status solve(std::span<const double> objective);

  std::vector<double> obj_;
  std::vector<double> upper_;
  std::vector<Row> rows_;
  std::vector<double> values_;
  std::vector<double> duals_;
  double objective_ = 0.0;
  int64_t iterations_ = 0;
};

namespace reference {

LpSolution solve_lp(const MatchLpSpec& spec);

// Two-stage extraction: solve the dual LP, then fix its objective to the
// optimum (within kFeasibilityTol) and optimize sum_l p[l] in the
// requested sense. With `per_coordinate`, each p[l] is instead optimized
// on its own over the same face.
DualSolution extremal_duals(const MatchLpSpec& spec, Extremality sense,
                            bool per_coordinate = false);

}  // namespace reference

}  // namespace dynmatch::lp

#endif  // DYNMATCH_LP_HPP_
