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

bool usable(const Capacity& c) { return c.is_infinite() || c.value() > 0; }

TransportSolver build(const MatchLpSpec& spec) {
  spec.check();
  const size_t m = spec.num_affiliates();
  TransportSolver solver(spec.caps);
  std::vector<double> v(m);
  std::vector<uint8_t> allowed(m);
  for (const LpCase& c : spec.cases) {
    for (size_t l = 0; l < m; ++l) {
      allowed[l] = c.scores[l].has_value();
      v[l] = allowed[l] ? *c.scores[l] / c.size : 0.0;
    }
    solver.add_case(c.size, v, allowed);
  }
  return solver;
}

std::vector<double> case_duals(const MatchLpSpec& spec,
                               std::span<const double> prices) {
  std::vector<double> y(spec.cases.size(), -kInf);
  for (size_t i = 0; i < spec.cases.size(); ++i) {
    const LpCase& c = spec.cases[i];
    for (size_t l = 0; l < spec.num_affiliates(); ++l) {
      if (!c.scores[l]) continue;
      y[i] = std::max(y[i], *c.scores[l] - c.size * prices[l]);
    }
  }
  return y;
}

// Smallest feasible price on zero-capacity rows given the other prices.
void price_zero_capacity(const MatchLpSpec& spec, std::vector<double>& p) {
  const size_t m = spec.num_affiliates();
  for (size_t b = 0; b < m; ++b) {
    if (usable(spec.caps[b])) continue;
    double lo = 0.0;
    for (const LpCase& c : spec.cases) {
      if (!c.scores[b]) continue;
      double y = -kInf;
      for (size_t l = 0; l < m; ++l) {
        if (c.scores[l] && usable(spec.caps[l])) {
          y = std::max(y, *c.scores[l] - c.size * p[l]);
        }
      }
      lo = std::max(lo, (*c.scores[b] - y) / c.size);
    }
    p[b] = lo;
  }
}

}  // namespace

void MatchLpSpec::check() const {
  const size_t m = caps.size();
  for (size_t i = 0; i < cases.size(); ++i) {
    const LpCase& c = cases[i];
    if (c.scores.size() != m) {
      throw Error("invalid_lp", "case " + std::to_string(i) +
                                    " does not cover every affiliate");
    }
    if (c.size < 1) {
      throw Error("invalid_lp",
                  "case " + std::to_string(i) + " has non-positive size");
    }
    bool sink = false;
    for (size_t l = 0; l < m; ++l) {
      sink |= c.scores[l].has_value() && caps[l].is_infinite();
    }
    if (!sink) {
      throw Error("invalid_lp", "case " + std::to_string(i) +
                                    " has no infinite-capacity column");
    }
  }
}

double DualSolution::dual_value(std::span<const Capacity> caps) const {
  double total = 0.0;
  for (double y : case_duals) total += y;
  for (size_t l = 0; l < caps.size(); ++l) {
    if (!caps[l].is_infinite()) total += prices[l] * caps[l].value();
  }
  return total;
}

LpSolution solve_lp(const MatchLpSpec& spec) {
  const TransportSolver solver = build(spec);
  const size_t m = spec.num_affiliates();
  LpSolution out;
  out.num_affiliates = m;
  out.x.assign(spec.cases.size() * m, 0.0);
  for (size_t i = 0; i < spec.cases.size(); ++i) {
    const LpCase& c = spec.cases[i];
    for (size_t l = 0; l < m; ++l) {
      const int w = solver.flow(i, l);
      if (w == 0) continue;
      if (w == c.size) {
        out.x[i * m + l] = 1.0;
        out.value += *c.scores[l];
      } else {
        out.x[i * m + l] = static_cast<double>(w) / c.size;
        out.value += *c.scores[l] * w / c.size;
      }
    }
  }
  return out;
}

DualSolution extremal_duals(const MatchLpSpec& spec, Extremality sense) {
  const TransportSolver solver = build(spec);
  DualSolution out;
  out.extremality = sense;
  out.prices = solver.extremal_prices(sense);
  out.case_duals = case_duals(spec, out.prices);
  for (size_t i = 0; i < spec.cases.size(); ++i) {
    const LpCase& c = spec.cases[i];
    for (size_t l = 0; l < spec.num_affiliates(); ++l) {
      const int w = solver.flow(i, l);
      if (w != 0) out.primal_value += *c.scores[l] * w / c.size;
    }
  }
  return out;
}

namespace reference {

LpSolution solve_lp(const MatchLpSpec& spec) {
  spec.check();
  const size_t m = spec.num_affiliates();
  const size_t n = spec.cases.size();
  Simplex lp;
  std::vector<int> var(n * m, -1);
  for (size_t i = 0; i < n; ++i) {
    for (size_t l = 0; l < m; ++l) {
      if (spec.cases[i].scores[l]) {
        var[i * m + l] = lp.add_variable(*spec.cases[i].scores[l], 1.0);
      }
    }
  }
  for (size_t i = 0; i < n; ++i) {
    std::vector<std::pair<int, double>> row;
    for (size_t l = 0; l < m; ++l) {
      if (var[i * m + l] >= 0) row.push_back({var[i * m + l], 1.0});
    }
    lp.add_row(std::move(row), Simplex::RowSense::kEq, 1.0);
  }
  for (size_t l = 0; l < m; ++l) {
    if (spec.caps[l].is_infinite()) continue;
    std::vector<std::pair<int, double>> row;
    for (size_t i = 0; i < n; ++i) {
      if (var[i * m + l] >= 0) {
        row.push_back({var[i * m + l], static_cast<double>(spec.cases[i].size)});
      }
    }
    lp.add_row(std::move(row), Simplex::RowSense::kLe,
               static_cast<double>(spec.caps[l].value()));
  }
  if (lp.maximize() != Simplex::Status::kOptimal) {
    throw NumericalFailure("reference simplex did not reach an optimum");
  }
  LpSolution out;
  out.num_affiliates = m;
  out.x.assign(n * m, 0.0);
  for (size_t k = 0; k < n * m; ++k) {
    if (var[k] >= 0) out.x[k] = lp.value(var[k]);
  }
  out.value = lp.objective_value();
  return out;
}

DualSolution extremal_duals(const MatchLpSpec& spec, Extremality sense,
                            bool per_coordinate) {
  spec.check();
  const size_t m = spec.num_affiliates();
  const size_t n = spec.cases.size();

  // y[i] >= max over infinite columns of u[i][l] is itself a dual
  // constraint; substituting y = floor + y' keeps every variable >= 0.
  std::vector<double> floor(n, -kInf);
  for (size_t i = 0; i < n; ++i) {
    for (size_t l = 0; l < m; ++l) {
      if (spec.caps[l].is_infinite() && spec.cases[i].scores[l]) {
        floor[i] = std::max(floor[i], *spec.cases[i].scores[l]);
      }
    }
  }

  Simplex dual;
  std::vector<int> y(n), p(m, -1);
  for (size_t i = 0; i < n; ++i) y[i] = dual.add_variable(1.0);
  for (size_t l = 0; l < m; ++l) {
    if (!spec.caps[l].is_infinite()) {
      p[l] = dual.add_variable(static_cast<double>(spec.caps[l].value()));
    }
  }
  for (size_t i = 0; i < n; ++i) {
    const LpCase& c = spec.cases[i];
    for (size_t l = 0; l < m; ++l) {
      if (p[l] < 0 || !c.scores[l]) continue;
      dual.add_row({{y[i], 1.0}, {p[l], static_cast<double>(c.size)}},
                   Simplex::RowSense::kGe, *c.scores[l] - floor[i]);
    }
  }
  if (dual.minimize() != Simplex::Status::kOptimal) {
    throw NumericalFailure("reference dual LP did not reach an optimum");
  }
  const double optimum = dual.objective_value();

  // Restrict to the optimal face.
  std::vector<std::pair<int, double>> face;
  for (size_t i = 0; i < n; ++i) face.push_back({y[i], 1.0});
  for (size_t l = 0; l < m; ++l) {
    if (p[l] >= 0) {
      face.push_back({p[l], static_cast<double>(spec.caps[l].value())});
    }
  }
  dual.add_row(std::move(face), Simplex::RowSense::kLe,
               optimum + 1e-10 * std::max(1.0, std::abs(optimum)));

  auto optimize_prices = [&](std::span<const size_t> coords) {
    for (int v = 0; v < dual.num_variables(); ++v) dual.set_objective(v, 0.0);
    for (size_t l : coords) dual.set_objective(p[l], 1.0);
    const auto status = sense == Extremality::kMaximal ? dual.maximize()
                                                       : dual.minimize();
    if (status != Simplex::Status::kOptimal) {
      throw NumericalFailure("reference face LP did not reach an optimum");
    }
  };

  std::vector<size_t> priced;
  for (size_t l = 0; l < m; ++l) {
    if (p[l] >= 0 && spec.caps[l].value() > 0) priced.push_back(l);
  }
  DualSolution out;
  out.extremality = sense;
  out.prices.assign(m, 0.0);
  if (per_coordinate) {
    for (size_t l : priced) {
      const size_t one[] = {l};
      optimize_prices(one);
      out.prices[l] = std::max(0.0, dual.value(p[l]));
    }
  } else {
    optimize_prices(priced);
    for (size_t l : priced) out.prices[l] = std::max(0.0, dual.value(p[l]));
  }
  price_zero_capacity(spec, out.prices);
  out.case_duals = case_duals(spec, out.prices);
  out.primal_value = reference::solve_lp(spec).value;
  return out;
}

}  // namespace reference

}  // namespace dynmatch::lp
