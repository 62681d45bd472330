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

// Minimal SVG charts for replay results.

#ifndef DYNMATCH_SVG_HPP_
#define DYNMATCH_SVG_HPP_

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dynmatch/sim.hpp"

namespace dynmatch::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::string& y_label,
                       std::span<const Series> series);

std::string bar_chart(const std::string& title, const std::string& y_label,
                      std::span<const std::pair<std::string, double>> bars);

// One chart per metric, comparing several replays of the same instance.
struct Figures {
  std::string employment;       // total employment per policy
  std::string match_score;      // smoothed match score per refugee
  std::string priced_capacity;  // remaining priced capacity
  std::string cumulative;       // cumulative employment
};

Figures figures(std::span<const sim::ReplayResult> runs, int smooth_width);

}  // namespace dynmatch::svg

#endif  // DYNMATCH_SVG_HPP_
