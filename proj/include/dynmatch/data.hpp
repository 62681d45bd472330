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

// Instance files and the synthetic instance generator.
//
// Instance files are JSON documents with "format": "dynmatch-instance" and
// an integer "version". Scores are decimal strings printed with 17
// significant digits so that reading a file back reproduces every double.
// docs/instance_format.md describes the schema.

#ifndef DYNMATCH_DATA_HPP_
#define DYNMATCH_DATA_HPP_

#include <cstdint>
#include <string>

#include "dynmatch/model.hpp"
#include "json.hpp"

namespace dynmatch::data {

inline constexpr int kFormatVersion = 1;

// Error("parse_error") carrying the JSON path of the offending field.
class ParseError : public Error {
 public:
  ParseError(const std::string& field, const std::string& message)
      : Error("parse_error", field + ": " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

nlohmann::json to_json(const Instance& instance);
Instance from_json(const nlohmann::json& doc);

nlohmann::json case_to_json(const Case& c);
// `field` prefixes error paths.
Case case_from_json(const nlohmann::json& j, size_t num_affiliates,
                    const std::string& field);

nlohmann::json capacity_to_json(const Capacity& c);
Capacity capacity_from_json(const nlohmann::json& j, const std::string& field);
nlohmann::json profile_to_json(const CapacityProfile& caps);
CapacityProfile profile_from_json(const nlohmann::json& j,
                                  const std::string& field);

std::string write_instance_string(const Instance& instance);
Instance read_instance_string(const std::string& text);
void write_instance(const Instance& instance, const std::string& path);
Instance read_instance(const std::string& path);

// Synthetic stand-in for real arrival data. Scores are
//   u = s * logistic(base[l] + skill[i] + star[i] * [l = star] + noise)
// where only some cases have a large star affinity, so most cases prefer
// the star affiliate but few gain much there.
struct GeneratorConfig {
  int num_affiliates = 20;         // real affiliates; the sink is added
  int64_t total_refugees = 1000;   // arrivals in the year
  double tightness = 0.95;         // arrivals / total capacity
  uint64_t seed = 1;

  // Case sizes: geometric(size_p) truncated to 1..max_case_size.
  int max_case_size = 10;
  double size_p = 0.4;

  double base_mean = -0.8;
  double base_sd = 0.2;
  double skill_sd = 0.7;
  double noise_sd = 0.7;
  double star_base_bonus = 0.9;
  double star_fraction = 0.3;   // cases with a large star affinity
  double star_affinity = 1.6;   // mean of that affinity (exponential)
  double star_capacity_share = 0.25;
  double zero_score_fraction = 0.03;

  double us_ties_fraction = 0.02;
  int num_nationalities = 6;
  int num_languages = 4;
  double single_parent_rate = 0.1;
  // Chance that an affiliate has each kind of restriction.
  double nationality_restriction = 0.25;
  double language_restriction = 0.15;
  double size_restriction = 0.25;
  double single_parent_restriction = 0.2;

  // Batches: small_batch_fraction of them hold 1-2 cases, others
  // batch_min..batch_max.
  double small_batch_fraction = 0.3;
  int batch_min = 5;
  int batch_max = 14;
  int days = 365;

  double history_fraction = 1.0;  // history cases per year case

  // Optional capacity revision at the given fraction of the arrivals.
  bool revision = false;
  double revision_at = 0.4;
  double revision_factor = 0.8;

  void check() const;  // throws Error("invalid_config")
};

Instance generate(const GeneratorConfig& config);

nlohmann::json generator_config_to_json(const GeneratorConfig& config);
GeneratorConfig generator_config_from_json(const nlohmann::json& j);

}  // namespace dynmatch::data

#endif  // DYNMATCH_DATA_HPP_
