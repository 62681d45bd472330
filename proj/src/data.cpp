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

#include "dynmatch/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

namespace dynmatch::data {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "dynmatch-instance";

std::string decimal(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_decimal(const json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) throw ParseError(field, "expected a decimal string");
  const std::string& s = j.get_ref<const std::string&>();
  // Underflow still yields the nearest double; overflow shows up as inf.
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
    throw ParseError(field, "'" + s + "' is not a finite decimal");
  }
  return v;
}

const json& require(const json& j, const char* key, const std::string& field) {
  if (!j.is_object()) throw ParseError(field, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(field + "." + key, "missing");
  return *it;
}

int64_t get_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) throw ParseError(field, "expected an integer");
  return j.get<int64_t>();
}

bool get_bool(const json& j, const std::string& field) {
  if (!j.is_boolean()) throw ParseError(field, "expected a boolean");
  return j.get<bool>();
}

std::string get_string(const json& j, const std::string& field) {
  if (!j.is_string()) throw ParseError(field, "expected a string");
  return j.get<std::string>();
}

const json& get_array(const json& j, const std::string& field) {
  if (!j.is_array()) throw ParseError(field, "expected an array");
  return j;
}

std::vector<std::string> string_list(const json& j, const std::string& field) {
  std::vector<std::string> out;
  const json& arr = get_array(j, field);
  for (size_t i = 0; i < arr.size(); ++i) {
    out.push_back(get_string(arr[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

json compat_to_json(const CompatRule& r) {
  json j = {{"nationalities", r.nationalities},
            {"languages", r.languages},
            {"min_size", r.min_size},
            {"single_parent_ok", r.single_parent_ok}};
  j["max_size"] = r.max_size == std::numeric_limits<int>::max()
                      ? json(nullptr)
                      : json(r.max_size);
  return j;
}

CompatRule compat_from_json(const json& j, const std::string& field) {
  CompatRule r;
  if (!j.is_object()) throw ParseError(field, "expected an object");
  if (j.contains("nationalities")) {
    r.nationalities = string_list(j["nationalities"], field + ".nationalities");
  }
  if (j.contains("languages")) {
    r.languages = string_list(j["languages"], field + ".languages");
  }
  if (j.contains("min_size")) {
    r.min_size = static_cast<int>(get_int(j["min_size"], field + ".min_size"));
  }
  if (j.contains("max_size") && !j["max_size"].is_null()) {
    r.max_size = static_cast<int>(get_int(j["max_size"], field + ".max_size"));
  }
  if (j.contains("single_parent_ok")) {
    r.single_parent_ok =
        get_bool(j["single_parent_ok"], field + ".single_parent_ok");
  }
  return r;
}

}  // namespace

json capacity_to_json(const Capacity& c) {
  if (c.is_infinite()) return "inf";
  return c.value();
}

Capacity capacity_from_json(const json& j, const std::string& field) {
  if (j.is_string() && j.get<std::string>() == "inf") {
    return Capacity::Infinite();
  }
  if (!j.is_number_integer()) {
    throw ParseError(field, "capacity must be a non-negative integer or \"inf\"");
  }
  const int64_t v = j.get<int64_t>();
  if (v < 0) throw ParseError(field, "capacity must be non-negative");
  return Capacity::Finite(v);
}

json profile_to_json(const CapacityProfile& caps) {
  json arr = json::array();
  for (const Capacity& c : caps.view()) arr.push_back(capacity_to_json(c));
  return arr;
}

CapacityProfile profile_from_json(const json& j, const std::string& field) {
  const json& arr = get_array(j, field);
  std::vector<Capacity> caps;
  for (size_t i = 0; i < arr.size(); ++i) {
    caps.push_back(
        capacity_from_json(arr[i], field + "[" + std::to_string(i) + "]"));
  }
  return CapacityProfile(std::move(caps));
}

json case_to_json(const Case& c) {
  json scores = json::array();
  for (const Score& s : c.scores) {
    if (s.compatible()) {
      scores.push_back(decimal(s.value()));
    } else {
      json inc = {{"incompatible", true}};
      if (auto e = s.estimate()) inc["estimate"] = decimal(*e);
      scores.push_back(inc);
    }
  }
  return {{"id", c.id},
          {"size", c.size},
          {"scores", scores},
          {"attributes",
           {{"nationality", c.attributes.nationality},
            {"language", c.attributes.language},
            {"single_parent", c.attributes.single_parent}}},
          {"pool", c.pool == Pool::kUsTies ? "us_ties" : "free"},
          {"arrival_index", c.arrival_index},
          {"batch_id", c.batch_id},
          {"day", c.day}};
}

Case case_from_json(const json& j, size_t num_affiliates,
                    const std::string& field) {
  Case c;
  c.id = get_string(require(j, "id", field), field + ".id");
  const int64_t size = get_int(require(j, "size", field), field + ".size");
  if (size < 1 || size > 1000000) throw ParseError(field + ".size", "must be positive");
  c.size = static_cast<int>(size);
  const json& scores = get_array(require(j, "scores", field), field + ".scores");
  if (scores.size() != num_affiliates) {
    throw ParseError(field + ".scores",
                     "expected " + std::to_string(num_affiliates) + " entries");
  }
  for (size_t l = 0; l < scores.size(); ++l) {
    const std::string f = field + ".scores[" + std::to_string(l) + "]";
    const json& s = scores[l];
    if (s.is_object()) {
      if (!s.contains("incompatible") ||
          !get_bool(s["incompatible"], f + ".incompatible")) {
        throw ParseError(f, "object scores must be marked incompatible");
      }
      std::optional<double> estimate;
      if (s.contains("estimate")) estimate = parse_decimal(s["estimate"], f + ".estimate");
      c.scores.push_back(Score::Incompatible(estimate));
    } else {
      c.scores.push_back(Score::Of(parse_decimal(s, f)));
    }
  }
  if (j.contains("attributes")) {
    const json& a = j["attributes"];
    const std::string f = field + ".attributes";
    if (!a.is_object()) throw ParseError(f, "expected an object");
    if (a.contains("nationality")) {
      c.attributes.nationality = get_string(a["nationality"], f + ".nationality");
    }
    if (a.contains("language")) {
      c.attributes.language = get_string(a["language"], f + ".language");
    }
    if (a.contains("single_parent")) {
      c.attributes.single_parent = get_bool(a["single_parent"], f + ".single_parent");
    }
  }
  if (j.contains("pool")) {
    const std::string pool = get_string(j["pool"], field + ".pool");
    if (pool == "us_ties") {
      c.pool = Pool::kUsTies;
    } else if (pool != "free") {
      throw ParseError(field + ".pool", "expected \"free\" or \"us_ties\"");
    }
  }
  if (j.contains("arrival_index")) {
    c.arrival_index = static_cast<int>(get_int(j["arrival_index"], field + ".arrival_index"));
  }
  if (j.contains("batch_id")) {
    c.batch_id = static_cast<int>(get_int(j["batch_id"], field + ".batch_id"));
  }
  if (j.contains("day")) c.day = static_cast<int>(get_int(j["day"], field + ".day"));
  return c;
}

json to_json(const Instance& inst) {
  json affiliates = json::array();
  for (const Affiliate& a : inst.affiliates) {
    affiliates.push_back({{"id", a.id},
                          {"capacity", capacity_to_json(a.capacity)},
                          {"unmatched_sink", a.is_unmatched_sink},
                          {"compat", compat_to_json(a.compat)}});
  }
  json revisions = json::array();
  for (const Revision& r : inst.revisions) {
    revisions.push_back(
        {{"arrival_index", r.arrival_index}, {"caps", profile_to_json(r.caps)}});
  }
  json cases = json::array();
  for (const Case& c : inst.cases) cases.push_back(case_to_json(c));
  json history = json::array();
  for (const Case& c : inst.history_pool) history.push_back(case_to_json(c));
  return {{"format", kFormat},
          {"version", kFormatVersion},
          {"affiliates", affiliates},
          {"initial_caps", profile_to_json(inst.initial_caps)},
          {"final_caps", profile_to_json(inst.final_caps)},
          {"revisions", revisions},
          {"cases", cases},
          {"history_pool", history}};
}

Instance from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("$", "expected an object");
  if (!doc.contains("format") || doc["format"] != kFormat) {
    throw ParseError("format", std::string("expected \"") + kFormat + "\"");
  }
  const int64_t version = get_int(require(doc, "version", "$"), "version");
  if (version != kFormatVersion) {
    throw Error("version_mismatch",
                "instance format version " + std::to_string(version) +
                    " is not supported (expected " +
                    std::to_string(kFormatVersion) + ")");
  }
  Instance inst;
  const json& affiliates = get_array(require(doc, "affiliates", "$"), "affiliates");
  for (size_t l = 0; l < affiliates.size(); ++l) {
    const std::string f = "affiliates[" + std::to_string(l) + "]";
    const json& a = affiliates[l];
    Affiliate aff;
    aff.id = get_string(require(a, "id", f), f + ".id");
    aff.capacity = capacity_from_json(require(a, "capacity", f), f + ".capacity");
    if (a.contains("unmatched_sink")) {
      aff.is_unmatched_sink = get_bool(a["unmatched_sink"], f + ".unmatched_sink");
    }
    if (a.contains("compat")) aff.compat = compat_from_json(a["compat"], f + ".compat");
    inst.affiliates.push_back(std::move(aff));
  }
  const size_t m = inst.affiliates.size();
  auto profile = [&](const char* key) {
    if (!doc.contains(key)) {
      std::vector<Capacity> caps;
      for (const Affiliate& a : inst.affiliates) caps.push_back(a.capacity);
      return CapacityProfile(std::move(caps));
    }
    CapacityProfile p = profile_from_json(doc[key], key);
    if (p.size() != m) {
      throw ParseError(key, "expected " + std::to_string(m) + " entries");
    }
    return p;
  };
  inst.initial_caps = profile("initial_caps");
  inst.final_caps = profile("final_caps");
  if (doc.contains("revisions")) {
    const json& revs = get_array(doc["revisions"], "revisions");
    for (size_t r = 0; r < revs.size(); ++r) {
      const std::string f = "revisions[" + std::to_string(r) + "]";
      Revision rev;
      rev.arrival_index = static_cast<int>(
          get_int(require(revs[r], "arrival_index", f), f + ".arrival_index"));
      rev.caps = profile_from_json(require(revs[r], "caps", f), f + ".caps");
      if (rev.caps.size() != m) {
        throw ParseError(f + ".caps", "expected " + std::to_string(m) + " entries");
      }
      inst.revisions.push_back(std::move(rev));
    }
  }
  const json& cases = get_array(require(doc, "cases", "$"), "cases");
  for (size_t i = 0; i < cases.size(); ++i) {
    inst.cases.push_back(
        case_from_json(cases[i], m, "cases[" + std::to_string(i) + "]"));
  }
  if (doc.contains("history_pool")) {
    const json& hist = get_array(doc["history_pool"], "history_pool");
    for (size_t i = 0; i < hist.size(); ++i) {
      inst.history_pool.push_back(
          case_from_json(hist[i], m, "history_pool[" + std::to_string(i) + "]"));
    }
  }
  return inst;
}

std::string write_instance_string(const Instance& instance) {
  return to_json(instance).dump(1) + "\n";
}

Instance read_instance_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // Report a line number alongside the byte offset.
    const size_t offset = std::min(e.byte, text.size());
    const size_t line =
        1 + std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n');
    throw ParseError("line " + std::to_string(line), e.what());
  }
  return from_json(doc);
}

void write_instance(const Instance& instance, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io_error", "cannot write " + path);
  out << write_instance_string(instance);
  if (!out) throw Error("io_error", "failed writing " + path);
}

Instance read_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io_error", "cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return read_instance_string(buf.str());
}

// ---------------------------------------------------------------------------
// Generator.

void GeneratorConfig::check() const {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error("invalid_config", std::string(name) + " must lie in [0, 1]");
    }
  };
  if (num_affiliates < 1) throw Error("invalid_config", "need an affiliate");
  if (total_refugees < 0) throw Error("invalid_config", "negative arrivals");
  if (!(tightness > 0.0)) throw Error("invalid_config", "tightness must be positive");
  if (max_case_size < 1) throw Error("invalid_config", "max_case_size < 1");
  if (!(size_p > 0.0 && size_p <= 1.0)) {
    throw Error("invalid_config", "size_p must lie in (0, 1]");
  }
  prob(star_fraction, "star_fraction");
  prob(star_capacity_share, "star_capacity_share");
  prob(zero_score_fraction, "zero_score_fraction");
  prob(us_ties_fraction, "us_ties_fraction");
  prob(single_parent_rate, "single_parent_rate");
  prob(nationality_restriction, "nationality_restriction");
  prob(language_restriction, "language_restriction");
  prob(size_restriction, "size_restriction");
  prob(single_parent_restriction, "single_parent_restriction");
  prob(small_batch_fraction, "small_batch_fraction");
  prob(revision_at, "revision_at");
  if (num_nationalities < 1 || num_languages < 1) {
    throw Error("invalid_config", "need a nationality and a language");
  }
  if (batch_min < 1 || batch_max < batch_min) {
    throw Error("invalid_config", "batch size range is empty");
  }
  if (days < 1) throw Error("invalid_config", "days must be positive");
  if (!(history_fraction >= 0.0)) {
    throw Error("invalid_config", "history_fraction must be non-negative");
  }
  if (!(base_sd >= 0 && skill_sd >= 0 && noise_sd >= 0 && star_affinity >= 0)) {
    throw Error("invalid_config", "spreads must be non-negative");
  }
  if (!(revision_factor >= 0.0)) {
    throw Error("invalid_config", "revision_factor must be non-negative");
  }
}

namespace {

class Generator {
 public:
  explicit Generator(const GeneratorConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {}

  Instance run() {
    Instance inst;
    const int m = cfg_.num_affiliates;
    make_affiliates(inst);
    const CapacityProfile caps = make_capacities();
    inst.initial_caps = caps;
    inst.final_caps = caps;
    for (int l = 0; l < m; ++l) inst.affiliates[l].capacity = caps[l];

    // Year arrivals, batch by batch.
    std::vector<std::vector<Case>> batches;
    int64_t refugees = 0;
    int next_id = 1;
    while (refugees < cfg_.total_refugees) {
      const bool small = coin(cfg_.small_batch_fraction);
      std::uniform_int_distribution<int> count(small ? 1 : cfg_.batch_min,
                                               small ? 2 : cfg_.batch_max);
      int b = count(rng_);
      std::vector<Case> batch;
      while (b-- > 0 && refugees < cfg_.total_refugees) {
        Case c = make_case("C" + std::to_string(next_id++));
        refugees += c.size;
        batch.push_back(std::move(c));
      }
      batches.push_back(std::move(batch));
    }
    int arrival = 1;
    for (size_t b = 0; b < batches.size(); ++b) {
      const int day = static_cast<int>(static_cast<int64_t>(b) * cfg_.days /
                                       static_cast<int64_t>(batches.size()));
      for (Case& c : batches[b]) {
        c.batch_id = static_cast<int>(b) + 1;
        c.day = day;
        c.arrival_index = arrival++;
        inst.cases.push_back(std::move(c));
      }
    }

    // Prior-year arrivals for trajectory sampling.
    const int64_t history = std::llround(cfg_.history_fraction *
                                         static_cast<double>(inst.cases.size()));
    std::vector<int> days;
    std::uniform_int_distribution<int> pick_day(-cfg_.days, -1);
    for (int64_t i = 0; i < history; ++i) days.push_back(pick_day(rng_));
    std::sort(days.begin(), days.end());
    for (int64_t i = 0; i < history; ++i) {
      Case c = make_case("H" + std::to_string(i + 1));
      c.day = days[i];
      c.arrival_index = static_cast<int>(i - history);
      c.batch_id = 0;
      inst.history_pool.push_back(std::move(c));
    }

    if (cfg_.revision && !inst.cases.empty()) {
      Revision rev;
      rev.arrival_index = std::max<int>(
          1, static_cast<int>(std::ceil(cfg_.revision_at *
                                        static_cast<double>(inst.cases.size()))));
      std::vector<Capacity> revised;
      for (size_t l = 0; l < caps.size(); ++l) {
        revised.push_back(
            caps[l].is_infinite()
                ? Capacity::Infinite()
                : Capacity::Finite(std::llround(cfg_.revision_factor *
                                                static_cast<double>(caps[l].value()))));
      }
      rev.caps = CapacityProfile(revised);
      inst.final_caps = rev.caps;
      inst.revisions.push_back(std::move(rev));
    }
    return inst;
  }

 private:
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }
  double normal(double sd) {
    return sd > 0 ? std::normal_distribution<double>(0.0, sd)(rng_) : 0.0;
  }
  int uniform(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }

  std::string nationality(int k) const { return "N" + std::to_string(k + 1); }
  std::string language(int k) const { return "L" + std::to_string(k + 1); }

  void make_affiliates(Instance& inst) {
    const int m = cfg_.num_affiliates;
    for (int l = 0; l < m; ++l) {
      Affiliate a;
      char id[16];
      std::snprintf(id, sizeof(id), "A%02d", l + 1);
      a.id = id;
      // The star affiliate (index 0) accepts everyone.
      if (l > 0) {
        if (coin(cfg_.nationality_restriction) && cfg_.num_nationalities > 1) {
          const int banned = uniform(0, cfg_.num_nationalities - 1);
          for (int k = 0; k < cfg_.num_nationalities; ++k) {
            if (k != banned) a.compat.nationalities.push_back(nationality(k));
          }
        }
        if (coin(cfg_.language_restriction) && cfg_.num_languages > 1) {
          const int banned = uniform(0, cfg_.num_languages - 1);
          for (int k = 0; k < cfg_.num_languages; ++k) {
            if (k != banned) a.compat.languages.push_back(language(k));
          }
        }
        if (coin(cfg_.size_restriction)) a.compat.max_size = uniform(4, 7);
        if (coin(cfg_.single_parent_restriction)) {
          a.compat.single_parent_ok = false;
        }
      }
      const double b = cfg_.base_mean + normal(cfg_.base_sd);
      base_.push_back(l == 0 ? b + cfg_.star_base_bonus : b);
      inst.affiliates.push_back(std::move(a));
    }
    Affiliate sink;
    sink.id = "unmatched";
    sink.capacity = Capacity::Infinite();
    sink.is_unmatched_sink = true;
    inst.affiliates.push_back(std::move(sink));
    rules_.clear();
    for (const Affiliate& a : inst.affiliates) rules_.push_back(a.compat);
  }

  CapacityProfile make_capacities() {
    const int m = cfg_.num_affiliates;
    const int64_t total = std::llround(static_cast<double>(cfg_.total_refugees) /
                                       cfg_.tightness);
    std::vector<int64_t> caps(m, 0);
    int64_t star = m == 1 ? total
                          : std::llround(cfg_.star_capacity_share *
                                         static_cast<double>(total));
    caps[0] = star;
    if (m > 1) {
      std::vector<double> w(m, 0.0);
      double sum = 0.0;
      for (int l = 1; l < m; ++l) {
        w[l] = std::uniform_real_distribution<double>(0.6, 1.4)(rng_);
        sum += w[l];
      }
      const int64_t rest = total - star;
      int64_t given = 0;
      std::vector<std::pair<double, int>> frac;
      for (int l = 1; l < m; ++l) {
        const double share = rest * w[l] / sum;
        caps[l] = static_cast<int64_t>(std::floor(share));
        given += caps[l];
        frac.push_back({share - std::floor(share), l});
      }
      std::sort(frac.begin(), frac.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
      });
      for (size_t k = 0; given < rest && k < frac.size(); ++k, ++given) {
        ++caps[frac[k].second];
      }
    }
    std::vector<Capacity> out;
    for (int64_t c : caps) out.push_back(Capacity::Finite(std::max<int64_t>(0, c)));
    out.push_back(Capacity::Infinite());
    return CapacityProfile(std::move(out));
  }

  int case_size() {
    // Geometric on 1, 2, ... truncated at max_case_size by rejection.
    std::geometric_distribution<int> g(cfg_.size_p);
    while (true) {
      const int s = 1 + g(rng_);
      if (s <= cfg_.max_case_size) return s;
    }
  }

  Case make_case(std::string id) {
    const int m = cfg_.num_affiliates;
    Case c;
    c.id = std::move(id);
    c.size = case_size();
    // Nationalities are skewed: weights 1, 1/2, 1/3, ...
    std::vector<double> w;
    for (int k = 0; k < cfg_.num_nationalities; ++k) w.push_back(1.0 / (k + 1));
    const int nat = std::discrete_distribution<int>(w.begin(), w.end())(rng_);
    c.attributes.nationality = nationality(nat);
    c.attributes.language = coin(0.7) ? language(nat % cfg_.num_languages)
                                      : language(uniform(0, cfg_.num_languages - 1));
    c.attributes.single_parent = coin(cfg_.single_parent_rate);

    const bool zero = coin(cfg_.zero_score_fraction);
    const double skill = normal(cfg_.skill_sd);
    double affinity = 0.0;
    if (coin(cfg_.star_fraction) && cfg_.star_affinity > 0) {
      affinity = std::exponential_distribution<double>(1.0 / cfg_.star_affinity)(rng_);
    }
    std::vector<double> raw(m);
    for (int l = 0; l < m; ++l) {
      const double z = base_[l] + skill + (l == 0 ? affinity : 0.0) +
                       normal(cfg_.noise_sd);
      raw[l] = zero ? 0.0 : c.size / (1.0 + std::exp(-z));
    }
    std::vector<uint8_t> admits(m);
    std::vector<int> compatible;
    for (int l = 0; l < m; ++l) {
      admits[l] = rules_[l].admits(c.attributes, c.size);
      if (admits[l]) compatible.push_back(l);
    }
    std::optional<int> tie;
    if (!compatible.empty() && coin(cfg_.us_ties_fraction)) {
      tie = compatible[uniform(0, static_cast<int>(compatible.size()) - 1)];
      c.pool = Pool::kUsTies;
    }
    for (int l = 0; l < m; ++l) {
      const bool ok = tie ? l == *tie : admits[l];
      c.scores.push_back(ok ? Score::Of(raw[l]) : Score::Incompatible(raw[l]));
    }
    c.scores.push_back(Score::Of(0.0));
    return c;
  }

  const GeneratorConfig& cfg_;
  std::mt19937_64 rng_;
  std::vector<double> base_;
  std::vector<CompatRule> rules_;
};

}  // namespace

Instance generate(const GeneratorConfig& config) {
  config.check();
  return Generator(config).run();
}

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(
    GeneratorConfig, num_affiliates, total_refugees, tightness, seed,
    max_case_size, size_p, base_mean, base_sd, skill_sd, noise_sd,
    star_base_bonus, star_fraction, star_affinity, star_capacity_share,
    zero_score_fraction, us_ties_fraction, num_nationalities, num_languages,
    single_parent_rate, nationality_restriction, language_restriction,
    size_restriction, single_parent_restriction, small_batch_fraction,
    batch_min, batch_max, days, history_fraction, revision, revision_at,
    revision_factor)

json generator_config_to_json(const GeneratorConfig& config) { return config; }

GeneratorConfig generator_config_from_json(const json& j) {
  try {
    GeneratorConfig c = j.get<GeneratorConfig>();
    c.check();
    return c;
  } catch (const json::exception& e) {
    throw Error("invalid_config", e.what());
  }
}

}  // namespace dynmatch::data
