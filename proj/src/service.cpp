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

#include "dynmatch/service.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <utility>

#include "dynmatch/data.hpp"

namespace dynmatch::service {

using json = nlohmann::json;

namespace {

constexpr const char* kSnapshotFormat = "dynmatch-session";
constexpr int kSnapshotVersion = 1;

const json& object_body(const json& body) {
  if (!body.is_object()) {
    throw Error("invalid_request", "request body must be a JSON object");
  }
  return body;
}

std::string string_field(const json& body, const char* key) {
  const auto it = body.find(key);
  if (it == body.end() || !it->is_string()) {
    throw Error("invalid_request", std::string("missing string field '") +
                                       key + "'");
  }
  return it->get<std::string>();
}

size_t affiliate_index(const policies::Engine& e, const std::string& id) {
  const auto& affs = e.affiliates();
  for (size_t l = 0; l < affs.size(); ++l) {
    if (affs[l].id == id) return l;
  }
  throw Error("unknown_affiliate", "no affiliate '" + id + "'");
}

size_t case_index(const Pending& p, const std::string& id) {
  for (size_t i = 0; i < p.batch.size(); ++i) {
    if (p.batch[i].id == id) return i;
  }
  throw Error("unknown_case", "case '" + id + "' is not in the pending batch");
}

const Pending& pending_of(const View& v) {
  if (!v.pending) throw Error("no_pending_batch", "no batch is pending");
  return *v.pending;
}

// u - s p, with the stored estimate for incompatible pairs (0 if none).
double adjusted_value(const View& v, const Case& c, size_t l,
                      std::span<const double> p) {
  if (l == v.engine.sink()) return 0.0;
  return c.scores[l].estimate().value_or(0.0) - c.size * p[l];
}

json audit_json(const AuditEntry& a, const std::vector<Affiliate>& affs) {
  json decisions = json::array();
  for (size_t i = 0; i < a.case_ids.size(); ++i) {
    decisions.push_back({{"case_id", a.case_ids[i]},
                         {"recommended", affs[a.recommended[i]].id},
                         {"chosen", affs[a.chosen[i]].id},
                         {"forced", a.forced[i] != 0}});
  }
  return {{"seq", a.seq},
          {"user", a.user},
          {"time", a.time},
          {"token", a.token},
          {"decisions", std::move(decisions)},
          {"recommended_adjusted", a.recommended_adjusted},
          {"chosen_adjusted", a.chosen_adjusted},
          {"delta", a.chosen_adjusted - a.recommended_adjusted}};
}

AuditEntry audit_from_json(const json& j, const policies::Engine& e) {
  AuditEntry a;
  a.seq = j.at("seq").get<uint64_t>();
  a.user = j.at("user").get<std::string>();
  a.time = j.at("time").get<std::string>();
  a.token = j.at("token").get<uint64_t>();
  for (const json& d : j.at("decisions")) {
    a.case_ids.push_back(d.at("case_id").get<std::string>());
    a.recommended.push_back(affiliate_index(e, d.at("recommended")));
    a.chosen.push_back(affiliate_index(e, d.at("chosen")));
    a.forced.push_back(d.at("forced").get<bool>());
  }
  a.recommended_adjusted = j.at("recommended_adjusted").get<double>();
  a.chosen_adjusted = j.at("chosen_adjusted").get<double>();
  return a;
}

potentials::Method method_from_name(const std::string& name) {
  for (auto m : {potentials::Method::kZero, potentials::Method::kPot1,
                 potentials::Method::kPot2}) {
    if (name == potentials::method_name(m)) return m;
  }
  throw Error("invalid_state", "unknown potential method '" + name + "'");
}

}  // namespace

int status_for(const std::string& code) {
  static const std::map<std::string, int> kStatus = {
      {"parse_error", 400},          {"invalid_request", 400},
      {"invalid_case", 400},         {"duplicate_case", 400},
      {"invalid_prediction", 400},   {"unknown_case", 404},
      {"unknown_affiliate", 404},    {"no_pending_batch", 404},
      {"not_found", 404},            {"method_not_allowed", 405},
      {"capacity_exceeded", 409},    {"incompatible_without_force", 409},
      {"stale_snapshot", 409},       {"batch_pending", 409},
  };
  const auto it = kStatus.find(code);
  return it == kStatus.end() ? 500 : it->second;
}

json error_body(const std::string& code, const std::string& message,
                json details) {
  json e = {{"code", code}, {"message", message}};
  if (!details.is_null()) e["details"] = std::move(details);
  return {{"error", std::move(e)}};
}

// Raised for invalid batches so that every violation reaches the client.
class DetailedError : public Error {
 public:
  DetailedError(std::string code, const std::string& message, json details)
      : Error(std::move(code), message), details_(std::move(details)) {}
  const json& details() const { return details_; }

 private:
  json details_;
};

json pair_json(const View& v, size_t i, size_t l) {
  const Pending& pend = pending_of(v);
  const Case& c = pend.batch.at(i);
  const auto& affs = v.engine.affiliates();
  if (l >= affs.size()) throw Error("unknown_affiliate", "affiliate index");
  json out = {{"affiliate", affs[l].id}};
  if (l == v.engine.sink()) {
    out["raw"] = 0.0;
    out["adjusted"] = 0.0;
    out["compatible"] = true;
    out["fits"] = true;
    return out;
  }
  const std::optional<double> raw = c.scores[l].estimate();
  if (raw) {
    out["raw"] = *raw;
    out["adjusted"] = *raw - c.size * pend.potentials.p[l];
  } else {
    out["raw"] = nullptr;
    out["adjusted"] = nullptr;
  }
  out["compatible"] = c.scores[l].compatible();
  const Capacity cap = v.engine.state().remaining[l];
  bool fits = true;
  if (!cap.is_infinite()) {
    int64_t others = 0;
    for (size_t j = 0; j < pend.batch.size(); ++j) {
      if (j != i && pend.assignment.placement[j] == l) {
        others += pend.batch[j].size;
      }
    }
    fits = others + c.size <= cap.value();
  }
  out["fits"] = fits;
  return out;
}

Session::Session(const Instance& instance, policies::PolicyConfig config,
                 SessionOptions options)
    : Session(instance, std::move(config), std::move(options), true) {}

Session::Session(const Instance& instance, policies::PolicyConfig config,
                 SessionOptions options, bool truncate_log)
    : history_size_(instance.history_pool.size()),
      options_(std::move(options)) {
  if (options_.snapshot_every < 1) {
    throw Error("invalid_config", "snapshot_every must be positive");
  }
  const auto violations = validate(instance);
  if (!violations.empty()) {
    throw Error("invalid_instance", violations.front().entity + ": " +
                                        violations.front().rule);
  }
  auto v = std::make_shared<View>(View{
      policies::Engine(instance.affiliates, instance.initial_caps,
                       instance.history_pool, std::move(config)),
      std::nullopt, {}, 1, 0});
  if (v->engine.config().arrival_mode == policies::ArrivalMode::kKnownN) {
    v->engine.set_known_total_cases(
        static_cast<int64_t>(instance.cases.size()));
  }
  view_ = std::move(v);
  if (truncate_log) {
    if (!options_.event_log.empty()) {
      std::ofstream out(options_.event_log, std::ios::trunc);
      if (!out) throw Error("io_error", "cannot open " + options_.event_log);
    }
    if (!options_.snapshot.empty()) {
      std::error_code ec;
      std::filesystem::remove(options_.snapshot, ec);
    }
  }
}

std::unique_ptr<Session> Session::recover(const Instance& instance,
                                          policies::PolicyConfig config,
                                          SessionOptions options) {
  std::unique_ptr<Session> s(
      new Session(instance, std::move(config), std::move(options), false));
  auto v = std::make_shared<View>(*s->view_);
  const SessionOptions& opt = s->options_;

  if (!opt.snapshot.empty() && std::filesystem::exists(opt.snapshot)) {
    std::ifstream in(opt.snapshot);
    json snap;
    try {
      snap = json::parse(in);
    } catch (const json::exception& e) {
      throw Error("recovery_failed", std::string("snapshot: ") + e.what());
    }
    if (snap.value("format", "") != kSnapshotFormat ||
        snap.value("version", 0) != kSnapshotVersion) {
      throw Error("recovery_failed", "snapshot has the wrong format");
    }
    try {
      const json& st = snap.at("state");
      policies::EngineState es;
      es.governing = data::profile_from_json(st.at("governing"), "governing");
      es.remaining = data::profile_from_json(st.at("remaining"), "remaining");
      es.used = st.at("used").get<std::vector<int64_t>>();
      es.arrived_refugees = st.at("arrived_refugees").get<int64_t>();
      es.arrived_cases = st.at("arrived_cases").get<int64_t>();
      es.expected_total_refugees =
          st.at("expected_total_refugees").get<double>();
      es.computations = st.at("computations").get<uint64_t>();
      for (const json& d : st.at("log")) {
        es.log.push_back({d.at("case_id").get<std::string>(),
                          affiliate_index(v->engine, d.at("affiliate")),
                          d.at("forced").get<bool>()});
      }
      std::vector<Case> pool = instance.history_pool;
      const size_t m = instance.affiliates.size();
      for (const json& c : snap.at("committed")) {
        pool.push_back(data::case_from_json(c, m, "committed"));
      }
      v->engine.restore(std::move(es), std::move(pool));
      const json& pred = snap.at("prediction");
      if (pred.is_number()) v->engine.set_arrival_prediction(pred.get<double>());
      for (const json& a : snap.at("audit")) {
        v->audit.push_back(audit_from_json(a, v->engine));
      }
      v->next_token = snap.at("next_token").get<uint64_t>();
      v->events = snap.at("events").get<uint64_t>();
      const json& pj = snap.at("pending");
      if (!pj.is_null()) {
        Pending p;
        p.token = pj.at("token").get<uint64_t>();
        for (const json& c : pj.at("cases")) {
          p.batch.push_back(data::case_from_json(c, m, "pending"));
        }
        p.potentials.method = method_from_name(pj.at("method"));
        p.potentials.k_used = pj.at("k_used").get<int>();
        p.potentials.p = pj.at("potentials").get<std::vector<double>>();
        p.epsilon = pj.at("epsilon").get<double>();
        p.assignment = v->engine.recommend(p.batch, p.potentials.p);
        v->pending = std::move(p);
      }
    } catch (const json::exception& e) {
      throw Error("recovery_failed", std::string("snapshot: ") + e.what());
    }
  }

  if (!opt.event_log.empty() && std::filesystem::exists(opt.event_log)) {
    std::ifstream in(opt.event_log);
    std::string line;
    uint64_t n = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      ++n;
      if (n <= v->events) continue;
      json event;
      try {
        event = json::parse(line);
      } catch (const json::exception& e) {
        // A torn final line from a crash mid-write is dropped.
        if (in.peek() == std::char_traits<char>::eof()) break;
        throw Error("recovery_failed", "event log line " + std::to_string(n) +
                                           ": " + e.what());
      }
      try {
        s->apply(*v, event);
      } catch (const Error& e) {
        throw Error("recovery_failed", "event " + std::to_string(n) + ": " +
                                           e.code() + ": " + e.what());
      }
      v->events = n;
    }
    if (n < v->events) {
      throw Error("recovery_failed", "event log is shorter than the snapshot");
    }
  }
  s->view_ = std::move(v);
  return s;
}

std::shared_ptr<const View> Session::view() const {
  std::shared_lock lock(view_mutex_);
  return view_;
}

void Session::publish(std::shared_ptr<const View> v) {
  std::unique_lock lock(view_mutex_);
  view_ = std::move(v);
}

std::string Session::now() const {
  if (options_.clock) return options_.clock();
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void Session::append_event(const json& event) {
  if (options_.event_log.empty()) return;
  std::ofstream out(options_.event_log, std::ios::app);
  out << event.dump() << '\n';
  out.flush();
  if (!out) throw Error("io_error", "cannot append to " + options_.event_log);
}

json Session::snapshot_json() const {
  const std::shared_ptr<const View> v = view();
  const policies::Engine& e = v->engine;
  const policies::EngineState& st = e.state();
  const auto& affs = e.affiliates();
  json log = json::array();
  for (const policies::Decision& d : st.log) {
    log.push_back({{"case_id", d.case_id},
                   {"affiliate", affs[d.affiliate].id},
                   {"forced", d.forced}});
  }
  json committed = json::array();
  for (size_t i = history_size_; i < e.pool().size(); ++i) {
    committed.push_back(data::case_to_json(e.pool()[i]));
  }
  json audit = json::array();
  for (const AuditEntry& a : v->audit) audit.push_back(audit_json(a, affs));
  json pending = nullptr;
  if (v->pending) {
    json cases = json::array();
    for (const Case& c : v->pending->batch) {
      cases.push_back(data::case_to_json(c));
    }
    pending = {{"token", v->pending->token},
               {"cases", std::move(cases)},
               {"method", potentials::method_name(v->pending->potentials.method)},
               {"k_used", v->pending->potentials.k_used},
               {"potentials", v->pending->potentials.p},
               {"epsilon", v->pending->epsilon}};
  }
  json prediction = nullptr;
  if (e.config().arrival_mode == policies::ArrivalMode::kManualOverride) {
    prediction = *e.config().predicted_total_refugees;
  }
  return {{"format", kSnapshotFormat},
          {"version", kSnapshotVersion},
          {"events", v->events},
          {"next_token", v->next_token},
          {"state",
           {{"governing", data::profile_to_json(st.governing)},
            {"remaining", data::profile_to_json(st.remaining)},
            {"used", st.used},
            {"arrived_refugees", st.arrived_refugees},
            {"arrived_cases", st.arrived_cases},
            {"expected_total_refugees", st.expected_total_refugees},
            {"computations", st.computations},
            {"log", std::move(log)}}},
          {"committed", std::move(committed)},
          {"prediction", prediction},
          {"pending", std::move(pending)},
          {"audit", std::move(audit)}};
}

void Session::write_snapshot() const {
  if (options_.snapshot.empty()) return;
  const std::string tmp = options_.snapshot + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << snapshot_json().dump() << '\n';
    if (!out) throw Error("io_error", "cannot write " + tmp);
  }
  std::filesystem::rename(tmp, options_.snapshot);
}

json Session::write(json event) {
  std::lock_guard lock(writer_);
  auto v = std::make_shared<View>(*view());
  json result = apply(*v, event);
  v->events += 1;
  append_event(event);
  const bool snap = v->events % options_.snapshot_every == 0;
  publish(std::move(v));
  if (snap) write_snapshot();
  return result;
}

json Session::apply(View& v, const json& event) {
  const std::string type = event.at("type").get<std::string>();
  if (type == "batch") return apply_batch(v, event);
  if (type == "commit") return apply_commit(v, event);
  if (type == "prediction") return apply_prediction(v, event);
  throw Error("invalid_request", "unknown event type '" + type + "'");
}

void Session::refresh(View& v, std::vector<Case> batch) {
  const auto t0 = std::chrono::steady_clock::now();
  Pending p;
  p.potentials = v.engine.compute_potentials(batch);
  p.epsilon = v.engine.epsilon_for(batch);
  p.assignment = v.engine.recommend(batch, p.potentials.p);
  p.batch = std::move(batch);
  p.token = v.next_token++;
  v.pending = std::move(p);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::lock_guard lock(counters_mutex_);
  counters_.potential_computations += 1;
  counters_.potential_seconds_total += secs;
  counters_.potential_seconds_last = secs;
}

json Session::apply_batch(View& v, const json& event) {
  if (v.pending) {
    throw Error("batch_pending", "commit the pending batch first");
  }
  const auto it = event.find("cases");
  if (it == event.end() || !it->is_array() || it->empty()) {
    throw Error("invalid_request", "'cases' must be a non-empty array");
  }
  const auto& affs = v.engine.affiliates();
  std::vector<Case> batch;
  json problems = json::array();
  for (size_t i = 0; i < it->size(); ++i) {
    const std::string field = "cases[" + std::to_string(i) + "]";
    Case c = data::case_from_json((*it)[i], affs.size(), field);
    for (const Violation& bad : validate_case(c, affs)) {
      problems.push_back({{"case", field}, {"entity", bad.entity},
                          {"rule", bad.rule}});
    }
    batch.push_back(std::move(c));
  }
  if (!problems.empty()) {
    throw DetailedError("invalid_case", "batch failed validation",
                        std::move(problems));
  }
  std::set<std::string> ids;
  for (const Case& c : v.engine.pool()) ids.insert(c.id);
  for (const Case& c : batch) {
    if (!ids.insert(c.id).second) {
      throw Error("duplicate_case", "case id '" + c.id + "' already used");
    }
  }
  refresh(v, std::move(batch));
  return json();
}

json Session::apply_commit(View& v, const json& event) {
  const Pending& pend = pending_of(v);
  const auto tok = event.find("token");
  if (tok == event.end() || !tok->is_number_unsigned()) {
    throw Error("invalid_request", "commit needs the recommendation token");
  }
  if (tok->get<uint64_t>() != pend.token) {
    throw Error("stale_snapshot",
                "recommendation was recomputed; fetch it again");
  }
  const size_t n = pend.batch.size();
  std::vector<size_t> placement = pend.assignment.placement;
  std::vector<uint8_t> force(n, 0);
  std::vector<uint8_t> seen(n, 0);
  if (const auto it = event.find("placements"); it != event.end()) {
    if (!it->is_array()) {
      throw Error("invalid_request", "'placements' must be an array");
    }
    for (const json& o : *it) {
      object_body(o);
      const size_t i = case_index(pend, string_field(o, "case_id"));
      if (seen[i]) {
        throw Error("invalid_request",
                    "case '" + pend.batch[i].id + "' placed twice");
      }
      seen[i] = 1;
      placement[i] = affiliate_index(v.engine, string_field(o, "affiliate"));
      if (const auto f = o.find("force"); f != o.end()) {
        if (!f->is_boolean()) {
          throw Error("invalid_request", "'force' must be a boolean");
        }
        force[i] = f->get<bool>();
      }
    }
  }
  v.engine.commit(pend.batch, placement, force);

  AuditEntry a;
  a.seq = v.audit.size() + 1;
  a.user = event.value("user", "anonymous");
  a.time = event.value("time", "");
  a.token = pend.token;
  const size_t sink = v.engine.sink();
  int64_t overridden = 0;
  int64_t forced = 0;
  for (size_t i = 0; i < n; ++i) {
    const Case& c = pend.batch[i];
    a.case_ids.push_back(c.id);
    a.recommended.push_back(pend.assignment.placement[i]);
    a.chosen.push_back(placement[i]);
    const bool f = placement[i] != sink && !c.scores[placement[i]].compatible();
    a.forced.push_back(f);
    a.recommended_adjusted +=
        adjusted_value(v, c, pend.assignment.placement[i], pend.potentials.p);
    a.chosen_adjusted += adjusted_value(v, c, placement[i], pend.potentials.p);
    overridden += placement[i] != pend.assignment.placement[i];
    forced += f;
  }
  v.audit.push_back(a);
  v.pending.reset();
  {
    std::lock_guard lock(counters_mutex_);
    counters_.commits += 1;
    counters_.committed_cases += static_cast<int64_t>(n);
    counters_.overridden_cases += overridden;
    counters_.forced_cases += forced;
  }
  return {{"committed", a.case_ids},
          {"audit", audit_json(a, v.engine.affiliates())},
          {"remaining", data::profile_to_json(v.engine.state().remaining)}};
}

json Session::apply_prediction(View& v, const json& event) {
  const json& t = event.at("total_refugees");
  if (t.is_null()) {
    v.engine.set_arrival_prediction(std::nullopt);
  } else if (t.is_number()) {
    v.engine.set_arrival_prediction(t.get<double>());
  } else {
    throw Error("invalid_prediction", "prediction must be a number");
  }
  json out = {{"arrival_mode",
               policies::arrival_mode_name(v.engine.config().arrival_mode)},
              {"predicted_total_refugees", t}};
  if (v.pending) {
    std::vector<Case> batch = v.pending->batch;
    v.pending.reset();
    refresh(v, std::move(batch));
    out["token"] = v.pending->token;
  }
  return out;
}

json Session::submit_batch(const json& body) {
  object_body(body);
  json event = {{"type", "batch"}};
  if (const auto it = body.find("cases"); it != body.end()) {
    event["cases"] = *it;
  }
  write(std::move(event));
  return recommendation();
}

json Session::commit(const json& body) {
  object_body(body);
  json event = {{"type", "commit"},
                {"user", body.value("user", "anonymous")},
                {"time", now()}};
  if (const auto it = body.find("token"); it != body.end()) {
    event["token"] = *it;
  }
  if (const auto it = body.find("placements"); it != body.end()) {
    event["placements"] = *it;
  }
  return write(std::move(event));
}

json Session::set_prediction(const json& body) {
  object_body(body);
  json event = {{"type", "prediction"}};
  if (const auto it = body.find("total_refugees"); it != body.end()) {
    if (!it->is_number()) {
      throw Error("invalid_prediction", "total_refugees must be a number");
    }
    event["total_refugees"] = *it;
  } else if (body.value("mode", "") == "capacity_fraction") {
    event["total_refugees"] = nullptr;
  } else {
    throw Error("invalid_prediction",
                "give total_refugees or mode \"capacity_fraction\"");
  }
  return write(std::move(event));
}

json Session::recommendation() const {
  const std::shared_ptr<const View> v = view();
  const Pending& pend = pending_of(*v);
  const policies::Engine& e = v->engine;
  const auto& affs = e.affiliates();
  json affiliates = json::array();
  for (size_t l = 0; l < affs.size(); ++l) {
    affiliates.push_back(
        {{"id", affs[l].id},
         {"sink", affs[l].is_unmatched_sink},
         {"potential", pend.potentials.p[l]},
         {"remaining", data::capacity_to_json(e.state().remaining[l])}});
  }
  json cases = json::array();
  double adjusted_total = 0.0;
  for (size_t i = 0; i < pend.batch.size(); ++i) {
    const Case& c = pend.batch[i];
    const size_t rec = pend.assignment.placement[i];
    json scores = json::array();
    for (size_t l = 0; l < affs.size(); ++l) {
      scores.push_back(pair_json(*v, i, l));
    }
    adjusted_total += adjusted_value(*v, c, rec, pend.potentials.p);
    cases.push_back({{"case_id", c.id},
                     {"size", c.size},
                     {"pool", c.pool == Pool::kUsTies ? "us_ties" : "free"},
                     {"recommended", pair_json(*v, i, rec)},
                     {"scores", std::move(scores)}});
  }
  return {{"token", pend.token},
          {"method", potentials::method_name(pend.potentials.method)},
          {"k", pend.potentials.k_used},
          {"epsilon", pend.epsilon},
          {"affiliates", std::move(affiliates)},
          {"cases", std::move(cases)},
          {"objective", pend.assignment.objective},
          {"adjusted_total", adjusted_total},
          {"value", pend.assignment.value},
          {"matched_refugees", pend.assignment.matched_refugees},
          {"proven_optimal", pend.assignment.proven_optimal}};
}

json Session::whatif(const json& body) const {
  object_body(body);
  const std::shared_ptr<const View> v = view();
  const Pending& pend = pending_of(*v);
  const std::string case_id = string_field(body, "case_id");
  const size_t i = case_index(pend, case_id);
  const size_t l = affiliate_index(v->engine, string_field(body, "affiliate"));
  json out = pair_json(*v, i, l);
  out["case_id"] = case_id;
  out["token"] = pend.token;
  return out;
}

json Session::state() const {
  const std::shared_ptr<const View> v = view();
  const policies::Engine& e = v->engine;
  const policies::EngineState& st = e.state();
  const auto& affs = e.affiliates();
  json affiliates = json::array();
  for (size_t l = 0; l < affs.size(); ++l) {
    affiliates.push_back({{"id", affs[l].id},
                          {"sink", affs[l].is_unmatched_sink},
                          {"governing", data::capacity_to_json(st.governing[l])},
                          {"remaining", data::capacity_to_json(st.remaining[l])},
                          {"used", st.used[l]}});
  }
  json audit = json::array();
  for (const AuditEntry& a : v->audit) audit.push_back(audit_json(a, affs));
  const policies::PolicyConfig& cfg = e.config();
  return {{"affiliates", std::move(affiliates)},
          {"arrived_refugees", st.arrived_refugees},
          {"arrived_cases", st.arrived_cases},
          {"expected_total_refugees", st.expected_total_refugees},
          {"arrival_mode", policies::arrival_mode_name(cfg.arrival_mode)},
          {"predicted_total_refugees",
           cfg.predicted_total_refugees
               ? json(*cfg.predicted_total_refugees)
               : json(nullptr)},
          {"method", potentials::method_name(cfg.method)},
          {"k", cfg.k},
          {"computations", st.computations},
          {"pending_token",
           v->pending ? json(v->pending->token) : json(nullptr)},
          {"events", v->events},
          {"audit", std::move(audit)}};
}

json Session::metrics() const {
  const std::shared_ptr<const View> v = view();
  const policies::Engine& e = v->engine;
  double employment = 0.0;
  int64_t matched = 0;
  int64_t placed = 0;
  const size_t sink = e.sink();
  for (size_t i = history_size_; i < e.pool().size(); ++i) {
    const Case& c = e.pool()[i];
    const policies::Decision& d = e.state().log.at(i - history_size_);
    placed += c.size;
    if (d.affiliate == sink) continue;
    matched += c.size;
    employment += c.scores[d.affiliate].estimate().value_or(0.0);
  }
  std::lock_guard lock(counters_mutex_);
  return {{"requests", counters_.requests},
          {"errors", counters_.errors},
          {"commits", counters_.commits},
          {"committed_cases", counters_.committed_cases},
          {"overridden_cases", counters_.overridden_cases},
          {"forced_cases", counters_.forced_cases},
          {"potential_computations", counters_.potential_computations},
          {"potential_seconds_total", counters_.potential_seconds_total},
          {"potential_seconds_last", counters_.potential_seconds_last},
          {"committed_employment", employment},
          {"matched_refugees", matched},
          {"placed_refugees", placed}};
}

Response Session::dispatch(const std::string& method, const std::string& path,
                           const std::string& body) {
  static const std::map<std::string, std::string> kRoutes = {
      {"/batch", "POST"},   {"/recommendation", "GET"}, {"/whatif", "POST"},
      {"/commit", "POST"},  {"/prediction", "POST"},    {"/state", "GET"},
      {"/metrics", "GET"},
  };
  const std::string key = method + " " + path;
  auto fail = [&](const std::string& code, const std::string& message,
                  json details = nullptr) {
    std::lock_guard lock(counters_mutex_);
    counters_.errors[code] += 1;
    return Response{status_for(code),
                    error_body(code, message, std::move(details))};
  };
  const auto route = kRoutes.find(path);
  if (route == kRoutes.end()) return fail("not_found", "no route " + path);
  if (route->second != method) {
    return fail("method_not_allowed", path + " expects " + route->second);
  }
  {
    std::lock_guard lock(counters_mutex_);
    counters_.requests[key] += 1;
  }
  try {
    json parsed;
    if (method == "POST") {
      try {
        parsed = json::parse(body.empty() ? std::string("{}") : body);
      } catch (const json::parse_error& e) {
        return fail("parse_error", e.what());
      }
    }
    if (path == "/batch") return {200, submit_batch(parsed)};
    if (path == "/recommendation") return {200, recommendation()};
    if (path == "/whatif") return {200, whatif(parsed)};
    if (path == "/commit") return {200, commit(parsed)};
    if (path == "/prediction") return {200, set_prediction(parsed)};
    if (path == "/state") return {200, state()};
    return {200, metrics()};
  } catch (const DetailedError& e) {
    return fail(e.code(), e.what(), e.details());
  } catch (const Error& e) {
    return fail(e.code(), e.what());
  } catch (const json::exception& e) {
    return fail("invalid_request", e.what());
  } catch (const std::exception& e) {
    return fail("internal_error", e.what());
  }
}

}  // namespace dynmatch::service
