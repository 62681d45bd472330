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

// Allocation session behind the HTTP API. A session owns one Engine, at
// most one pending batch with its recommendation, and the audit log of
// committed decisions. docs/service_api.md lists the payloads.
//
// Writes (batch, commit, prediction) are serialized and work on a private
// copy of the session view; the copy is published only after it has been
// appended to the event log. Reads always see the last published view, so
// potential recomputation never blocks them.

#ifndef DYNMATCH_SERVICE_HPP_
#define DYNMATCH_SERVICE_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "dynmatch/model.hpp"
#include "dynmatch/policies.hpp"
#include "dynmatch/potentials.hpp"
#include "json.hpp"

namespace dynmatch::service {

struct Response {
  int status = 200;
  nlohmann::json body;
};

// HTTP status for an error code.
int status_for(const std::string& code);
nlohmann::json error_body(const std::string& code, const std::string& message,
                          nlohmann::json details = nullptr);

struct SessionOptions {
  std::string event_log;     // JSON lines; empty disables persistence
  std::string snapshot;      // full state; empty disables snapshots
  int snapshot_every = 20;   // events between snapshots
  // Timestamp source for audit entries. Unset: UTC wall clock.
  std::function<std::string()> clock;
};

struct Pending {
  uint64_t token = 0;
  std::vector<Case> batch;
  potentials::PotentialVector potentials;
  double epsilon = 0.0;
  Assignment assignment;
};

struct AuditEntry {
  uint64_t seq = 0;
  std::string user;
  std::string time;
  uint64_t token = 0;
  std::vector<std::string> case_ids;
  std::vector<size_t> recommended;
  std::vector<size_t> chosen;
  std::vector<uint8_t> forced;
  double recommended_adjusted = 0.0;  // sum of u - s p over the batch
  double chosen_adjusted = 0.0;
};

// The state readers see. Immutable once published.
struct View {
  policies::Engine engine;
  std::optional<Pending> pending;
  std::vector<AuditEntry> audit;
  uint64_t next_token = 1;
  uint64_t events = 0;  // event log lines reflected in this view
};

class Session {
 public:
  // Starts a fresh session on the instance's affiliates, initial
  // capacities and history pool. Truncates an existing event log.
  Session(const Instance& instance, policies::PolicyConfig config,
          SessionOptions options = {});

  // Rebuilds from the snapshot (if present) plus the event log tail, then
  // keeps appending to the same log.
  static std::unique_ptr<Session> recover(const Instance& instance,
                                          policies::PolicyConfig config,
                                          SessionOptions options);

  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  // Each throws dynmatch::Error with a machine-readable code on failure.
  nlohmann::json submit_batch(const nlohmann::json& body);
  nlohmann::json recommendation() const;
  nlohmann::json whatif(const nlohmann::json& body) const;
  nlohmann::json commit(const nlohmann::json& body);
  nlohmann::json set_prediction(const nlohmann::json& body);
  nlohmann::json state() const;
  nlohmann::json metrics() const;

  // Routes a request and converts errors to structured responses.
  Response dispatch(const std::string& method, const std::string& path,
                    const std::string& body);

  std::shared_ptr<const View> view() const;
  // JSON form written to the snapshot file.
  nlohmann::json snapshot_json() const;

 private:
  struct Counters {
    std::map<std::string, int64_t> requests;
    std::map<std::string, int64_t> errors;
    int64_t commits = 0;
    int64_t committed_cases = 0;
    int64_t overridden_cases = 0;
    int64_t forced_cases = 0;
    int64_t potential_computations = 0;
    double potential_seconds_total = 0.0;
    double potential_seconds_last = 0.0;
  };

  Session(const Instance& instance, policies::PolicyConfig config,
          SessionOptions options, bool truncate_log);

  // Applies one event to `v`; shared by live requests and log replay.
  nlohmann::json apply(View& v, const nlohmann::json& event);
  nlohmann::json apply_batch(View& v, const nlohmann::json& event);
  nlohmann::json apply_commit(View& v, const nlohmann::json& event);
  nlohmann::json apply_prediction(View& v, const nlohmann::json& event);
  void refresh(View& v, std::vector<Case> batch);

  // Applies the event to a copy, logs it and publishes the copy.
  nlohmann::json write(nlohmann::json event);
  void publish(std::shared_ptr<const View> v);
  void append_event(const nlohmann::json& event);
  void write_snapshot() const;
  std::string now() const;

  size_t history_size_ = 0;
  SessionOptions options_;

  std::mutex writer_;  // one write operation at a time
  mutable std::shared_mutex view_mutex_;
  std::shared_ptr<const View> view_;

  mutable std::mutex counters_mutex_;
  Counters counters_;
};

// Per-pair numbers shown for case `i` of the pending batch at affiliate
// `l`. `fits` asks whether the case fits if it alone moves to `l` while
// the rest of the batch keeps its recommended placement. Incompatible
// pairs report the stored estimate (null when there is none).
nlohmann::json pair_json(const View& v, size_t i, size_t l);

// Blocking HTTP front end for a session.
class HttpServer {
 public:
  explicit HttpServer(Session& session);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds to `port` (0 picks a free one) and returns the bound port, or -1.
  int bind(const std::string& host, int port);
  // Serves until stop(). Requires a successful bind().
  bool run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dynmatch::service

#endif  // DYNMATCH_SERVICE_HPP_
