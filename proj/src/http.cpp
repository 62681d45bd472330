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

#include "httplib.h"

#include "dynmatch/service.hpp"

namespace dynmatch::service {

struct HttpServer::Impl {
  explicit Impl(Session& s) : session(s) {}
  Session& session;
  httplib::Server server;
  bool bound = false;
};

HttpServer::HttpServer(Session& session)
    : impl_(std::make_unique<Impl>(session)) {
  auto handle = [this](const httplib::Request& req, httplib::Response& res) {
    const Response r = impl_->session.dispatch(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  httplib::Server& s = impl_->server;
  s.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  s.Get(".*", handle);
  s.Post(".*", handle);
  s.Put(".*", handle);
  s.Delete(".*", handle);
  s.Patch(".*", handle);
  s.Options(".*", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  httplib::Server& s = impl_->server;
  if (port == 0) {
    const int p = s.bind_to_any_port(host);
    impl_->bound = p > 0;
    return impl_->bound ? p : -1;
  }
  impl_->bound = s.bind_to_port(host, port);
  return impl_->bound ? port : -1;
}

bool HttpServer::run() {
  if (!impl_->bound) return false;
  return impl_->server.listen_after_bind();
}

void HttpServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

}  // namespace dynmatch::service
