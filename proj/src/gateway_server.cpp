// Copyright 2026 The Instant Assist Authors
//
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

#include <httplib.h>

#include <thread>

#include "instant_assist/gateway.hpp"
#include "instant_assist/text.hpp"

namespace instant_assist::gateway {

struct GatewayServer::Impl {
  explicit Impl(const Gateway& gateway) : gateway(gateway) {}

  void serve(const httplib::Request& in, httplib::Response& out) const {
    http::Request request;
    request.method = in.method;
    request.path = in.path;
    for (const auto& [name, value] : in.headers) {
      request.headers.emplace(name, value);
    }
    request.body = in.body;

    http::Response response = gateway.handle(request);
    out.status = response.status;
    std::string content_type;
    for (const auto& [name, value] : response.headers) {
      if (text::iequals(name, "Content-Type")) {
        content_type = value;
      } else {
        out.set_header(name, value);
      }
    }
    if (!response.body.empty() || !content_type.empty()) {
      out.set_content(response.body, content_type);
    }
  }

  const Gateway& gateway;
  httplib::Server server;
  std::thread thread;
};

GatewayServer::GatewayServer(const Gateway& gateway)
    : impl_(std::make_unique<Impl>(gateway)) {
  const auto handler = [impl = impl_.get()](const httplib::Request& req,
                                            httplib::Response& res) {
    impl->serve(req, res);
  };
  impl_->server.Get(".*", handler);
  impl_->server.Post(".*", handler);
  impl_->server.Put(".*", handler);
  impl_->server.Patch(".*", handler);
  impl_->server.Delete(".*", handler);
  impl_->server.Options(".*", handler);
}

GatewayServer::~GatewayServer() { stop(); }

bool GatewayServer::bind(const std::string& host, int port) {
  if (port == 0) {
    port_ = impl_->server.bind_to_any_port(host);
    return port_ > 0;
  }
  if (!impl_->server.bind_to_port(host, port)) return false;
  port_ = port;
  return true;
}

void GatewayServer::listen() { impl_->server.listen_after_bind(); }

void GatewayServer::start() {
  impl_->thread = std::thread([this] { listen(); });
  impl_->server.wait_until_ready();
}

void GatewayServer::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace instant_assist::gateway
