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

// Transport-neutral HTTP message types plus a small blocking client used
// by the upstream proxy and the conformance tool.

#ifndef INSTANT_ASSIST_HTTP_HPP_
#define INSTANT_ASSIST_HTTP_HPP_

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace instant_assist::http {

struct CaseInsensitiveLess {
  using is_transparent = void;
  bool operator()(std::string_view a, std::string_view b) const;
};

using Headers = std::map<std::string, std::string, CaseInsensitiveLess>;

struct Request {
  std::string method;
  std::string path;
  Headers headers;
  std::string body;

  // Empty when the header is absent.
  std::string header(std::string_view name) const;
};

struct Response {
  int status = 200;
  Headers headers;
  std::string body;

  std::string header(std::string_view name) const;
};

struct Url {
  std::string scheme;  // "http" or "https"
  std::string host;
  int port = 0;
  std::string path;  // includes the query, always starts with '/'

  std::string origin() const;  // scheme://host:port
};

// Parses an absolute http(s) URL. Returns nullopt for anything else.
std::optional<Url> parse_url(std::string_view text);

enum class TransportError {
  kNone,
  kConnect,  // refused, unresolvable, TLS handshake failure
  kTimeout,  // no complete response within the limit
  kOther,
};

std::string_view to_string(TransportError error);

struct Exchange {
  TransportError error = TransportError::kNone;
  std::string error_detail;
  Response response;  // status 0 when nothing arrived
  std::chrono::milliseconds elapsed{0};

  bool ok() const { return error == TransportError::kNone; }
};

// Sends one request and waits at most `limit` for the full response.
Exchange send(const Url& url, std::string_view method, const Headers& headers,
              std::string_view body, std::chrono::milliseconds limit);

}  // namespace instant_assist::http

#endif  // INSTANT_ASSIST_HTTP_HPP_
