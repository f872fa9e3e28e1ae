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

#include "instant_assist/http.hpp"

#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <charconv>

#include "instant_assist/text.hpp"

namespace instant_assist::http {

namespace {

using Clock = std::chrono::steady_clock;

std::string find_header(const Headers& headers, std::string_view name) {
  const auto it = headers.find(name);
  return it == headers.end() ? std::string() : it->second;
}

}  // namespace

bool CaseInsensitiveLess::operator()(std::string_view a,
                                     std::string_view b) const {
  return std::lexicographical_compare(
      a.begin(), a.end(), b.begin(), b.end(), [](char x, char y) {
        return std::tolower(static_cast<unsigned char>(x)) <
               std::tolower(static_cast<unsigned char>(y));
      });
}

std::string Request::header(std::string_view name) const {
  return find_header(headers, name);
}

std::string Response::header(std::string_view name) const {
  return find_header(headers, name);
}

std::string Url::origin() const {
  return scheme + "://" + host + ":" + std::to_string(port);
}

std::optional<Url> parse_url(std::string_view text) {
  Url url;
  const size_t scheme_end = text.find("://");
  if (scheme_end == std::string_view::npos) return std::nullopt;
  url.scheme = text::ascii_lower(text.substr(0, scheme_end));
  if (url.scheme != "http" && url.scheme != "https") return std::nullopt;
  text.remove_prefix(scheme_end + 3);

  const size_t authority_end = text.find_first_of("/?#");
  std::string_view authority = text.substr(0, authority_end);
  std::string_view rest = authority_end == std::string_view::npos
                              ? std::string_view{}
                              : text.substr(authority_end);
  if (authority.empty() || authority.find('@') != std::string_view::npos) {
    return std::nullopt;
  }

  std::string_view port_text;
  if (authority.front() == '[') {
    const size_t close = authority.find(']');
    if (close == std::string_view::npos) return std::nullopt;
    url.host = std::string(authority.substr(1, close - 1));
    std::string_view after = authority.substr(close + 1);
    if (!after.empty()) {
      if (after.front() != ':') return std::nullopt;
      port_text = after.substr(1);
    }
  } else {
    const size_t colon = authority.rfind(':');
    url.host = std::string(authority.substr(0, colon));
    if (colon != std::string_view::npos) port_text = authority.substr(colon + 1);
  }
  if (url.host.empty()) return std::nullopt;

  url.port = url.scheme == "https" ? 443 : 80;
  if (!port_text.empty()) {
    int port = 0;
    const auto [end, ec] = std::from_chars(
        port_text.data(), port_text.data() + port_text.size(), port);
    if (ec != std::errc() || end != port_text.data() + port_text.size() ||
        port <= 0 || port > 65535) {
      return std::nullopt;
    }
    url.port = port;
  }

  rest = rest.substr(0, rest.find('#'));
  url.path = rest.empty() || rest.front() != '/' ? "/" + std::string(rest)
                                                 : std::string(rest);
  return url;
}

std::string_view to_string(TransportError error) {
  switch (error) {
    case TransportError::kNone:
      return "none";
    case TransportError::kConnect:
      return "connect";
    case TransportError::kTimeout:
      return "timeout";
    case TransportError::kOther:
      return "other";
  }
  return "other";
}

Exchange send(const Url& url, std::string_view method, const Headers& headers,
              std::string_view body, std::chrono::milliseconds limit) {
  Exchange exchange;
  const auto start = Clock::now();
  const auto deadline = start + limit;

  httplib::Client client(url.scheme + "://" +
                         (url.host.find(':') != std::string::npos
                              ? "[" + url.host + "]"
                              : url.host) +
                         ":" + std::to_string(url.port));
  client.set_connection_timeout(limit);
  client.set_read_timeout(limit);
  client.set_write_timeout(limit);
  client.set_keep_alive(false);

  httplib::Request request;
  request.method = std::string(method);
  request.path = url.path;
  for (const auto& [name, value] : headers) request.set_header(name, value);
  request.body = std::string(body);
  request.progress = [deadline](uint64_t, uint64_t) {
    return Clock::now() < deadline;
  };

  const httplib::Result result = client.send(request);
  exchange.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      Clock::now() - start);

  if (!result) {
    exchange.response.status = 0;
    const httplib::Error error = result.error();
    exchange.error_detail = httplib::to_string(error);
    switch (error) {
      case httplib::Error::Connection:
      case httplib::Error::BindIPAddress:
      case httplib::Error::SSLConnection:
      case httplib::Error::SSLServerVerification:
      case httplib::Error::SSLLoadingCerts:
      case httplib::Error::ProxyConnection:
        exchange.error = TransportError::kConnect;
        break;
      case httplib::Error::ConnectionTimeout:
      case httplib::Error::Canceled:
        exchange.error = TransportError::kTimeout;
        break;
      case httplib::Error::Read:
        // A read failure at the limit is the per-recv timeout firing; an
        // earlier one is the peer dropping the connection.
        exchange.error = Clock::now() >= deadline -
                                             std::chrono::milliseconds(20)
                             ? TransportError::kTimeout
                             : TransportError::kOther;
        break;
      default:
        exchange.error = TransportError::kOther;
        break;
    }
    return exchange;
  }

  exchange.response.status = result->status;
  for (const auto& [name, value] : result->headers) {
    exchange.response.headers.emplace(name, value);
  }
  exchange.response.body = result->body;
  if (Clock::now() > deadline) exchange.error = TransportError::kTimeout;
  return exchange;
}

}  // namespace instant_assist::http
