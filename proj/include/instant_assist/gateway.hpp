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

// The engine service: /ask implements the webhook contract over a provider
// chain (knowledge base, then an optional upstream engine, then fallback
// text), /questions serves the categorized catalog and /health reports
// liveness. CORS and the response deadline are enforced here.

#ifndef INSTANT_ASSIST_GATEWAY_HPP_
#define INSTANT_ASSIST_GATEWAY_HPP_

#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "instant_assist/http.hpp"
#include "instant_assist/knowledge.hpp"
#include "instant_assist/protocol.hpp"
#include "instant_assist/result.hpp"

namespace instant_assist::gateway {

inline constexpr std::chrono::milliseconds kDefaultDeadline{1500};
inline constexpr std::chrono::milliseconds kMaxDeadline{2000};
inline constexpr std::chrono::milliseconds kDefaultUpstreamTimeout{1000};
inline constexpr std::string_view kWildcardOrigin = "*";
inline constexpr std::string_view kAllowMethods = "POST, GET, OPTIONS";
inline constexpr std::string_view kAllowHeaders = "Content-Type";
inline constexpr std::string_view kMaxAge = "600";
inline constexpr std::string_view kBuiltinFallback =
    "Sorry, I could not find an answer to that question.";
inline constexpr std::string_view kConfigEnvVar = "INSTANT_ASSIST_CONFIG";

struct UpstreamConfig {
  std::string url;
  std::string request_key{protocol::kDefaultQuestionKey};
  std::string response_key{protocol::kDefaultAnswerKey};
  std::chrono::milliseconds timeout = kDefaultUpstreamTimeout;
};

struct GatewayConfig {
  std::string bind_address;
  protocol::KeyConfig keys;
  std::vector<std::string> allowed_origins;  // {"*"} allows every origin
  std::chrono::milliseconds deadline = kDefaultDeadline;
  std::optional<std::filesystem::path> kb_path;
  std::optional<UpstreamConfig> upstream;
  std::optional<std::filesystem::path> log_path;

  bool allows_any_origin() const;
};

enum class ConfigErrorKind { kSchemaError, kInvariantViolation };

struct ConfigError {
  ConfigErrorKind kind;
  std::string path;
  std::string message;
};

std::string describe(const ConfigError& error);

struct LoadedConfig {
  GatewayConfig config;
  std::vector<std::string> warnings;
};

Result<LoadedConfig, std::vector<ConfigError>> load_config(
    const nlohmann::json& document);

// Relative kb_path/log_path values resolve against the file's directory.
Result<LoadedConfig, std::vector<ConfigError>> load_config_file(
    const std::filesystem::path& path);

// Splits "host:port"; the host may be a bracketed IPv6 literal.
std::optional<std::pair<std::string, int>> split_bind_address(
    std::string_view address);

class ProviderOutcome {
 public:
  enum class Kind { kAnswered, kNoAnswer, kFailed };

  static ProviderOutcome answered(protocol::AnswerText answer);
  static ProviderOutcome no_answer();
  static ProviderOutcome failed(std::string reason);

  Kind kind() const { return kind_; }
  const std::optional<protocol::AnswerText>& answer() const { return answer_; }
  const std::string& reason() const { return reason_; }

 private:
  ProviderOutcome(Kind kind, std::optional<protocol::AnswerText> answer,
                  std::string reason)
      : kind_(kind), answer_(std::move(answer)), reason_(std::move(reason)) {}

  Kind kind_;
  std::optional<protocol::AnswerText> answer_;
  std::string reason_;
};

// Forwards `question` to the upstream engine and reads its answer, waiting
// no longer than min(upstream.timeout, limit).
ProviderOutcome proxy_provider(const protocol::QuestionText& question,
                               const UpstreamConfig& upstream,
                               std::chrono::milliseconds limit);

class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string_view name() const = 0;
  // `remaining` is what is left of the request deadline.
  virtual ProviderOutcome ask(const protocol::QuestionText& question,
                              std::chrono::milliseconds remaining) const = 0;
};

class KnowledgeBaseProvider final : public Provider {
 public:
  explicit KnowledgeBaseProvider(
      std::shared_ptr<const knowledge::KnowledgeBase> kb)
      : kb_(std::move(kb)) {}

  std::string_view name() const override { return "knowledge_base"; }
  ProviderOutcome ask(const protocol::QuestionText& question,
                      std::chrono::milliseconds remaining) const override;

 private:
  std::shared_ptr<const knowledge::KnowledgeBase> kb_;
};

class UpstreamProvider final : public Provider {
 public:
  explicit UpstreamProvider(UpstreamConfig upstream)
      : upstream_(std::move(upstream)) {}

  std::string_view name() const override { return "upstream"; }
  ProviderOutcome ask(const protocol::QuestionText& question,
                      std::chrono::milliseconds remaining) const override;

 private:
  UpstreamConfig upstream_;
};

struct CorsDecision {
  enum class Verdict {
    kNotCors,  // no Origin header
    kAllowed,
    kDenied,
  };

  Verdict verdict = Verdict::kNotCors;
  http::Headers headers;  // Access-Control-* headers to attach
};

CorsDecision cors_filter(const http::Request& request,
                         const GatewayConfig& config);

struct AskRecord {
  std::string ts;  // RFC 3339 UTC with milliseconds
  std::string question;
  std::string provider;
  int64_t latency_ms = 0;
  bool answered = false;
};

nlohmann::json to_json(const AskRecord& record);

// Append-only JSON-lines log of /ask requests. Writes are serialized.
class RequestLog {
 public:
  // Counts records without writing them anywhere.
  RequestLog() = default;
  // Writes to `sink`, which must outlive the log.
  explicit RequestLog(std::ostream& sink) : sink_(&sink) {}

  static std::unique_ptr<RequestLog> open(const std::filesystem::path& path);

  void append(const AskRecord& record);
  size_t count() const;

 private:
  mutable std::mutex mutex_;
  std::ofstream file_;
  std::ostream* sink_ = nullptr;
  size_t count_ = 0;
};

class Gateway {
 public:
  Gateway(GatewayConfig config,
          std::shared_ptr<const knowledge::KnowledgeBase> kb,
          std::shared_ptr<RequestLog> log);

  // Routes and applies CORS.
  http::Response handle(const http::Request& request) const;

  http::Response handle_ask(const http::Request& request) const;
  http::Response handle_questions() const;
  http::Response handle_health() const;

  const GatewayConfig& config() const { return config_; }
  const RequestLog& log() const { return *log_; }

 private:
  http::Response preflight(const CorsDecision& cors) const;

  GatewayConfig config_;
  std::shared_ptr<const knowledge::KnowledgeBase> kb_;
  std::shared_ptr<RequestLog> log_;
  std::vector<std::unique_ptr<Provider>> providers_;
};

// Loads the knowledge base and opens the log named by `config`, falling
// back to `default_log` when no log_path is set.
Result<std::unique_ptr<Gateway>, std::vector<std::string>> create_gateway(
    GatewayConfig config, std::shared_ptr<RequestLog> default_log = nullptr);

// Serves a Gateway over HTTP/1.1.
class GatewayServer {
 public:
  explicit GatewayServer(const Gateway& gateway);
  ~GatewayServer();

  GatewayServer(const GatewayServer&) = delete;
  GatewayServer& operator=(const GatewayServer&) = delete;

  // Port 0 binds an ephemeral port.
  bool bind(const std::string& host, int port);
  int port() const { return port_; }

  // Blocks until stop().
  void listen();
  // Serves on a background thread.
  void start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = -1;
};

}  // namespace instant_assist::gateway

#endif  // INSTANT_ASSIST_GATEWAY_HPP_
