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

#include "instant_assist/gateway.hpp"

#include <algorithm>
#include <charconv>
#include <ctime>
#include <set>
#include <sstream>

#include "instant_assist/text.hpp"

namespace instant_assist::gateway {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;
using std::chrono::milliseconds;

const std::set<std::string, std::less<>> kKnownFields = {
    "bind_address", "keys",     "allowed_origins", "deadline_ms",
    "kb_path",      "upstream", "log_path"};

std::string join_path(std::string_view parent, std::string_view field) {
  return parent.empty() ? std::string(field)
                        : std::string(parent) + "." + std::string(field);
}

std::optional<std::string> optional_string(const json& object,
                                           std::string_view field,
                                           std::string_view parent,
                                           std::vector<ConfigError>& errors) {
  const auto it = object.find(field);
  if (it == object.end()) return std::nullopt;
  if (!it->is_string()) {
    errors.push_back({ConfigErrorKind::kSchemaError, join_path(parent, field),
                      "must be a string"});
    return std::nullopt;
  }
  return it->get<std::string>();
}

std::optional<milliseconds> optional_millis(const json& object,
                                            std::string_view field,
                                            std::string_view parent,
                                            std::vector<ConfigError>& errors) {
  const auto it = object.find(field);
  if (it == object.end()) return std::nullopt;
  if (!it->is_number_integer()) {
    errors.push_back({ConfigErrorKind::kSchemaError, join_path(parent, field),
                      "must be an integer"});
    return std::nullopt;
  }
  const auto value = it->get<int64_t>();
  if (value <= 0) {
    errors.push_back({ConfigErrorKind::kInvariantViolation,
                      join_path(parent, field), "must be positive"});
    return std::nullopt;
  }
  return milliseconds(value);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t seconds = std::chrono::system_clock::to_time_t(now);
  const auto millis =
      std::chrono::duration_cast<milliseconds>(now.time_since_epoch()).count() %
      1000;
  std::tm tm{};
  gmtime_r(&seconds, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof(out), "%s.%03dZ", buffer, static_cast<int>(millis));
  return out;
}

http::Response json_response(int status, const json& body) {
  http::Response response;
  response.status = status;
  response.headers.emplace("Content-Type",
                           std::string(protocol::kJsonContentType));
  response.body = body.dump(-1, ' ', false, json::error_handler_t::replace);
  return response;
}

http::Response error_response(int status, std::string_view code) {
  return json_response(status, json{{"error", code}});
}

http::Response method_not_allowed(std::string_view allow) {
  http::Response response = error_response(405, "MethodNotAllowed");
  response.headers.emplace("Allow", std::string(allow));
  return response;
}

int64_t millis_since(Clock::time_point start) {
  return std::chrono::duration_cast<milliseconds>(Clock::now() - start).count();
}

}  // namespace

bool GatewayConfig::allows_any_origin() const {
  return allowed_origins.size() == 1 && allowed_origins.front() == kWildcardOrigin;
}

std::string describe(const ConfigError& error) {
  std::string out = error.kind == ConfigErrorKind::kSchemaError
                        ? "SchemaError"
                        : "InvariantViolation";
  out += ": ";
  out += error.path.empty() ? std::string("<document>") : error.path;
  out += ": ";
  out += error.message;
  return out;
}

std::optional<std::pair<std::string, int>> split_bind_address(
    std::string_view address) {
  const size_t colon = address.rfind(':');
  if (colon == std::string_view::npos || colon == 0) return std::nullopt;
  std::string_view host = address.substr(0, colon);
  const std::string_view port_text = address.substr(colon + 1);
  if (host.front() == '[') {
    if (host.size() < 3 || host.back() != ']') return std::nullopt;
    host = host.substr(1, host.size() - 2);
  }
  int port = -1;
  const auto [end, ec] = std::from_chars(
      port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc() || end != port_text.data() + port_text.size() ||
      port < 0 || port > 65535) {
    return std::nullopt;
  }
  return std::pair<std::string, int>(std::string(host), port);
}

Result<LoadedConfig, std::vector<ConfigError>> load_config(
    const json& document) {
  std::vector<ConfigError> errors;
  LoadedConfig loaded;
  GatewayConfig& config = loaded.config;

  if (!document.is_object()) {
    errors.push_back({ConfigErrorKind::kSchemaError, "", "must be an object"});
    return Unexpected(std::move(errors));
  }
  for (const auto& [name, value] : document.items()) {
    if (!kKnownFields.contains(name)) {
      loaded.warnings.push_back("ignoring unknown config field '" + name + "'");
    }
  }

  if (auto bind = optional_string(document, "bind_address", "", errors)) {
    if (!split_bind_address(*bind)) {
      errors.push_back({ConfigErrorKind::kSchemaError, "bind_address",
                        "must be host:port with port in [0, 65535]"});
    }
    config.bind_address = std::move(*bind);
  } else if (!document.contains("bind_address")) {
    errors.push_back(
        {ConfigErrorKind::kSchemaError, "bind_address", "missing field"});
  }

  if (const auto keys = document.find("keys"); keys != document.end()) {
    if (!keys->is_object()) {
      errors.push_back(
          {ConfigErrorKind::kSchemaError, "keys", "must be an object"});
    } else {
      auto question = optional_string(*keys, "question_key", "keys", errors)
                          .value_or(std::string(protocol::kDefaultQuestionKey));
      auto answer = optional_string(*keys, "answer_key", "keys", errors)
                        .value_or(std::string(protocol::kDefaultAnswerKey));
      if (auto made = protocol::KeyConfig::create(question, answer)) {
        config.keys = std::move(*made);
      } else {
        errors.push_back({ConfigErrorKind::kInvariantViolation, "keys",
                          "keys must be non-empty and contain no whitespace "
                          "or control characters"});
      }
    }
  }

  if (const auto origins = document.find("allowed_origins");
      origins != document.end()) {
    if (origins->is_string()) {
      config.allowed_origins.push_back(origins->get<std::string>());
      if (config.allowed_origins.front() != kWildcardOrigin) {
        errors.push_back({ConfigErrorKind::kSchemaError, "allowed_origins",
                          "a bare string must be \"*\"; use an array"});
      }
    } else if (origins->is_array()) {
      for (size_t i = 0; i < origins->size(); ++i) {
        const json& origin = (*origins)[i];
        if (!origin.is_string() || origin.get<std::string>().empty()) {
          errors.push_back({ConfigErrorKind::kSchemaError,
                            "allowed_origins[" + std::to_string(i) + "]",
                            "must be a non-empty string"});
          continue;
        }
        config.allowed_origins.push_back(origin.get<std::string>());
      }
      const auto wildcards =
          std::count(config.allowed_origins.begin(),
                     config.allowed_origins.end(), kWildcardOrigin);
      if (wildcards > 0 && config.allowed_origins.size() != 1) {
        errors.push_back({ConfigErrorKind::kInvariantViolation,
                          "allowed_origins",
                          "\"*\" cannot be combined with other origins"});
      }
    } else {
      errors.push_back({ConfigErrorKind::kSchemaError, "allowed_origins",
                        "must be \"*\" or an array of origins"});
    }
  }

  if (auto deadline = optional_millis(document, "deadline_ms", "", errors)) {
    config.deadline = *deadline;
  }
  if (config.deadline > kMaxDeadline) {
    errors.push_back({ConfigErrorKind::kInvariantViolation, "deadline_ms",
                      "must not exceed 2000 (the client's timeout)"});
  }

  if (auto kb_path = optional_string(document, "kb_path", "", errors)) {
    config.kb_path = std::filesystem::path(*kb_path);
  }
  if (auto log_path = optional_string(document, "log_path", "", errors)) {
    config.log_path = std::filesystem::path(*log_path);
  }

  if (const auto upstream = document.find("upstream");
      upstream != document.end()) {
    if (!upstream->is_object()) {
      errors.push_back(
          {ConfigErrorKind::kSchemaError, "upstream", "must be an object"});
    } else {
      UpstreamConfig parsed;
      if (auto url = optional_string(*upstream, "url", "upstream", errors)) {
        if (!http::parse_url(*url)) {
          errors.push_back({ConfigErrorKind::kSchemaError, "upstream.url",
                            "must be an absolute http(s) URL"});
        }
        parsed.url = std::move(*url);
      } else if (!upstream->contains("url")) {
        errors.push_back(
            {ConfigErrorKind::kSchemaError, "upstream.url", "missing field"});
      }
      if (auto key =
              optional_string(*upstream, "response_key", "upstream", errors)) {
        parsed.response_key = std::move(*key);
      }
      if (auto key =
              optional_string(*upstream, "request_key", "upstream", errors)) {
        parsed.request_key = std::move(*key);
      }
      if (!protocol::is_valid_key(parsed.response_key) ||
          !protocol::is_valid_key(parsed.request_key)) {
        errors.push_back({ConfigErrorKind::kInvariantViolation, "upstream",
                          "keys must be non-empty and contain no whitespace "
                          "or control characters"});
      }
      if (auto timeout =
              optional_millis(*upstream, "timeout_ms", "upstream", errors)) {
        parsed.timeout = *timeout;
      }
      if (parsed.timeout > config.deadline) {
        errors.push_back({ConfigErrorKind::kInvariantViolation,
                          "upstream.timeout_ms",
                          "must not exceed deadline_ms"});
      }
      config.upstream = std::move(parsed);
    }
  }

  if (!document.contains("kb_path") && !document.contains("upstream")) {
    errors.push_back({ConfigErrorKind::kInvariantViolation, "",
                      "at least one of kb_path or upstream is required"});
  }

  if (!errors.empty()) return Unexpected(std::move(errors));
  return loaded;
}

Result<LoadedConfig, std::vector<ConfigError>> load_config_file(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return Unexpected(std::vector<ConfigError>{
        {ConfigErrorKind::kSchemaError, "", "cannot open " + path.string()}});
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const json document =
      json::parse(buffer.str(), nullptr, /*allow_exceptions=*/false);
  if (document.is_discarded()) {
    return Unexpected(std::vector<ConfigError>{
        {ConfigErrorKind::kSchemaError, "", path.string() + " is not valid JSON"}});
  }
  auto loaded = load_config(document);
  if (!loaded) return loaded;

  const std::filesystem::path base = path.parent_path();
  GatewayConfig& config = loaded->config;
  if (config.kb_path && config.kb_path->is_relative()) {
    config.kb_path = base / *config.kb_path;
  }
  if (config.log_path && config.log_path->is_relative()) {
    config.log_path = base / *config.log_path;
  }
  return loaded;
}

ProviderOutcome ProviderOutcome::answered(protocol::AnswerText answer) {
  return ProviderOutcome(Kind::kAnswered, std::move(answer), {});
}

ProviderOutcome ProviderOutcome::no_answer() {
  return ProviderOutcome(Kind::kNoAnswer, std::nullopt, {});
}

ProviderOutcome ProviderOutcome::failed(std::string reason) {
  return ProviderOutcome(Kind::kFailed, std::nullopt, std::move(reason));
}

ProviderOutcome proxy_provider(const protocol::QuestionText& question,
                               const UpstreamConfig& upstream,
                               milliseconds limit) {
  const auto url = http::parse_url(upstream.url);
  if (!url) return ProviderOutcome::failed("bad_url");
  const milliseconds wait = std::min(upstream.timeout, limit);
  if (wait.count() <= 0) return ProviderOutcome::failed("timeout");

  http::Headers headers;
  headers.emplace("Content-Type", std::string(protocol::kFormContentType));
  headers.emplace("Accept", "application/json");
  const std::string body = protocol::form_encode(upstream.request_key) + "=" +
                           protocol::form_encode(question.text());

  const http::Exchange exchange = http::send(*url, "POST", headers, body, wait);
  if (!exchange.ok()) {
    return ProviderOutcome::failed(std::string(to_string(exchange.error)));
  }
  if (exchange.response.status != 200) {
    return ProviderOutcome::failed("status " +
                                   std::to_string(exchange.response.status));
  }

  auto keys = protocol::KeyConfig::create(
      std::string(protocol::kDefaultQuestionKey), upstream.response_key);
  if (!keys) return ProviderOutcome::failed("bad_response_key");
  auto answer = protocol::parse_response(exchange.response.body, *keys);
  if (answer) return ProviderOutcome::answered(std::move(*answer));
  switch (answer.error()) {
    case protocol::ContractCode::kMissingAnswerKey:
    case protocol::ContractCode::kEmptyAnswer:
      return ProviderOutcome::no_answer();
    default:
      return ProviderOutcome::failed(std::string(to_string(answer.error())));
  }
}

ProviderOutcome KnowledgeBaseProvider::ask(
    const protocol::QuestionText& question, milliseconds) const {
  if (auto answer = knowledge::matched_answer(*kb_, question)) {
    return ProviderOutcome::answered(std::move(*answer));
  }
  return ProviderOutcome::no_answer();
}

ProviderOutcome UpstreamProvider::ask(const protocol::QuestionText& question,
                                      milliseconds remaining) const {
  return proxy_provider(question, upstream_, remaining);
}

CorsDecision cors_filter(const http::Request& request,
                         const GatewayConfig& config) {
  CorsDecision decision;
  const std::string origin = request.header("Origin");
  if (origin.empty()) return decision;

  std::string allow_origin;
  if (config.allows_any_origin()) {
    allow_origin = std::string(kWildcardOrigin);
  } else if (std::find(config.allowed_origins.begin(),
                       config.allowed_origins.end(),
                       origin) != config.allowed_origins.end()) {
    allow_origin = origin;
    decision.headers.emplace("Vary", "Origin");
  } else {
    decision.verdict = CorsDecision::Verdict::kDenied;
    return decision;
  }

  decision.verdict = CorsDecision::Verdict::kAllowed;
  decision.headers.emplace("Access-Control-Allow-Origin", allow_origin);
  decision.headers.emplace("Access-Control-Allow-Methods",
                           std::string(kAllowMethods));
  decision.headers.emplace("Access-Control-Allow-Headers",
                           std::string(kAllowHeaders));
  decision.headers.emplace("Access-Control-Max-Age", std::string(kMaxAge));
  return decision;
}

json to_json(const AskRecord& record) {
  return json{{"ts", record.ts},
              {"question", record.question},
              {"provider", record.provider},
              {"latency_ms", record.latency_ms},
              {"answered", record.answered}};
}

std::unique_ptr<RequestLog> RequestLog::open(
    const std::filesystem::path& path) {
  auto log = std::make_unique<RequestLog>();
  log->file_.open(path, std::ios::app | std::ios::binary);
  if (!log->file_) return nullptr;
  log->sink_ = &log->file_;
  return log;
}

void RequestLog::append(const AskRecord& record) {
  const std::string line =
      to_json(record).dump(-1, ' ', false, json::error_handler_t::replace);
  std::lock_guard lock(mutex_);
  ++count_;
  if (sink_ != nullptr) {
    *sink_ << line << '\n';
    sink_->flush();
  }
}

size_t RequestLog::count() const {
  std::lock_guard lock(mutex_);
  return count_;
}

Gateway::Gateway(GatewayConfig config,
                 std::shared_ptr<const knowledge::KnowledgeBase> kb,
                 std::shared_ptr<RequestLog> log)
    : config_(std::move(config)), kb_(std::move(kb)), log_(std::move(log)) {
  if (!log_) log_ = std::make_shared<RequestLog>();
  if (kb_) providers_.push_back(std::make_unique<KnowledgeBaseProvider>(kb_));
  if (config_.upstream) {
    providers_.push_back(std::make_unique<UpstreamProvider>(*config_.upstream));
  }
}

http::Response Gateway::handle(const http::Request& request) const {
  const CorsDecision cors = cors_filter(request, config_);
  if (request.method == "OPTIONS") return preflight(cors);

  http::Response response;
  const std::string& method = request.method;
  const bool is_get = method == "GET" || method == "HEAD";
  if (request.path == "/ask") {
    response = method == "POST" ? handle_ask(request)
                                : method_not_allowed("POST, OPTIONS");
  } else if (request.path == "/questions") {
    response = is_get ? handle_questions() : method_not_allowed("GET, OPTIONS");
  } else if (request.path == "/health") {
    response = is_get ? handle_health() : method_not_allowed("GET, OPTIONS");
  } else {
    response = error_response(404, "NotFound");
  }

  if (cors.verdict == CorsDecision::Verdict::kAllowed) {
    for (const auto& [name, value] : cors.headers) {
      response.headers.insert_or_assign(name, value);
    }
  }
  return response;
}

http::Response Gateway::preflight(const CorsDecision& cors) const {
  http::Response response;
  switch (cors.verdict) {
    case CorsDecision::Verdict::kDenied:
      return error_response(403, "OriginDenied");
    case CorsDecision::Verdict::kAllowed:
      response.status = 204;
      response.headers = cors.headers;
      return response;
    case CorsDecision::Verdict::kNotCors:
      response.status = 204;
      response.headers.emplace("Allow", std::string(kAllowMethods));
      return response;
  }
  return response;
}

http::Response Gateway::handle_ask(const http::Request& request) const {
  const auto start = Clock::now();
  AskRecord record;
  record.ts = utc_timestamp();

  const auto question = protocol::parse_request(
      request.body, request.header("Content-Type"), config_.keys);
  if (!question) {
    record.provider = "none";
    record.latency_ms = millis_since(start);
    log_->append(record);
    return error_response(400, protocol::to_string(question.error()));
  }
  record.question = question->text();

  std::optional<protocol::AnswerText> answer;
  for (const auto& provider : providers_) {
    const milliseconds remaining =
        config_.deadline -
        std::chrono::duration_cast<milliseconds>(Clock::now() - start);
    if (remaining.count() <= 0) break;
    ProviderOutcome outcome = provider->ask(*question, remaining);
    if (outcome.kind() == ProviderOutcome::Kind::kAnswered) {
      answer = *outcome.answer();
      record.provider = std::string(provider->name());
      record.answered = true;
      break;
    }
  }
  if (!answer) {
    answer = protocol::AnswerText::create(
        kb_ ? kb_->fallback_answer() : std::string(kBuiltinFallback));
    record.provider = "fallback";
  }

  http::Response response = json_response(200, json::object());
  response.body = protocol::render_response(*answer, config_.keys);
  record.latency_ms = millis_since(start);
  log_->append(record);
  return response;
}

http::Response Gateway::handle_questions() const {
  if (!kb_) return error_response(404, "NoKnowledgeBase");
  json items = json::array();
  for (const knowledge::CatalogItem& item : knowledge::catalog(*kb_)) {
    items.push_back({{"question", item.question}, {"category", item.category}});
  }
  return json_response(200, items);
}

http::Response Gateway::handle_health() const {
  return json_response(
      200, json{{"status", "ok"}, {"kb_entries", kb_ ? kb_->size() : 0}});
}

Result<std::unique_ptr<Gateway>, std::vector<std::string>> create_gateway(
    GatewayConfig config, std::shared_ptr<RequestLog> default_log) {
  std::vector<std::string> errors;
  std::shared_ptr<const knowledge::KnowledgeBase> kb;
  if (config.kb_path) {
    auto loaded = knowledge::load_knowledge_base_file(*config.kb_path);
    if (loaded) {
      kb = std::make_shared<const knowledge::KnowledgeBase>(
          std::move(*loaded));
    } else {
      for (const auto& error : loaded.error()) {
        errors.push_back(config.kb_path->string() + ": " +
                         knowledge::describe(error));
      }
    }
  }
  std::shared_ptr<RequestLog> log = std::move(default_log);
  if (config.log_path) {
    log = RequestLog::open(*config.log_path);
    if (!log) errors.push_back("cannot open log " + config.log_path->string());
  }
  if (!errors.empty()) return Unexpected(std::move(errors));
  return std::make_unique<Gateway>(std::move(config), std::move(kb),
                                   std::move(log));
}

}  // namespace instant_assist::gateway
