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

// Conformance probing of third-party engines against the webhook contract:
// response shape, configurable keys, the 2-second client budget and CORS
// preflight behavior.

#ifndef INSTANT_ASSIST_CONFORMANCE_HPP_
#define INSTANT_ASSIST_CONFORMANCE_HPP_

#include <chrono>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "instant_assist/http.hpp"
#include "instant_assist/protocol.hpp"
#include "instant_assist/result.hpp"

namespace instant_assist::conformance {

enum class FailReason {
  kUnreachable,
  kTimeout,
  kHttpStatus,
  kNotJson,
  kMissingAnswerKey,
  kNonStringAnswer,
  kEmptyAnswer,
  kOriginDenied,
  kMethodDenied,
};

std::string_view to_string(FailReason reason);

struct Verdict {
  std::optional<FailReason> failure;  // empty means PASS

  bool pass() const { return !failure.has_value(); }
  // "PASS" or "FAIL(<reason>)".
  std::string str() const;
};

struct ProbeReport {
  std::string endpoint;
  std::string question;
  int http_status = 0;  // 0 when no response arrived
  int64_t latency_ms = 0;
  protocol::ContractReport contract;
  Verdict verdict;
};

struct BatchSummary {
  size_t total = 0;
  size_t passed = 0;
  size_t failed = 0;
  std::vector<ProbeReport> reports;
};

struct PreflightReport {
  std::string endpoint;
  std::string origin;
  int http_status = 0;
  std::string allow_origin;
  std::string allow_methods;
  Verdict verdict;
};

// POSTs `question` form-encoded and judges the reply. Network trouble is
// reported as FAIL(Unreachable) or FAIL(Timeout), never thrown.
ProbeReport probe(const http::Url& endpoint, std::string_view question,
                  const protocol::KeyConfig& keys,
                  const protocol::TimeoutBudget& budget);

// Sends an OPTIONS preflight for a cross-origin POST from `origin`.
PreflightReport preflight_check(
    const http::Url& endpoint, std::string_view origin,
    std::chrono::milliseconds limit = protocol::TimeoutBudget::kDefault);

// One question per line; blank lines are skipped. Fails when the file is
// missing or holds no questions.
Result<std::vector<std::string>, std::string> read_questions_file(
    const std::filesystem::path& path);

// Probes every question with up to `concurrency` in flight. `on_report`, if
// set, sees reports in input order as they become available.
BatchSummary batch_run(
    const http::Url& endpoint, const std::vector<std::string>& questions,
    const protocol::KeyConfig& keys, const protocol::TimeoutBudget& budget,
    size_t concurrency = 1,
    const std::function<void(const ProbeReport&)>& on_report = {});

nlohmann::json to_json(const ProbeReport& report);
nlohmann::json to_json(const PreflightReport& report);
// Totals only; reports are emitted separately.
nlohmann::json to_json(const BatchSummary& summary);

// Entry point of the command-line tool. `args` excludes the program name.
// Returns 0 when everything passes, 1 on any failure, 2 on usage errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace instant_assist::conformance

#endif  // INSTANT_ASSIST_CONFORMANCE_HPP_
