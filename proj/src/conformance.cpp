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

#include "instant_assist/conformance.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include "instant_assist/text.hpp"

namespace instant_assist::conformance {

namespace {

using nlohmann::json;

FailReason from_contract(protocol::ContractCode code) {
  switch (code) {
    case protocol::ContractCode::kNotJson:
      return FailReason::kNotJson;
    case protocol::ContractCode::kMissingAnswerKey:
      return FailReason::kMissingAnswerKey;
    case protocol::ContractCode::kNonStringAnswer:
      return FailReason::kNonStringAnswer;
    case protocol::ContractCode::kEmptyAnswer:
      return FailReason::kEmptyAnswer;
  }
  return FailReason::kNotJson;
}

bool lists_method(std::string_view list, std::string_view method) {
  while (!list.empty()) {
    const size_t comma = list.find(',');
    const std::string_view item = text::trim(list.substr(0, comma));
    if (item == method || item == "*") return true;
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  return false;
}

std::string quoted(std::string_view s) {
  return json(std::string(s)).dump(-1, ' ', false,
                                   json::error_handler_t::replace);
}

void print_probe(const ProbeReport& report, std::ostream& out) {
  out << report.verdict.str() << "  status=" << report.http_status
      << " latency=" << report.latency_ms << "ms question="
      << quoted(report.question) << '\n';
  for (const auto& violation : report.contract.violations) {
    out << "    " << protocol::to_string(violation.code) << ": "
        << violation.detail << '\n';
  }
}

void print_json(const json& value, std::ostream& out) {
  out << value.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
}

struct CommonOptions {
  std::string engine;
  std::string data_key{protocol::kDefaultQuestionKey};
  std::string response_key{protocol::kDefaultAnswerKey};
  int64_t timeout_ms = protocol::TimeoutBudget::kDefault.count();
  bool json = false;
};

}  // namespace

std::string_view to_string(FailReason reason) {
  switch (reason) {
    case FailReason::kUnreachable:
      return "Unreachable";
    case FailReason::kTimeout:
      return "Timeout";
    case FailReason::kHttpStatus:
      return "HttpStatus";
    case FailReason::kNotJson:
      return "NotJson";
    case FailReason::kMissingAnswerKey:
      return "MissingAnswerKey";
    case FailReason::kNonStringAnswer:
      return "NonStringAnswer";
    case FailReason::kEmptyAnswer:
      return "EmptyAnswer";
    case FailReason::kOriginDenied:
      return "OriginDenied";
    case FailReason::kMethodDenied:
      return "MethodDenied";
  }
  return "Unknown";
}

std::string Verdict::str() const {
  if (pass()) return "PASS";
  return "FAIL(" + std::string(to_string(*failure)) + ")";
}

ProbeReport probe(const http::Url& endpoint, std::string_view question,
                  const protocol::KeyConfig& keys,
                  const protocol::TimeoutBudget& budget) {
  ProbeReport report;
  report.endpoint = endpoint.scheme + "://" + endpoint.host + ":" +
                    std::to_string(endpoint.port) + endpoint.path;
  report.question = std::string(question);

  http::Headers headers;
  headers.emplace("Content-Type", std::string(protocol::kFormContentType));
  headers.emplace("Accept", "application/json");
  const std::string body = protocol::form_encode(keys.question_key()) + "=" +
                           protocol::form_encode(question);
  const http::Exchange exchange =
      http::send(endpoint, "POST", headers, body, budget.total());

  report.latency_ms = exchange.elapsed.count();
  report.http_status = exchange.response.status;
  const bool got_response = exchange.response.status != 0;

  if (exchange.error == http::TransportError::kConnect ||
      exchange.error == http::TransportError::kOther) {
    report.verdict.failure = FailReason::kUnreachable;
    return report;
  }
  if (got_response) {
    report.contract =
        protocol::validate_response_contract(exchange.response.body, keys);
  }
  if (exchange.error == http::TransportError::kTimeout ||
      report.latency_ms > budget.total().count()) {
    report.verdict.failure = FailReason::kTimeout;
  } else if (report.http_status != 200) {
    report.verdict.failure = FailReason::kHttpStatus;
  } else if (!report.contract.conformant()) {
    report.verdict.failure =
        from_contract(report.contract.violations.front().code);
  }
  return report;
}

PreflightReport preflight_check(const http::Url& endpoint,
                                std::string_view origin,
                                std::chrono::milliseconds limit) {
  PreflightReport report;
  report.endpoint = endpoint.scheme + "://" + endpoint.host + ":" +
                    std::to_string(endpoint.port) + endpoint.path;
  report.origin = std::string(origin);

  http::Headers headers;
  headers.emplace("Origin", std::string(origin));
  headers.emplace("Access-Control-Request-Method", "POST");
  headers.emplace("Access-Control-Request-Headers", "content-type");
  const http::Exchange exchange =
      http::send(endpoint, "OPTIONS", headers, {}, limit);
  if (!exchange.ok()) {
    report.verdict.failure = FailReason::kUnreachable;
    return report;
  }

  report.http_status = exchange.response.status;
  report.allow_origin = exchange.response.header("Access-Control-Allow-Origin");
  report.allow_methods =
      exchange.response.header("Access-Control-Allow-Methods");
  const bool ok_status = report.http_status >= 200 && report.http_status < 300;
  if (!ok_status ||
      (report.allow_origin != origin && report.allow_origin != "*")) {
    report.verdict.failure = FailReason::kOriginDenied;
  } else if (!lists_method(report.allow_methods, "POST")) {
    report.verdict.failure = FailReason::kMethodDenied;
  }
  return report;
}

Result<std::vector<std::string>, std::string> read_questions_file(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return Unexpected("cannot open " + path.string());
  std::vector<std::string> questions;
  std::string line;
  while (std::getline(in, line)) {
    const std::string_view trimmed = text::trim(line);
    if (!trimmed.empty()) questions.emplace_back(trimmed);
  }
  if (questions.empty()) return Unexpected(path.string() + " has no questions");
  return questions;
}

BatchSummary batch_run(
    const http::Url& endpoint, const std::vector<std::string>& questions,
    const protocol::KeyConfig& keys, const protocol::TimeoutBudget& budget,
    size_t concurrency,
    const std::function<void(const ProbeReport&)>& on_report) {
  std::vector<std::optional<ProbeReport>> slots(questions.size());
  std::mutex mutex;
  std::condition_variable ready;
  size_t next = 0;

  const auto worker = [&] {
    while (true) {
      size_t index;
      {
        std::lock_guard lock(mutex);
        if (next >= questions.size()) return;
        index = next++;
      }
      ProbeReport report = probe(endpoint, questions[index], keys, budget);
      {
        std::lock_guard lock(mutex);
        slots[index] = std::move(report);
      }
      ready.notify_all();
    }
  };

  const size_t workers =
      std::clamp<size_t>(concurrency, 1, std::max<size_t>(questions.size(), 1));
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (size_t i = 0; i < workers; ++i) pool.emplace_back(worker);

  BatchSummary summary;
  summary.reports.reserve(questions.size());
  for (size_t i = 0; i < questions.size(); ++i) {
    std::unique_lock lock(mutex);
    ready.wait(lock, [&] { return slots[i].has_value(); });
    ProbeReport report = std::move(*slots[i]);
    lock.unlock();
    if (on_report) on_report(report);
    ++summary.total;
    ++(report.verdict.pass() ? summary.passed : summary.failed);
    summary.reports.push_back(std::move(report));
  }
  return summary;
}

json to_json(const ProbeReport& report) {
  json violations = json::array();
  for (const auto& violation : report.contract.violations) {
    violations.push_back({{"code", protocol::to_string(violation.code)},
                          {"detail", violation.detail}});
  }
  json out = {{"endpoint", report.endpoint},
              {"question", report.question},
              {"http_status", report.http_status},
              {"latency_ms", report.latency_ms},
              {"contract", violations},
              {"verdict", report.verdict.pass() ? "PASS" : "FAIL"}};
  if (!report.verdict.pass()) out["reason"] = to_string(*report.verdict.failure);
  return out;
}

json to_json(const PreflightReport& report) {
  json out = {{"endpoint", report.endpoint},
              {"origin", report.origin},
              {"http_status", report.http_status},
              {"allow_origin", report.allow_origin},
              {"allow_methods", report.allow_methods},
              {"verdict", report.verdict.pass() ? "PASS" : "FAIL"}};
  if (!report.verdict.pass()) out["reason"] = to_string(*report.verdict.failure);
  return out;
}

json to_json(const BatchSummary& summary) {
  return {{"total", summary.total},
          {"passed", summary.passed},
          {"failed", summary.failed}};
}

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Checks a question-answering engine against the webhook "
               "contract (POST question, JSON answer, 2 s budget, CORS).",
               "instant-assist-conformance"};
  app.require_subcommand(1);

  CommonOptions probe_opts;
  std::string question;
  auto* probe_cmd = app.add_subcommand("probe", "Ask one question");
  probe_cmd->add_option("--engine", probe_opts.engine, "Engine URL")
      ->required();
  probe_cmd->add_option("--question", question, "Question text")->required();
  probe_cmd->add_option("--data-key", probe_opts.data_key,
                        "Request parameter name");
  probe_cmd->add_option("--response-key", probe_opts.response_key,
                        "Answer member name");
  probe_cmd->add_option("--timeout-ms", probe_opts.timeout_ms,
                        "Latency budget in milliseconds");
  probe_cmd->add_flag("--json", probe_opts.json, "Emit JSON lines");

  CommonOptions preflight_opts;
  std::string origin;
  auto* preflight_cmd =
      app.add_subcommand("preflight", "Send a CORS preflight for POST");
  preflight_cmd->add_option("--engine", preflight_opts.engine, "Engine URL")
      ->required();
  preflight_cmd->add_option("--origin", origin, "Origin to present")
      ->required();
  preflight_cmd->add_flag("--json", preflight_opts.json, "Emit JSON");

  CommonOptions batch_opts;
  std::string file;
  size_t concurrency = 1;
  auto* batch_cmd =
      app.add_subcommand("batch", "Ask every question in a file, one per line");
  batch_cmd->add_option("--engine", batch_opts.engine, "Engine URL")
      ->required();
  batch_cmd->add_option("--file", file, "Questions file")->required();
  batch_cmd->add_option("--data-key", batch_opts.data_key,
                        "Request parameter name");
  batch_cmd->add_option("--response-key", batch_opts.response_key,
                        "Answer member name");
  batch_cmd->add_option("--timeout-ms", batch_opts.timeout_ms,
                        "Latency budget in milliseconds");
  batch_cmd->add_option("--concurrency", concurrency,
                        "Probes in flight; >1 skews latency numbers")
      ->check(CLI::PositiveNumber);
  batch_cmd->add_flag("--json", batch_opts.json, "Emit JSON lines");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return 2;
  }

  const CommonOptions& opts = probe_cmd->parsed()       ? probe_opts
                              : preflight_cmd->parsed() ? preflight_opts
                                                        : batch_opts;
  const auto endpoint = http::parse_url(opts.engine);
  if (!endpoint) {
    err << "error: --engine must be an absolute http(s) URL\n";
    return 2;
  }

  if (preflight_cmd->parsed()) {
    const PreflightReport report = preflight_check(*endpoint, origin);
    if (opts.json) {
      print_json(to_json(report), out);
    } else {
      out << report.verdict.str() << "  status=" << report.http_status
          << " allow-origin=" << quoted(report.allow_origin)
          << " allow-methods=" << quoted(report.allow_methods) << '\n';
    }
    return report.verdict.pass() ? 0 : 1;
  }

  const auto keys = protocol::KeyConfig::create(opts.data_key, opts.response_key);
  if (!keys) {
    err << "error: keys must be non-empty without whitespace or control "
           "characters\n";
    return 2;
  }
  const auto budget =
      protocol::TimeoutBudget::create(std::chrono::milliseconds(opts.timeout_ms));
  if (!budget) {
    err << "error: --timeout-ms must be positive\n";
    return 2;
  }

  if (probe_cmd->parsed()) {
    const ProbeReport report = probe(*endpoint, question, *keys, *budget);
    if (opts.json) {
      print_json(to_json(report), out);
    } else {
      print_probe(report, out);
    }
    return report.verdict.pass() ? 0 : 1;
  }

  const auto questions = read_questions_file(file);
  if (!questions) {
    err << "error: " << questions.error() << "\n" << batch_cmd->help();
    return 2;
  }
  const BatchSummary summary = batch_run(
      *endpoint, *questions, *keys, *budget, concurrency,
      [&](const ProbeReport& report) {
        if (opts.json) {
          print_json(to_json(report), out);
        } else {
          print_probe(report, out);
        }
      });
  if (opts.json) {
    print_json(to_json(summary), out);
  } else {
    out << "summary: " << summary.passed << "/" << summary.total << " passed, "
        << summary.failed << " failed\n";
  }
  return summary.failed == 0 ? 0 : 1;
}

}  // namespace instant_assist::conformance
