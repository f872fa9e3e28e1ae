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

#include "instant_assist/protocol.hpp"

#include <json.hpp>

#include "instant_assist/text.hpp"

namespace instant_assist::protocol {

namespace {

using nlohmann::json;

enum class BodyEncoding { kForm, kJson };

std::optional<BodyEncoding> classify_media_type(std::string_view content_type) {
  std::string_view media = content_type.substr(0, content_type.find(';'));
  const std::string lowered = text::ascii_lower(text::trim(media));
  if (lowered == "application/x-www-form-urlencoded") return BodyEncoding::kForm;
  if (lowered == "application/json" ||
      (lowered.starts_with("application/") && lowered.ends_with("+json"))) {
    return BodyEncoding::kJson;
  }
  return std::nullopt;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

// Returns the decoded value of the first pair whose decoded name equals
// `key`; an empty optional inside means the key is absent.
Result<std::optional<std::string>, RequestError> find_form_value(
    std::string_view body, std::string_view key) {
  while (true) {
    const size_t amp = body.find('&');
    const std::string_view pair = body.substr(0, amp);
    if (!pair.empty()) {
      const size_t eq = pair.find('=');
      const auto name = form_decode(pair.substr(0, eq));
      if (name && *name == key) {
        auto value = form_decode(
            eq == std::string_view::npos ? std::string_view{}
                                         : pair.substr(eq + 1));
        if (!value || !text::is_valid_utf8(*value)) {
          return Unexpected(RequestError::kMalformedBody);
        }
        return std::optional<std::string>(std::move(*value));
      }
    }
    if (amp == std::string_view::npos) break;
    body.remove_prefix(amp + 1);
  }
  return std::optional<std::string>();
}

Result<std::optional<std::string>, RequestError> find_json_value(
    std::string_view body, std::string_view key) {
  const json doc = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    return Unexpected(RequestError::kMalformedBody);
  }
  const auto it = doc.find(key);
  if (it == doc.end()) return std::optional<std::string>();
  if (!it->is_string()) return Unexpected(RequestError::kMalformedBody);
  return std::optional<std::string>(it->get<std::string>());
}

}  // namespace

bool is_valid_key(std::string_view key) {
  if (key.empty()) return false;
  for (char c : key) {
    const auto byte = static_cast<unsigned char>(c);
    if (byte < 0x20 || byte == 0x7F || c == ' ') return false;
  }
  return true;
}

KeyConfig::KeyConfig()
    : question_key_(kDefaultQuestionKey), answer_key_(kDefaultAnswerKey) {}

KeyConfig::KeyConfig(std::string question_key, std::string answer_key)
    : question_key_(std::move(question_key)),
      answer_key_(std::move(answer_key)) {}

std::optional<KeyConfig> KeyConfig::create(std::string question_key,
                                           std::string answer_key) {
  if (!is_valid_key(question_key) || !is_valid_key(answer_key)) {
    return std::nullopt;
  }
  return KeyConfig(std::move(question_key), std::move(answer_key));
}

std::optional<QuestionText> QuestionText::create(std::string_view raw) {
  const std::string_view trimmed = text::trim(raw);
  if (trimmed.empty()) return std::nullopt;
  return QuestionText(std::string(trimmed));
}

std::optional<AnswerText> AnswerText::create(std::string text) {
  if (text.empty()) return std::nullopt;
  return AnswerText(std::move(text));
}

std::optional<TimeoutBudget> TimeoutBudget::create(
    std::chrono::milliseconds total) {
  if (total.count() <= 0) return std::nullopt;
  return TimeoutBudget(total);
}

std::string_view to_string(RequestError error) {
  switch (error) {
    case RequestError::kUnsupportedMediaType:
      return "UnsupportedMediaType";
    case RequestError::kMalformedBody:
      return "MalformedBody";
    case RequestError::kMissingQuestionKey:
      return "MissingQuestionKey";
    case RequestError::kEmptyQuestion:
      return "EmptyQuestion";
  }
  return "Unknown";
}

std::string_view to_string(ContractCode code) {
  switch (code) {
    case ContractCode::kNotJson:
      return "NotJson";
    case ContractCode::kMissingAnswerKey:
      return "MissingAnswerKey";
    case ContractCode::kNonStringAnswer:
      return "NonStringAnswer";
    case ContractCode::kEmptyAnswer:
      return "EmptyAnswer";
  }
  return "Unknown";
}

Result<QuestionText, RequestError> parse_request(std::string_view body,
                                                 std::string_view content_type,
                                                 const KeyConfig& keys) {
  const auto encoding = classify_media_type(content_type);
  if (!encoding) return Unexpected(RequestError::kUnsupportedMediaType);

  auto found = *encoding == BodyEncoding::kForm
                   ? find_form_value(body, keys.question_key())
                   : find_json_value(body, keys.question_key());
  if (!found) return Unexpected(found.error());
  if (!found->has_value()) {
    return Unexpected(RequestError::kMissingQuestionKey);
  }
  auto question = QuestionText::create(**found);
  if (!question) return Unexpected(RequestError::kEmptyQuestion);
  return std::move(*question);
}

Result<std::string, ContractCode> render_response(std::string_view answer,
                                                  const KeyConfig& keys) {
  if (answer.empty()) return Unexpected(ContractCode::kEmptyAnswer);
  json doc = json::object();
  doc[keys.answer_key()] = std::string(answer);
  return doc.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string render_response(const AnswerText& answer, const KeyConfig& keys) {
  return render_response(answer.text(), keys).value();
}

Result<AnswerText, ContractCode> parse_response(std::string_view body,
                                                const KeyConfig& keys) {
  const json doc = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) return Unexpected(ContractCode::kNotJson);
  if (!doc.is_object()) return Unexpected(ContractCode::kMissingAnswerKey);
  const auto it = doc.find(keys.answer_key());
  if (it == doc.end()) return Unexpected(ContractCode::kMissingAnswerKey);
  if (!it->is_string()) return Unexpected(ContractCode::kNonStringAnswer);
  auto answer = AnswerText::create(it->get<std::string>());
  if (!answer) return Unexpected(ContractCode::kEmptyAnswer);
  return std::move(*answer);
}

ContractReport validate_response_contract(std::string_view body,
                                          const KeyConfig& keys) {
  ContractReport report;
  const auto parsed = parse_response(body, keys);
  if (parsed) return report;

  std::string detail;
  switch (parsed.error()) {
    case ContractCode::kNotJson:
      detail = "response body is not valid JSON";
      break;
    case ContractCode::kMissingAnswerKey:
      detail = "no member named '" + keys.answer_key() +
               "' in a top-level JSON object";
      break;
    case ContractCode::kNonStringAnswer:
      detail = "member '" + keys.answer_key() + "' is not a string";
      break;
    case ContractCode::kEmptyAnswer:
      detail = "member '" + keys.answer_key() + "' is an empty string";
      break;
  }
  report.violations.push_back({parsed.error(), std::move(detail)});
  return report;
}

std::string form_encode(std::string_view value) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(value.size() * 3);
  for (char c : value) {
    const auto byte = static_cast<unsigned char>(c);
    if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
        (c >= '0' && c <= '9') || c == '-' || c == '.' || c == '_' ||
        c == '*') {
      out.push_back(c);
    } else if (c == ' ') {
      out.push_back('+');
    } else {
      out.push_back('%');
      out.push_back(kHex[byte >> 4]);
      out.push_back(kHex[byte & 0x0F]);
    }
  }
  return out;
}

std::optional<std::string> form_decode(std::string_view component) {
  std::string out;
  out.reserve(component.size());
  for (size_t i = 0; i < component.size(); ++i) {
    const char c = component[i];
    if (c == '+') {
      out.push_back(' ');
    } else if (c == '%') {
      if (i + 2 >= component.size()) {
        return std::nullopt;
      }
      const int hi = hex_value(component[i + 1]);
      const int lo = hex_value(component[i + 2]);
      if (hi < 0 || lo < 0) return std::nullopt;
      out.push_back(static_cast<char>(hi * 16 + lo));
      i += 2;
    } else {
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace instant_assist::protocol
