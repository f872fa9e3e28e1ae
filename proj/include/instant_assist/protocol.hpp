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

// Codec and contract checks for the engine webhook: a POST carrying the
// question under a configurable key, answered by a JSON object carrying the
// answer under another configurable key.

#ifndef INSTANT_ASSIST_PROTOCOL_HPP_
#define INSTANT_ASSIST_PROTOCOL_HPP_

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "instant_assist/result.hpp"

namespace instant_assist::protocol {

inline constexpr std::string_view kDefaultQuestionKey = "question";
inline constexpr std::string_view kDefaultAnswerKey = "resultText";
inline constexpr std::string_view kJsonContentType =
    "application/json; charset=utf-8";
inline constexpr std::string_view kFormContentType =
    "application/x-www-form-urlencoded";

// True when `key` is non-empty and free of whitespace and control characters.
bool is_valid_key(std::string_view key);

// Names of the request parameter and the response member. Always valid.
class KeyConfig {
 public:
  KeyConfig();

  // Returns nullopt when either key fails is_valid_key().
  static std::optional<KeyConfig> create(std::string question_key,
                                         std::string answer_key);

  const std::string& question_key() const { return question_key_; }
  const std::string& answer_key() const { return answer_key_; }

  friend bool operator==(const KeyConfig&, const KeyConfig&) = default;

 private:
  KeyConfig(std::string question_key, std::string answer_key);

  std::string question_key_;
  std::string answer_key_;
};

// A user question with surrounding whitespace removed. Never empty.
class QuestionText {
 public:
  static std::optional<QuestionText> create(std::string_view raw);

  const std::string& text() const { return text_; }

  friend bool operator==(const QuestionText&, const QuestionText&) = default;

 private:
  explicit QuestionText(std::string text) : text_(std::move(text)) {}

  std::string text_;
};

// A natural-language answer. Never empty.
class AnswerText {
 public:
  static std::optional<AnswerText> create(std::string text);

  const std::string& text() const { return text_; }

  friend bool operator==(const AnswerText&, const AnswerText&) = default;

 private:
  explicit AnswerText(std::string text) : text_(std::move(text)) {}

  std::string text_;
};

// Client-side wait limit for one engine round trip.
class TimeoutBudget {
 public:
  static constexpr std::chrono::milliseconds kDefault{2000};

  TimeoutBudget() = default;
  // Returns nullopt for non-positive durations.
  static std::optional<TimeoutBudget> create(std::chrono::milliseconds total);

  std::chrono::milliseconds total() const { return total_; }

 private:
  explicit TimeoutBudget(std::chrono::milliseconds total) : total_(total) {}

  std::chrono::milliseconds total_ = kDefault;
};

enum class RequestError {
  kUnsupportedMediaType,
  kMalformedBody,
  kMissingQuestionKey,
  kEmptyQuestion,
};

// Contract violation categories, declared in reporting order.
enum class ContractCode {
  kNotJson,
  kMissingAnswerKey,
  kNonStringAnswer,
  kEmptyAnswer,
};

std::string_view to_string(RequestError error);
std::string_view to_string(ContractCode code);

struct Violation {
  ContractCode code;
  std::string detail;
};

struct ContractReport {
  std::vector<Violation> violations;

  bool conformant() const { return violations.empty(); }
};

// Extracts the question from a form-urlencoded or JSON request entity.
Result<QuestionText, RequestError> parse_request(std::string_view body,
                                                 std::string_view content_type,
                                                 const KeyConfig& keys);

// Renders {"<answer_key>": answer} as compact JSON.
Result<std::string, ContractCode> render_response(std::string_view answer,
                                                  const KeyConfig& keys);
std::string render_response(const AnswerText& answer, const KeyConfig& keys);

// Reads the answer member of an engine response. Members other than the
// answer key are ignored.
Result<AnswerText, ContractCode> parse_response(std::string_view body,
                                                const KeyConfig& keys);

// Reports the first violated contract category, or nothing when `body` is a
// conformant engine response.
ContractReport validate_response_contract(std::string_view body,
                                          const KeyConfig& keys);

// Encodes `value` for use in an application/x-www-form-urlencoded body.
std::string form_encode(std::string_view value);

// Decodes one form-urlencoded component ('+' is a space). Returns nullopt on
// a truncated or non-hex percent escape.
std::optional<std::string> form_decode(std::string_view component);

}  // namespace instant_assist::protocol

#endif  // INSTANT_ASSIST_PROTOCOL_HPP_
