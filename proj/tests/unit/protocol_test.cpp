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

#include <gtest/gtest.h>

#include <random>

#include "generators.hpp"

namespace instant_assist::protocol {
namespace {

constexpr std::string_view kForm = "application/x-www-form-urlencoded";
constexpr std::string_view kJson = "application/json";

KeyConfig keys(std::string question, std::string answer) {
  return KeyConfig::create(std::move(question), std::move(answer)).value();
}

TEST(KeyConfigTest, DefaultsMatchWebhookContract) {
  const KeyConfig defaults;
  EXPECT_EQ(defaults.question_key(), "question");
  EXPECT_EQ(defaults.answer_key(), "resultText");
}

TEST(KeyConfigTest, RejectsEmptyWhitespaceAndControlCharacters) {
  EXPECT_FALSE(KeyConfig::create("", "resultText"));
  EXPECT_FALSE(KeyConfig::create("question", ""));
  EXPECT_FALSE(KeyConfig::create("my key", "resultText"));
  EXPECT_FALSE(KeyConfig::create("question", "result\tText"));
  EXPECT_FALSE(KeyConfig::create("q\x01", "a"));
  EXPECT_FALSE(KeyConfig::create("q\x7f", "a"));
  EXPECT_TRUE(KeyConfig::create("q", "answer"));
  EXPECT_TRUE(KeyConfig::create("frage\xC3\xBC", "antwort"));
}

TEST(TimeoutBudgetTest, DefaultsToTwoSecondsAndRejectsNonPositive) {
  EXPECT_EQ(TimeoutBudget().total(), std::chrono::milliseconds(2000));
  EXPECT_FALSE(TimeoutBudget::create(std::chrono::milliseconds(0)));
  EXPECT_FALSE(TimeoutBudget::create(std::chrono::milliseconds(-5)));
  EXPECT_EQ(TimeoutBudget::create(std::chrono::milliseconds(1))->total().count(),
            1);
}

TEST(ParseRequestTest, FormBodyWithDefaultKey) {
  const auto question = parse_request("question=hello", kForm, KeyConfig());
  ASSERT_TRUE(question);
  EXPECT_EQ(question->text(), "hello");
}

TEST(ParseRequestTest, EmptyFormValueIsEmptyQuestion) {
  const auto question = parse_request("question=", kForm, KeyConfig());
  ASSERT_FALSE(question);
  EXPECT_EQ(question.error(), RequestError::kEmptyQuestion);
}

TEST(ParseRequestTest, JsonBodyWithCustomKey) {
  const auto question = parse_request(R"({"q":"hi"})", kJson, keys("q", "a"));
  ASSERT_TRUE(question);
  EXPECT_EQ(question->text(), "hi");
}

TEST(ParseRequestTest, PercentDecodesFormValues) {
  const auto question = parse_request("question=What%20is%20a%20flood%3F",
                                      kForm, KeyConfig());
  ASSERT_TRUE(question);
  EXPECT_EQ(question->text(), "What is a flood?");
}

TEST(ParseRequestTest, PlusIsSpaceAndUtf8Survives) {
  const auto question =
      parse_request("question=caf%C3%A9+au+lait", kForm, KeyConfig());
  ASSERT_TRUE(question);
  EXPECT_EQ(question->text(), "caf\xC3\xA9 au lait");
}

TEST(ParseRequestTest, TrimsSurroundingWhitespace) {
  EXPECT_EQ(parse_request("question=%20%20hi%0A", kForm, KeyConfig())->text(),
            "hi");
  EXPECT_EQ(
      parse_request(R"({"question":"  spaced out \t"})", kJson, KeyConfig())
          ->text(),
      "spaced out");
  EXPECT_EQ(parse_request("question=+++", kForm, KeyConfig()).error(),
            RequestError::kEmptyQuestion);
}

TEST(ParseRequestTest, MediaTypeParametersAndCaseAreIgnored) {
  EXPECT_TRUE(parse_request("question=x",
                            "Application/X-WWW-Form-Urlencoded; charset=UTF-8",
                            KeyConfig()));
  EXPECT_TRUE(parse_request(R"({"question":"x"})",
                            "application/json;charset=utf-8", KeyConfig()));
  EXPECT_TRUE(parse_request(R"({"question":"x"})", "application/vnd.api+json",
                            KeyConfig()));
}

TEST(ParseRequestTest, OtherMediaTypesAreUnsupported) {
  for (std::string_view type : {"text/plain", "", "multipart/form-data",
                                "application/xml"}) {
    const auto result = parse_request("question=x", type, KeyConfig());
    ASSERT_FALSE(result) << type;
    EXPECT_EQ(result.error(), RequestError::kUnsupportedMediaType) << type;
  }
}

TEST(ParseRequestTest, MalformedBodies) {
  EXPECT_EQ(parse_request("question=%G1", kForm, KeyConfig()).error(),
            RequestError::kMalformedBody);
  EXPECT_EQ(parse_request("question=abc%2", kForm, KeyConfig()).error(),
            RequestError::kMalformedBody);
  EXPECT_EQ(parse_request("question=%FF%FE", kForm, KeyConfig()).error(),
            RequestError::kMalformedBody);
  EXPECT_EQ(parse_request("{not json", kJson, KeyConfig()).error(),
            RequestError::kMalformedBody);
  EXPECT_EQ(parse_request(R"(["question"])", kJson, KeyConfig()).error(),
            RequestError::kMalformedBody);
  EXPECT_EQ(parse_request(R"({"question":42})", kJson, KeyConfig()).error(),
            RequestError::kMalformedBody);
}

TEST(ParseRequestTest, MissingKey) {
  EXPECT_EQ(parse_request("q=hi", kForm, KeyConfig()).error(),
            RequestError::kMissingQuestionKey);
  EXPECT_EQ(parse_request("", kForm, KeyConfig()).error(),
            RequestError::kMissingQuestionKey);
  EXPECT_EQ(parse_request(R"({"q":"hi"})", kJson, KeyConfig()).error(),
            RequestError::kMissingQuestionKey);
}

TEST(ParseRequestTest, IgnoresOtherMembers) {
  EXPECT_EQ(parse_request("a=%zz&question=ok&b=1", kForm, KeyConfig())->text(),
            "ok");
  EXPECT_EQ(parse_request("question=first&question=second", kForm, KeyConfig())
                ->text(),
            "first");
  EXPECT_EQ(parse_request(R"({"x":[1,{"y":null}],"question":"ok"})", kJson,
                          KeyConfig())
                ->text(),
            "ok");
}

TEST(ParseRequestTest, KeyIndependenceProperty) {
  // Appending unrelated members never changes the parsed question.
  std::mt19937 rng(7);
  for (int i = 0; i < 200; ++i) {
    const std::string question = testing::random_printable_string(rng, 1, 20);
    const std::string noise_key = "x" + std::to_string(i);
    const std::string noise = testing::random_printable_string(rng, 0, 20);
    const auto base = parse_request("question=" + form_encode(question), kForm,
                                    KeyConfig());
    const auto noisy = parse_request(
        form_encode(noise_key) + "=" + form_encode(noise) +
            "&question=" + form_encode(question) + "&" + noise_key + "2=" +
            form_encode(noise),
        kForm, KeyConfig());
    ASSERT_EQ(base.has_value(), noisy.has_value());
    if (base) EXPECT_EQ(base->text(), noisy->text());
  }
}

TEST(RenderResponseTest, DefaultKey) {
  EXPECT_EQ(render_response("A flood is...", KeyConfig()).value(),
            R"({"resultText":"A flood is..."})");
}

TEST(RenderResponseTest, CustomKey) {
  EXPECT_EQ(render_response("ok", keys("question", "answer")).value(),
            R"({"answer":"ok"})");
}

TEST(RenderResponseTest, EmptyAnswerIsRejected) {
  const auto rendered = render_response("", KeyConfig());
  ASSERT_FALSE(rendered);
  EXPECT_EQ(rendered.error(), ContractCode::kEmptyAnswer);
}

TEST(RenderResponseTest, EscapesJsonSpecials) {
  EXPECT_EQ(render_response("say \"hi\"\n\\", KeyConfig()).value(),
            R"({"resultText":"say \"hi\"\n\\"})");
}

TEST(ParseResponseTest, ReadsAnswer) {
  EXPECT_EQ(parse_response(R"({"resultText":"42"})", KeyConfig())->text(), "42");
  EXPECT_EQ(
      parse_response(R"({"extra":1,"resultText":"42"})", KeyConfig())->text(),
      "42");
}

TEST(ParseResponseTest, Errors) {
  EXPECT_EQ(parse_response(R"({"other":"x"})", KeyConfig()).error(),
            ContractCode::kMissingAnswerKey);
  EXPECT_EQ(parse_response("not json", KeyConfig()).error(),
            ContractCode::kNotJson);
  EXPECT_EQ(parse_response("", KeyConfig()).error(), ContractCode::kNotJson);
  EXPECT_EQ(parse_response(R"({"resultText":7})", KeyConfig()).error(),
            ContractCode::kNonStringAnswer);
  EXPECT_EQ(parse_response(R"({"resultText":null})", KeyConfig()).error(),
            ContractCode::kNonStringAnswer);
  EXPECT_EQ(parse_response(R"({"resultText":""})", KeyConfig()).error(),
            ContractCode::kEmptyAnswer);
  EXPECT_EQ(parse_response(R"(["resultText"])", KeyConfig()).error(),
            ContractCode::kMissingAnswerKey);
}

TEST(ValidateResponseContractTest, Examples) {
  EXPECT_TRUE(
      validate_response_contract(R"({"resultText":"ok"})", KeyConfig())
          .conformant());

  const auto not_json = validate_response_contract("not json", KeyConfig());
  ASSERT_EQ(not_json.violations.size(), 1u);
  EXPECT_EQ(not_json.violations[0].code, ContractCode::kNotJson);

  const auto number =
      validate_response_contract(R"({"resultText": 7})", KeyConfig());
  ASSERT_EQ(number.violations.size(), 1u);
  EXPECT_EQ(number.violations[0].code, ContractCode::kNonStringAnswer);
  EXPECT_NE(number.violations[0].detail.find("resultText"), std::string::npos);
}

TEST(ValidateResponseContractTest, AgreesWithParseResponse) {
  const std::vector<std::string> bodies = {
      R"({"resultText":"ok"})", R"({"resultText":""})", R"({"resultText":[]})",
      R"({"answer":"ok"})",     "[]",                   "null",
      "",                       "{",                    R"("resultText")",
      R"({"resultText":"a","resultText2":false})"};
  for (const auto& body : bodies) {
    const auto parsed = parse_response(body, KeyConfig());
    const auto report = validate_response_contract(body, KeyConfig());
    EXPECT_EQ(report.conformant(), parsed.has_value()) << body;
    if (!parsed) {
      ASSERT_EQ(report.violations.size(), 1u);
      EXPECT_EQ(report.violations[0].code, parsed.error()) << body;
    }
  }
}

TEST(ProtocolPropertyTest, RenderParseRoundTrip) {
  std::mt19937 rng(20240611);
  for (int i = 0; i < 300; ++i) {
    const std::string answer = testing::random_printable_string(rng, 1, 40);
    const KeyConfig k = keys(testing::random_key(rng), testing::random_key(rng));
    const auto rendered = render_response(answer, k);
    ASSERT_TRUE(rendered);
    const auto parsed = parse_response(*rendered, k);
    ASSERT_TRUE(parsed) << *rendered;
    EXPECT_EQ(parsed->text(), answer);
    EXPECT_TRUE(validate_response_contract(*rendered, k).conformant());
  }
}

TEST(FormCodecTest, EncodeDecodeProperty) {
  std::mt19937 rng(99);
  for (int i = 0; i < 300; ++i) {
    const std::string value = testing::random_printable_string(rng, 0, 30);
    const std::string encoded = form_encode(value);
    EXPECT_EQ(encoded.find_first_of(" &=?#"), std::string::npos);
    EXPECT_EQ(form_decode(encoded).value(), value);
  }
}

}  // namespace
}  // namespace instant_assist::protocol
