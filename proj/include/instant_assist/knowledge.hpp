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

// Reference question-answering engine: token normalization, Jaccard
// pattern matching over a curated knowledge base, and the categorized
// question catalog.

#ifndef INSTANT_ASSIST_KNOWLEDGE_HPP_
#define INSTANT_ASSIST_KNOWLEDGE_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "instant_assist/protocol.hpp"
#include "instant_assist/result.hpp"

namespace instant_assist::knowledge {

inline constexpr double kDefaultMatchThreshold = 0.35;
inline constexpr std::string_view kQuestionPlaceholder = "{{question}}";

struct NormalizedQuery {
  std::vector<std::string> tokens;

  friend bool operator==(const NormalizedQuery&,
                         const NormalizedQuery&) = default;
};

// Lowercases `text`, turns every non letter/digit code point into a
// separator and splits. ASCII is handled exactly; beyond ASCII, common
// punctuation and symbol blocks separate and Latin-1, Latin Extended-A,
// Greek and Cyrillic capitals are folded.
NormalizedQuery normalize(std::string_view text);

// |A ∩ B| / |A ∪ B| over token sets; 0 when both are empty.
double jaccard_score(const NormalizedQuery& a, const NormalizedQuery& b);

struct KnowledgeEntry {
  std::string id;
  std::string display_question;
  std::string category;
  std::vector<std::string> patterns;
  std::string answer_template;
  bool listed = true;
};

struct MatchResult {
  std::string entry_id;
  double score = 0.0;
};

struct CatalogItem {
  std::string question;
  std::string category;

  friend bool operator==(const CatalogItem&, const CatalogItem&) = default;
};

enum class LoadErrorKind { kSchemaError, kDuplicateId };

struct LoadError {
  LoadErrorKind kind;
  std::string path;  // JSON location, e.g. "entries[2].patterns".
  std::string message;
};

std::string_view to_string(LoadErrorKind kind);
std::string describe(const LoadError& error);

// Immutable, validated set of entries. Patterns are normalized once at
// construction.
class KnowledgeBase {
 public:
  static Result<KnowledgeBase, std::vector<LoadError>> create(
      std::vector<KnowledgeEntry> entries, std::string fallback_answer,
      double match_threshold = kDefaultMatchThreshold);

  const std::vector<KnowledgeEntry>& entries() const { return entries_; }
  const std::string& fallback_answer() const { return fallback_answer_; }
  double match_threshold() const { return match_threshold_; }
  size_t size() const { return entries_.size(); }

  // Normalized patterns of entry `index`, parallel to entries()[index].patterns.
  const std::vector<NormalizedQuery>& normalized_patterns(size_t index) const {
    return normalized_[index];
  }

  const KnowledgeEntry* find(std::string_view id) const;

 private:
  KnowledgeBase() = default;

  std::vector<KnowledgeEntry> entries_;
  std::vector<std::vector<NormalizedQuery>> normalized_;
  std::string fallback_answer_;
  double match_threshold_ = kDefaultMatchThreshold;
};

// Highest scoring entry at or above the threshold; earlier entries win ties.
std::optional<MatchResult> best_match(const KnowledgeBase& kb,
                                      const NormalizedQuery& query);

// The matched entry's answer with "{{question}}" substituted, or nullopt
// when nothing clears the threshold.
std::optional<protocol::AnswerText> matched_answer(
    const KnowledgeBase& kb, const protocol::QuestionText& question);

// matched_answer() or else the knowledge base's fallback answer.
protocol::AnswerText answer_for(const KnowledgeBase& kb,
                                const protocol::QuestionText& question);

// Validates a parsed knowledge base document, collecting every problem.
Result<KnowledgeBase, std::vector<LoadError>> load_knowledge_base(
    const nlohmann::json& document);

Result<KnowledgeBase, std::vector<LoadError>> load_knowledge_base_file(
    const std::filesystem::path& path);

// Listed entries grouped by category in order of first appearance.
std::vector<CatalogItem> catalog(const KnowledgeBase& kb);

}  // namespace instant_assist::knowledge

#endif  // INSTANT_ASSIST_KNOWLEDGE_HPP_
