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

#include "instant_assist/knowledge.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace instant_assist::knowledge {

namespace {

using nlohmann::json;

constexpr char32_t kInvalid = 0xFFFFFFFF;

// Decodes one code point at `pos`, advancing it. Malformed input yields
// kInvalid and consumes a single byte.
char32_t next_code_point(std::string_view s, size_t& pos) {
  const auto lead = static_cast<uint8_t>(s[pos]);
  size_t extra = 0;
  char32_t cp = 0;
  if (lead < 0x80) {
    ++pos;
    return lead;
  } else if ((lead & 0xE0) == 0xC0) {
    extra = 1;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    extra = 2;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    extra = 3;
    cp = lead & 0x07;
  } else {
    ++pos;
    return kInvalid;
  }
  if (pos + extra >= s.size()) {
    ++pos;
    return kInvalid;
  }
  for (size_t k = 1; k <= extra; ++k) {
    const auto cont = static_cast<uint8_t>(s[pos + k]);
    if ((cont & 0xC0) != 0x80) {
      ++pos;
      return kInvalid;
    }
    cp = (cp << 6) | (cont & 0x3F);
  }
  static constexpr char32_t kMinForLength[] = {0, 0x80, 0x800, 0x10000};
  if (cp < kMinForLength[extra] || cp > 0x10FFFF ||
      (cp >= 0xD800 && cp <= 0xDFFF)) {
    ++pos;
    return kInvalid;
  }
  pos += extra + 1;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool in_range(char32_t cp, char32_t lo, char32_t hi) {
  return cp >= lo && cp <= hi;
}

bool is_word_code_point(char32_t cp) {
  if (cp == kInvalid) return false;
  if (cp < 0x80) {
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') ||
           (cp >= '0' && cp <= '9');
  }
  // C1 controls, Latin-1 punctuation and symbols, multiplication/division.
  if (in_range(cp, 0x80, 0xBF) || cp == 0xD7 || cp == 0xF7) return false;
  // General punctuation through miscellaneous symbols and arrows.
  if (in_range(cp, 0x2000, 0x2BFF)) return false;
  // Supplemental punctuation, CJK symbols and punctuation.
  if (in_range(cp, 0x2E00, 0x2E7F) || in_range(cp, 0x3000, 0x303F)) {
    return false;
  }
  // CJK compatibility forms, small forms, fullwidth ASCII punctuation.
  if (in_range(cp, 0xFE10, 0xFE1F) || in_range(cp, 0xFE30, 0xFE6F) ||
      in_range(cp, 0xFF01, 0xFF0F) || in_range(cp, 0xFF1A, 0xFF20) ||
      in_range(cp, 0xFF3B, 0xFF40) || in_range(cp, 0xFF5B, 0xFF65)) {
    return false;
  }
  // Specials, private use and emoji/pictograph blocks.
  if (in_range(cp, 0xE000, 0xF8FF) || in_range(cp, 0xFFF0, 0xFFFF) ||
      in_range(cp, 0x1F000, 0x1FAFF)) {
    return false;
  }
  return true;
}

char32_t fold_case(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp < 0x80) return cp;
  if (in_range(cp, 0xC0, 0xDE) && cp != 0xD7) return cp + 0x20;
  if (in_range(cp, 0x100, 0x12F) || in_range(cp, 0x132, 0x137) ||
      in_range(cp, 0x14A, 0x177)) {
    return (cp % 2 == 0) ? cp + 1 : cp;
  }
  if (in_range(cp, 0x139, 0x148) || in_range(cp, 0x179, 0x17E)) {
    return (cp % 2 == 1) ? cp + 1 : cp;
  }
  if (cp == 0x178) return 0xFF;
  if (in_range(cp, 0x391, 0x3A9) && cp != 0x3A2) return cp + 0x20;
  if (in_range(cp, 0x410, 0x42F)) return cp + 0x20;
  if (in_range(cp, 0x400, 0x40F)) return cp + 0x50;
  return cp;
}

std::vector<std::string> token_set(const NormalizedQuery& query) {
  std::vector<std::string> set = query.tokens;
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
  return set;
}

double jaccard_of_sets(const std::vector<std::string>& a,
                       const std::vector<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  size_t shared = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++shared;
      ++ia;
      ++ib;
    }
  }
  const size_t total = a.size() + b.size() - shared;
  return static_cast<double>(shared) / static_cast<double>(total);
}

std::string entry_path(size_t index) {
  return "entries[" + std::to_string(index) + "]";
}

// Pulls a required string member, recording a schema error when absent,
// ill-typed or (with `non_empty`) empty.
std::optional<std::string> required_string(const json& object,
                                           std::string_view field,
                                           const std::string& path,
                                           std::vector<LoadError>& errors,
                                           bool non_empty = true) {
  const std::string where = path.empty() ? std::string(field)
                                         : path + "." + std::string(field);
  const auto it = object.find(field);
  if (it == object.end()) {
    errors.push_back({LoadErrorKind::kSchemaError, where, "missing field"});
    return std::nullopt;
  }
  if (!it->is_string()) {
    errors.push_back({LoadErrorKind::kSchemaError, where, "must be a string"});
    return std::nullopt;
  }
  auto value = it->get<std::string>();
  if (non_empty && value.empty()) {
    errors.push_back({LoadErrorKind::kSchemaError, where, "must not be empty"});
    return std::nullopt;
  }
  return value;
}

std::optional<KnowledgeEntry> parse_entry(const json& node, size_t index,
                                          std::vector<LoadError>& errors) {
  const std::string path = entry_path(index);
  if (!node.is_object()) {
    errors.push_back({LoadErrorKind::kSchemaError, path, "must be an object"});
    return std::nullopt;
  }
  const size_t errors_before = errors.size();
  KnowledgeEntry entry;
  auto id = required_string(node, "id", path, errors);
  auto question = required_string(node, "question", path, errors);
  auto category = required_string(node, "category", path, errors);
  auto answer = required_string(node, "answer", path, errors);

  const auto patterns = node.find("patterns");
  if (patterns == node.end()) {
    errors.push_back(
        {LoadErrorKind::kSchemaError, path + ".patterns", "missing field"});
  } else if (!patterns->is_array() || patterns->empty()) {
    errors.push_back({LoadErrorKind::kSchemaError, path + ".patterns",
                      "must be a non-empty array of strings"});
  } else {
    for (size_t k = 0; k < patterns->size(); ++k) {
      const json& pattern = (*patterns)[k];
      if (!pattern.is_string()) {
        errors.push_back({LoadErrorKind::kSchemaError,
                          path + ".patterns[" + std::to_string(k) + "]",
                          "must be a string"});
        continue;
      }
      entry.patterns.push_back(pattern.get<std::string>());
    }
  }

  if (const auto listed = node.find("listed"); listed != node.end()) {
    if (listed->is_boolean()) {
      entry.listed = listed->get<bool>();
    } else {
      errors.push_back(
          {LoadErrorKind::kSchemaError, path + ".listed", "must be a boolean"});
    }
  }

  if (errors.size() != errors_before) return std::nullopt;
  entry.id = std::move(*id);
  entry.display_question = std::move(*question);
  entry.category = std::move(*category);
  entry.answer_template = std::move(*answer);
  return entry;
}

}  // namespace

NormalizedQuery normalize(std::string_view text) {
  NormalizedQuery query;
  std::string current;
  size_t pos = 0;
  while (pos < text.size()) {
    const char32_t cp = next_code_point(text, pos);
    if (is_word_code_point(cp)) {
      append_utf8(current, fold_case(cp));
    } else if (!current.empty()) {
      query.tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) query.tokens.push_back(std::move(current));
  return query;
}

double jaccard_score(const NormalizedQuery& a, const NormalizedQuery& b) {
  return jaccard_of_sets(token_set(a), token_set(b));
}

std::string_view to_string(LoadErrorKind kind) {
  switch (kind) {
    case LoadErrorKind::kSchemaError:
      return "SchemaError";
    case LoadErrorKind::kDuplicateId:
      return "DuplicateId";
  }
  return "Unknown";
}

std::string describe(const LoadError& error) {
  std::string out(to_string(error.kind));
  out += ": ";
  out += error.path.empty() ? std::string("<document>") : error.path;
  out += ": ";
  out += error.message;
  return out;
}

Result<KnowledgeBase, std::vector<LoadError>> KnowledgeBase::create(
    std::vector<KnowledgeEntry> entries, std::string fallback_answer,
    double match_threshold) {
  std::vector<LoadError> errors;
  if (fallback_answer.empty()) {
    errors.push_back(
        {LoadErrorKind::kSchemaError, "fallback_answer", "must not be empty"});
  }
  if (!(match_threshold >= 0.0 && match_threshold <= 1.0)) {
    errors.push_back({LoadErrorKind::kSchemaError, "match_threshold",
                      "must be within [0, 1]"});
  }
  std::unordered_set<std::string> seen;
  for (size_t i = 0; i < entries.size(); ++i) {
    const KnowledgeEntry& entry = entries[i];
    const std::string path = entry_path(i);
    if (entry.id.empty()) {
      errors.push_back(
          {LoadErrorKind::kSchemaError, path + ".id", "must not be empty"});
    } else if (!seen.insert(entry.id).second) {
      errors.push_back({LoadErrorKind::kDuplicateId, path + ".id",
                        "duplicate id '" + entry.id + "'"});
    }
    if (entry.display_question.empty()) {
      errors.push_back({LoadErrorKind::kSchemaError, path + ".question",
                        "must not be empty"});
    }
    if (entry.category.empty()) {
      errors.push_back({LoadErrorKind::kSchemaError, path + ".category",
                        "must not be empty"});
    }
    if (entry.patterns.empty()) {
      errors.push_back({LoadErrorKind::kSchemaError, path + ".patterns",
                        "must be a non-empty array of strings"});
    }
    if (entry.answer_template.empty()) {
      errors.push_back(
          {LoadErrorKind::kSchemaError, path + ".answer", "must not be empty"});
    }
  }
  if (!errors.empty()) return Unexpected(std::move(errors));

  KnowledgeBase kb;
  kb.normalized_.reserve(entries.size());
  for (const KnowledgeEntry& entry : entries) {
    std::vector<NormalizedQuery> normalized;
    normalized.reserve(entry.patterns.size());
    for (const std::string& pattern : entry.patterns) {
      normalized.push_back(normalize(pattern));
    }
    kb.normalized_.push_back(std::move(normalized));
  }
  kb.entries_ = std::move(entries);
  kb.fallback_answer_ = std::move(fallback_answer);
  kb.match_threshold_ = match_threshold;
  return kb;
}

const KnowledgeEntry* KnowledgeBase::find(std::string_view id) const {
  for (const KnowledgeEntry& entry : entries_) {
    if (entry.id == id) return &entry;
  }
  return nullptr;
}

std::optional<MatchResult> best_match(const KnowledgeBase& kb,
                                      const NormalizedQuery& query) {
  const std::vector<std::string> query_set = token_set(query);
  std::optional<size_t> best_index;
  double best_score = 0.0;
  for (size_t i = 0; i < kb.size(); ++i) {
    double entry_score = 0.0;
    for (const NormalizedQuery& pattern : kb.normalized_patterns(i)) {
      entry_score =
          std::max(entry_score, jaccard_of_sets(query_set, token_set(pattern)));
    }
    // Strict comparison keeps the earliest entry on ties.
    if (!best_index || entry_score > best_score) {
      best_index = i;
      best_score = entry_score;
    }
  }
  if (!best_index || best_score < kb.match_threshold()) return std::nullopt;
  return MatchResult{kb.entries()[*best_index].id, best_score};
}

std::optional<protocol::AnswerText> matched_answer(
    const KnowledgeBase& kb, const protocol::QuestionText& question) {
  const auto match = best_match(kb, normalize(question.text()));
  if (!match) return std::nullopt;

  const KnowledgeEntry* entry = kb.find(match->entry_id);
  std::string answer;
  std::string_view rest = entry->answer_template;
  while (true) {
    const size_t at = rest.find(kQuestionPlaceholder);
    if (at == std::string_view::npos) break;
    answer.append(rest.substr(0, at));
    answer.append(question.text());
    rest.remove_prefix(at + kQuestionPlaceholder.size());
  }
  answer.append(rest);
  // Non-empty: templates are non-empty and questions substitute non-empty.
  return protocol::AnswerText::create(std::move(answer));
}

protocol::AnswerText answer_for(const KnowledgeBase& kb,
                                const protocol::QuestionText& question) {
  if (auto answer = matched_answer(kb, question)) return std::move(*answer);
  return *protocol::AnswerText::create(kb.fallback_answer());
}

Result<KnowledgeBase, std::vector<LoadError>> load_knowledge_base(
    const json& document) {
  std::vector<LoadError> errors;
  if (!document.is_object()) {
    errors.push_back({LoadErrorKind::kSchemaError, "", "must be an object"});
    return Unexpected(std::move(errors));
  }

  auto fallback = required_string(document, "fallback_answer", "", errors);

  double threshold = kDefaultMatchThreshold;
  if (const auto it = document.find("match_threshold"); it != document.end()) {
    if (!it->is_number()) {
      errors.push_back(
          {LoadErrorKind::kSchemaError, "match_threshold", "must be a number"});
    } else {
      threshold = it->get<double>();
      if (!(threshold >= 0.0 && threshold <= 1.0)) {
        errors.push_back({LoadErrorKind::kSchemaError, "match_threshold",
                          "must be within [0, 1]"});
      }
    }
  }

  std::vector<KnowledgeEntry> entries;
  const auto list = document.find("entries");
  if (list == document.end()) {
    errors.push_back({LoadErrorKind::kSchemaError, "entries", "missing field"});
  } else if (!list->is_array()) {
    errors.push_back(
        {LoadErrorKind::kSchemaError, "entries", "must be an array"});
  } else {
    std::unordered_map<std::string, size_t> first_seen;
    for (size_t i = 0; i < list->size(); ++i) {
      auto entry = parse_entry((*list)[i], i, errors);
      if (!entry) continue;
      const auto [it, inserted] = first_seen.emplace(entry->id, i);
      if (!inserted) {
        errors.push_back({LoadErrorKind::kDuplicateId, entry_path(i) + ".id",
                          "duplicate id '" + entry->id + "' (first at " +
                              entry_path(it->second) + ")"});
        continue;
      }
      entries.push_back(std::move(*entry));
    }
  }

  if (!errors.empty()) return Unexpected(std::move(errors));
  return KnowledgeBase::create(std::move(entries), std::move(*fallback),
                               threshold);
}

Result<KnowledgeBase, std::vector<LoadError>> load_knowledge_base_file(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return Unexpected(std::vector<LoadError>{
        {LoadErrorKind::kSchemaError, "", "cannot open " + path.string()}});
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const json document =
      json::parse(buffer.str(), nullptr, /*allow_exceptions=*/false);
  if (document.is_discarded()) {
    return Unexpected(std::vector<LoadError>{
        {LoadErrorKind::kSchemaError, "", path.string() + " is not valid JSON"}});
  }
  return load_knowledge_base(document);
}

std::vector<CatalogItem> catalog(const KnowledgeBase& kb) {
  std::vector<std::string> order;
  for (const KnowledgeEntry& entry : kb.entries()) {
    if (std::find(order.begin(), order.end(), entry.category) == order.end()) {
      order.push_back(entry.category);
    }
  }
  std::vector<CatalogItem> items;
  for (const std::string& category : order) {
    for (const KnowledgeEntry& entry : kb.entries()) {
      if (entry.listed && entry.category == category) {
        items.push_back({entry.display_question, entry.category});
      }
    }
  }
  return items;
}

}  // namespace instant_assist::knowledge
