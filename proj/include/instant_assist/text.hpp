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

#ifndef INSTANT_ASSIST_TEXT_HPP_
#define INSTANT_ASSIST_TEXT_HPP_

#include <string>
#include <string_view>

namespace instant_assist::text {

bool is_ascii_space(char c);

// Strips ASCII whitespace from both ends.
std::string_view trim(std::string_view s);

std::string ascii_lower(std::string_view s);

bool iequals(std::string_view a, std::string_view b);

// Strict UTF-8 check (no overlongs, surrogates, or code points past U+10FFFF).
bool is_valid_utf8(std::string_view s);

}  // namespace instant_assist::text

#endif  // INSTANT_ASSIST_TEXT_HPP_
