/*
 * Copyright (c) 2026 The scitrace Authors. All Rights Reserved
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef SCITRACE_KEYWORD_HPP
#define SCITRACE_KEYWORD_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scitrace {

/// A normalized keyword phrase: lowercase, single-spaced, no surrounding
/// punctuation, 1 to 6 tokens.
struct Keyword {
  std::string surface;
  std::vector<std::string> tokens;

  friend bool operator==(const Keyword&, const Keyword&) = default;
};

inline constexpr std::size_t kMaxKeywordTokens = 6;

/// Throws Error(validation) when nothing survives normalization or the
/// phrase exceeds kMaxKeywordTokens tokens.
Keyword normalize_keyword(std::string_view raw);
std::optional<Keyword> try_normalize_keyword(std::string_view raw);

}  // namespace scitrace

#endif  // SCITRACE_KEYWORD_HPP
