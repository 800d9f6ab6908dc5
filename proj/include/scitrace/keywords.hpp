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
#ifndef SCITRACE_KEYWORDS_HPP
#define SCITRACE_KEYWORDS_HPP

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "scitrace/corpus.hpp"
#include "scitrace/keyword.hpp"

namespace scitrace {

enum class KeywordSource { title, abstract, both };

KeywordSource parse_keyword_source(std::string_view name);
std::string_view to_string(KeywordSource source);

/// Keywords of one paper for the given source; with "both", title keywords
/// come first and duplicates are dropped.
std::vector<Keyword> paper_keywords(const Paper& paper, KeywordSource source);

class StopwordList {
public:
  StopwordList() = default;
  explicit StopwordList(std::vector<std::string> words);

  /// The versioned list shipped in assets/stopwords.txt.
  static const StopwordList& builtin();
  /// One word per line; '#' starts a comment line.
  static StopwordList parse(std::string_view text);

  bool contains(std::string_view word) const { return words_.count(std::string(word)) > 0; }
  std::size_t size() const { return words_.size(); }

private:
  std::unordered_set<std::string> words_;
};

struct ExtractionInput {
  std::string title;
  std::string abstract;
};

struct ExtractedKeywords {
  std::vector<Keyword> title_keywords;
  std::vector<Keyword> abstract_keywords;
};

class KeywordExtractor {
public:
  virtual ~KeywordExtractor() = default;
  virtual std::vector<ExtractedKeywords> extract(std::span<const ExtractionInput> inputs) = 0;
};

struct FallbackLimits {
  std::size_t title = 4;
  std::size_t abstract = 15;
};

/// Stopword-delimited chunking: candidates are maximal runs of non-stopword
/// tokens between punctuation, split into pieces of at most six tokens, then
/// ranked by in-document frequency and first position.
std::vector<Keyword> chunk_keywords(std::string_view text, const StopwordList& stopwords,
                                    std::size_t limit);

/// Throws Error(validation) on an empty title.
ExtractedKeywords extract_keywords_fallback(std::string_view title, std::string_view abstract,
                                            const StopwordList& stopwords = StopwordList::builtin(),
                                            const FallbackLimits& limits = {});

class FallbackExtractor final : public KeywordExtractor {
public:
  explicit FallbackExtractor(const StopwordList& stopwords = StopwordList::builtin(),
                             FallbackLimits limits = {})
      : stopwords_(stopwords), limits_(limits) {}
  std::vector<ExtractedKeywords> extract(std::span<const ExtractionInput> inputs) override;

private:
  const StopwordList& stopwords_;
  FallbackLimits limits_;
};

/// Runs a user command through /bin/sh. The child reads one JSON object
/// {"title","abstract"} per line on stdin and answers with one
/// {"title_keywords","abstract_keywords"} object per line on stdout.
class CommandExtractor final : public KeywordExtractor {
public:
  explicit CommandExtractor(std::string command) : command_(std::move(command)) {}
  std::vector<ExtractedKeywords> extract(std::span<const ExtractionInput> inputs) override;

private:
  std::string command_;
};

/// Per-snapshot keyword frequencies (number of papers mentioning each
/// keyword), filtered by min_count and ordered by descending frequency then
/// lexicographically.
class Vocabulary {
public:
  struct Entry {
    std::string keyword;
    std::size_t frequency;
  };

  Vocabulary() = default;
  Vocabulary(std::vector<Entry> entries, std::size_t min_count);

  std::span<const Entry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t min_count() const { return min_count_; }
  bool contains(std::string_view keyword) const;
  // Position in entries(), or -1.
  std::ptrdiff_t index_of(std::string_view keyword) const;

private:
  std::vector<Entry> entries_;
  std::size_t min_count_ = 1;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Counts each keyword once per paper.
std::map<std::string, std::size_t> keyword_counts(std::span<const Paper* const> papers,
                                                  KeywordSource source);

Vocabulary build_vocabulary(std::span<const Paper* const> papers, KeywordSource source,
                            std::size_t min_count = 3);

}  // namespace scitrace

#endif  // SCITRACE_KEYWORDS_HPP
