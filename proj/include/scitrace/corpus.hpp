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
#ifndef SCITRACE_CORPUS_HPP
#define SCITRACE_CORPUS_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "json.hpp"
#include "scitrace/common.hpp"
#include "scitrace/keyword.hpp"

namespace scitrace {

struct Paper {
  std::string id;
  std::string title;
  std::string abstract;
  std::vector<std::string> categories;  // primary first
  Date published_at;
  std::optional<Date> updated_at;
  std::vector<Keyword> title_keywords;
  std::vector<Keyword> abstract_keywords;
  std::optional<std::string> external_id;
  std::optional<std::string> venue;

  // updated_at when present, otherwise published_at.
  Date effective_updated_at() const { return updated_at.value_or(published_at); }
};

/// Subject groups and the category codes each contains.
class Taxonomy {
public:
  Taxonomy() = default;
  explicit Taxonomy(std::map<std::string, std::vector<std::string>> groups);

  /// The shipped arXiv taxonomy (8 groups, 156 categories).
  static const Taxonomy& builtin();
  static Taxonomy from_json(std::string_view text);
  static Taxonomy load(const std::filesystem::path& path);

  std::optional<std::string> group_of(std::string_view category) const;
  bool knows(std::string_view category) const { return group_of(category).has_value(); }

  const std::map<std::string, std::vector<std::string>>& groups() const { return groups_; }
  std::size_t group_count() const { return groups_.size(); }
  std::size_t category_count() const { return category_to_group_.size(); }

private:
  std::map<std::string, std::vector<std::string>> groups_;
  std::map<std::string, std::string, std::less<>> category_to_group_;
};

struct CitationEdge {
  std::string citing;
  std::string cited;
  std::optional<int> cited_year;
  std::set<std::string> cited_fields;

  friend auto operator<=>(const CitationEdge&, const CitationEdge&) = default;
};

struct Violation {
  std::string code;    // e.g. "unknown_category", "time_order"
  std::string detail;
};

using RecordResult = std::variant<Paper, std::vector<Violation>>;

/// Validates one parsed papers-file record against the Paper invariants.
/// Total: every input yields a Paper or a non-empty violation list.
RecordResult validate_record(const nlohmann::json& record, const Taxonomy& taxonomy);

/// Immutable, id-ordered collection of papers plus their outgoing citations.
class Corpus {
public:
  Corpus() = default;
  Corpus(std::vector<Paper> papers, std::vector<CitationEdge> citations, Taxonomy taxonomy);

  std::span<const Paper> papers() const { return papers_; }
  std::span<const CitationEdge> citations() const { return citations_; }
  const Taxonomy& taxonomy() const { return taxonomy_; }

  const Paper* find(std::string_view id) const;
  // Resolves a cited reference by corpus id or by a paper's external_id.
  const Paper* resolve(std::string_view reference) const;

private:
  std::vector<Paper> papers_;
  std::vector<CitationEdge> citations_;
  Taxonomy taxonomy_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::unordered_map<std::string, std::size_t> by_external_id_;
};

struct LineIssue {
  std::string file;
  std::size_t line = 0;  // 1-based
  std::vector<Violation> violations;
};

struct LoadedCorpus {
  Corpus corpus;
  std::vector<LineIssue> issues;
  std::size_t paper_lines = 0;
  std::size_t citation_lines = 0;
};

struct LoadOptions {
  double max_invalid_fraction = 0.10;
};

/// Loads the line-oriented papers and citations files. An empty
/// citations_path means "no citations". Throws Error(validation) for an
/// empty corpus or when more than max_invalid_fraction of either file's
/// lines are invalid; Error(io) when a file cannot be read.
LoadedCorpus load_corpus(const std::filesystem::path& papers_path,
                         const std::filesystem::path& citations_path,
                         const Taxonomy& taxonomy = Taxonomy::builtin(),
                         const LoadOptions& options = {});

nlohmann::ordered_json paper_to_json(const Paper& paper);
nlohmann::ordered_json citation_to_json(const CitationEdge& edge);
std::string serialize_papers(std::span<const Paper> papers);
std::string serialize_citations(std::span<const CitationEdge> citations);
void save_corpus(const Corpus& corpus, const std::filesystem::path& papers_path,
                 const std::filesystem::path& citations_path);

/// Group of the first-listed category. Throws Error(validation) for an
/// unknown category.
std::string primary_group(const Paper& paper, const Taxonomy& taxonomy);
/// Distinct groups over all of the paper's categories, sorted.
std::set<std::string> paper_groups(const Paper& paper, const Taxonomy& taxonomy);

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // population
};

MeanSd mean_sd(std::span<const double> values);

struct CorpusStats {
  std::size_t paper_count = 0;
  std::size_t citation_count = 0;
  Date earliest;
  Date latest;
  std::size_t group_count = 0;
  std::size_t category_count = 0;
  MeanSd categories_per_paper;
  MeanSd title_words;
  MeanSd abstract_words;
  MeanSd title_keywords;
  MeanSd abstract_keywords;
  std::map<std::string, std::size_t> primary_group_histogram;
};

CorpusStats corpus_stats(const Corpus& corpus);
nlohmann::ordered_json stats_to_json(const CorpusStats& stats);

}  // namespace scitrace

#endif  // SCITRACE_CORPUS_HPP
