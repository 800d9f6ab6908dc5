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

#ifndef SCITRACE_ANALYTICS_HPP
#define SCITRACE_ANALYTICS_HPP

#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "scitrace/corpus.hpp"
#include "scitrace/keywords.hpp"

namespace scitrace {

// ---------------------------------------------------------------- topical diversity

struct Reference {
  std::string id;
  std::optional<int> year;
  std::set<std::string> fields;
};

/// Subject contributions of one paper's reference list: each reference
/// spreads a unit weight evenly over its fields, so the contributions sum to
/// the number of valid references.
struct ReferenceProfile {
  std::string paper_id;
  std::size_t reference_count = 0;      // references with at least one field
  std::size_t excluded_empty_fields = 0;
  std::map<std::string, double> contributions;  // subject -> C(i, s), only C > 0
  std::size_t subject_count() const { return contributions.size(); }
};

ReferenceProfile subject_contributions(std::span<const Reference> references, std::string paper_id = {});

struct DiversityScores {
  double simpson = 0.0;
  double shannon = 0.0;
  double gini = 0.0;
};

/// Simpson and Shannon use proportions p_s = C_s / sum(C); Gini is the mean
/// absolute difference of the raw contributions over 2 k sum(C). Throws
/// Error(validation) for an empty profile.
DiversityScores diversity_scores(const ReferenceProfile& profile, double log_base = std::numbers::e);
DiversityScores diversity_from_contributions(std::span<const double> contributions,
                                             double log_base = std::numbers::e);

/// References of every citing paper, keyed by paper id.
std::map<std::string, std::vector<Reference>> references_by_paper(const Corpus& corpus);

enum class DiversityLevel { paper, group, topic };
enum class TopicAggregation { pooled, mean };

DiversityLevel parse_diversity_level(std::string_view name);
TopicAggregation parse_topic_aggregation(std::string_view name);

struct DiversityRow {
  std::string key;  // paper id, group code, or topic keyword
  std::size_t papers = 0;
  std::size_t references = 0;
  std::size_t subjects = 0;
  DiversityScores scores;
};

struct DiversityOptions {
  TopicAggregation aggregation = TopicAggregation::pooled;
  KeywordSource source = KeywordSource::title;
  std::vector<std::string> topics;  // for DiversityLevel::topic
  double log_base = std::numbers::e;
};

/// Rows with no usable references are omitted.
std::vector<DiversityRow> diversity_table(const Corpus& corpus, DiversityLevel level,
                                          const DiversityOptions& options = {});
std::string diversity_to_csv(std::string_view level, std::span<const DiversityRow> rows);

// ---------------------------------------------------------------- age of citation

struct AocCounters {
  std::size_t negative_aoc = 0;
  std::size_t missing_year = 0;
};

/// A cited work known only by year is placed at July 1 of that year.
Date reference_date(int year);

/// Years from cited to citing; nullopt (with the matching counter bumped) for
/// a missing cited date or a negative gap.
std::optional<double> age_of_citation(const Date& citing, const std::optional<Date>& cited, AocCounters& counters);

struct HistogramBin {
  double start = 0.0;
  double end = 0.0;
  std::size_t count = 0;
};

struct AocBinning {
  double width = 1.0;  // bins [k w, (k+1) w) from 0
};

struct AocGroupSummary {
  std::string group;
  std::vector<double> ages;  // sorted
  std::vector<HistogramBin> histogram;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr() const { return q3 - q1; }
};

enum class AocGrouping { subject_group, topic_keyword };
AocGrouping parse_aoc_grouping(std::string_view name);

struct AocReport {
  std::vector<AocGroupSummary> groups;
  AocCounters counters;
  std::vector<std::string> omitted;  // groups with no valid AoC
};

/// Linear-interpolation quantile of an ascending sample.
double quantile_sorted(std::span<const double> sorted, double q);
AocGroupSummary summarize_ages(std::string group, std::vector<double> ages, const AocBinning& binning);

/// Groups by the citing paper's primary group, or by topic keywords listed in
/// `topics` (a paper joins every topic it mentions).
AocReport aoc_distribution(const Corpus& corpus, AocGrouping grouping, const AocBinning& binning = {},
                           std::span<const std::string> topics = {}, KeywordSource source = KeywordSource::title);

/// "group,bin_start,bin_end,count"
std::string aoc_histogram_csv(const AocReport& report);
/// "group,count,median,q1,q3,iqr"
std::string aoc_summary_csv(const AocReport& report);

// ---------------------------------------------------------------- homophily

enum class HomophilyMode { primary_group, any_shared_group };
HomophilyMode parse_homophily_mode(std::string_view name);

struct HomophilyReport {
  std::size_t matched = 0;
  std::size_t total = 0;  // citations with both endpoints in the corpus
  double ratio = 0.0;
  // primary group of the citing paper -> primary group of the cited paper -> count
  std::map<std::string, std::map<std::string, std::size_t>> matrix;
};

/// Throws Error(validation) when no citation resolves inside the corpus.
HomophilyReport homophily_ratio(const Corpus& corpus, HomophilyMode mode);
/// Wide matrix: header "citing_group,<cited groups...>".
std::string homophily_matrix_csv(const HomophilyReport& report, const Taxonomy& taxonomy);

}  // namespace scitrace

#endif  // SCITRACE_ANALYTICS_HPP
