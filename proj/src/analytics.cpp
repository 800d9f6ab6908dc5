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

#include "scitrace/analytics.hpp"

#include <algorithm>
#include <cmath>

namespace scitrace {

// ---------------------------------------------------------------- diversity

ReferenceProfile subject_contributions(std::span<const Reference> references, std::string paper_id) {
  ReferenceProfile profile;
  profile.paper_id = std::move(paper_id);
  for (const auto& ref : references) {
    if (ref.fields.empty()) {
      ++profile.excluded_empty_fields;
      continue;
    }
    ++profile.reference_count;
    const double share = 1.0 / static_cast<double>(ref.fields.size());
    for (const auto& f : ref.fields) profile.contributions[f] += share;
  }
  return profile;
}

DiversityScores diversity_from_contributions(std::span<const double> c, double log_base) {
  double total = 0.0;
  std::size_t k = 0;
  for (double x : c) {
    if (x < 0.0) throw Error(ErrorKind::invalid_argument, "negative subject contribution");
    if (x > 0.0) {
      total += x;
      ++k;
    }
  }
  if (k == 0) throw Error(ErrorKind::validation, "diversity is undefined without references");
  DiversityScores s;
  const double ln_base = std::log(log_base);
  double sum_sq = 0.0, entropy = 0.0, abs_diff = 0.0;
  for (double x : c) {
    if (x <= 0.0) continue;
    const double p = x / total;
    sum_sq += p * p;
    entropy -= p * std::log(p);
    for (double y : c)
      if (y > 0.0) abs_diff += std::abs(x - y);
  }
  s.simpson = 1.0 - sum_sq;
  s.shannon = entropy / ln_base;
  s.gini = abs_diff / (2.0 * static_cast<double>(k) * total);
  return s;
}

DiversityScores diversity_scores(const ReferenceProfile& profile, double log_base) {
  std::vector<double> c;
  c.reserve(profile.contributions.size());
  for (const auto& [subject, value] : profile.contributions) c.push_back(value);
  return diversity_from_contributions(c, log_base);
}

std::map<std::string, std::vector<Reference>> references_by_paper(const Corpus& corpus) {
  std::map<std::string, std::vector<Reference>> out;
  for (const auto& e : corpus.citations()) out[e.citing].push_back({e.cited, e.cited_year, e.cited_fields});
  return out;
}

DiversityLevel parse_diversity_level(std::string_view name) {
  if (name == "paper") return DiversityLevel::paper;
  if (name == "group") return DiversityLevel::group;
  if (name == "topic") return DiversityLevel::topic;
  throw Error(ErrorKind::invalid_argument, "unknown diversity level '" + std::string(name) + "'");
}

TopicAggregation parse_topic_aggregation(std::string_view name) {
  if (name == "pooled") return TopicAggregation::pooled;
  if (name == "mean") return TopicAggregation::mean;
  throw Error(ErrorKind::invalid_argument, "unknown topic aggregation '" + std::string(name) + "'");
}

namespace {

std::optional<DiversityRow> aggregate_row(const std::string& key, const std::vector<const std::vector<Reference>*>& members,
                                          const DiversityOptions& options) {
  DiversityRow row;
  row.key = key;
  if (options.aggregation == TopicAggregation::pooled) {
    std::vector<Reference> pooled;
    for (const auto* refs : members) pooled.insert(pooled.end(), refs->begin(), refs->end());
    auto profile = subject_contributions(pooled, key);
    if (profile.subject_count() == 0) return std::nullopt;
    row.papers = members.size();
    row.references = profile.reference_count;
    row.subjects = profile.subject_count();
    row.scores = diversity_scores(profile, options.log_base);
    return row;
  }
  std::set<std::string> subjects;
  for (const auto* refs : members) {
    auto profile = subject_contributions(*refs);
    if (profile.subject_count() == 0) continue;
    auto s = diversity_scores(profile, options.log_base);
    row.scores.simpson += s.simpson;
    row.scores.shannon += s.shannon;
    row.scores.gini += s.gini;
    row.references += profile.reference_count;
    for (const auto& [subject, c] : profile.contributions) subjects.insert(subject);
    ++row.papers;
  }
  if (row.papers == 0) return std::nullopt;
  const auto n = static_cast<double>(row.papers);
  row.scores.simpson /= n;
  row.scores.shannon /= n;
  row.scores.gini /= n;
  row.subjects = subjects.size();
  return row;
}

}  // namespace

std::vector<DiversityRow> diversity_table(const Corpus& corpus, DiversityLevel level, const DiversityOptions& options) {
  const auto refs = references_by_paper(corpus);
  std::vector<DiversityRow> rows;
  if (level == DiversityLevel::paper) {
    for (const auto& [paper, list] : refs) {
      auto profile = subject_contributions(list, paper);
      if (profile.subject_count() == 0) continue;
      rows.push_back({paper, 1, profile.reference_count, profile.subject_count(),
                      diversity_scores(profile, options.log_base)});
    }
    return rows;
  }
  std::map<std::string, std::vector<const std::vector<Reference>*>> members;
  for (const auto& [paper_id, list] : refs) {
    const Paper* p = corpus.find(paper_id);
    if (level == DiversityLevel::group) {
      members[primary_group(*p, corpus.taxonomy())].push_back(&list);
    } else {
      auto kws = paper_keywords(*p, options.source);
      for (const auto& topic : options.topics)
        if (std::any_of(kws.begin(), kws.end(), [&](const Keyword& k) { return k.surface == topic; }))
          members[topic].push_back(&list);
    }
  }
  for (const auto& [key, list] : members)
    if (auto row = aggregate_row(key, list, options)) rows.push_back(std::move(*row));
  return rows;
}

std::string diversity_to_csv(std::string_view level, std::span<const DiversityRow> rows) {
  std::string out = std::string(level) + ",papers,references,subjects,simpson,shannon,gini\n";
  for (const auto& r : rows)
    out += csv_field(r.key) + "," + std::to_string(r.papers) + "," + std::to_string(r.references) + "," +
           std::to_string(r.subjects) + "," + format_real(r.scores.simpson, 12) + "," +
           format_real(r.scores.shannon, 12) + "," + format_real(r.scores.gini, 12) + "\n";
  return out;
}

// ---------------------------------------------------------------- age of citation

Date reference_date(int year) { return Date{year, 7, 1}; }

std::optional<double> age_of_citation(const Date& citing, const std::optional<Date>& cited, AocCounters& counters) {
  if (!cited) {
    ++counters.missing_year;
    return std::nullopt;
  }
  const double years = years_between(citing, *cited);
  if (years < 0.0) {
    ++counters.negative_aoc;
    return std::nullopt;
  }
  return years;
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error(ErrorKind::invalid_argument, "quantile of an empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

AocGroupSummary summarize_ages(std::string group, std::vector<double> ages, const AocBinning& binning) {
  if (binning.width <= 0.0) throw Error(ErrorKind::invalid_argument, "AoC bin width must be positive");
  AocGroupSummary s;
  s.group = std::move(group);
  std::sort(ages.begin(), ages.end());
  s.ages = std::move(ages);
  if (s.ages.empty()) return s;
  s.median = quantile_sorted(s.ages, 0.5);
  s.q1 = quantile_sorted(s.ages, 0.25);
  s.q3 = quantile_sorted(s.ages, 0.75);
  const auto bins = static_cast<std::size_t>(std::floor(s.ages.back() / binning.width)) + 1;
  s.histogram.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    s.histogram[k].start = static_cast<double>(k) * binning.width;
    s.histogram[k].end = static_cast<double>(k + 1) * binning.width;
  }
  for (double a : s.ages) {
    auto k = static_cast<std::size_t>(std::floor(a / binning.width));
    ++s.histogram[std::min(k, bins - 1)].count;
  }
  return s;
}

AocGrouping parse_aoc_grouping(std::string_view name) {
  if (name == "subject_group" || name == "group") return AocGrouping::subject_group;
  if (name == "topic_keyword" || name == "topic") return AocGrouping::topic_keyword;
  throw Error(ErrorKind::invalid_argument, "unknown AoC grouping '" + std::string(name) + "'");
}

AocReport aoc_distribution(const Corpus& corpus, AocGrouping grouping, const AocBinning& binning,
                           std::span<const std::string> topics, KeywordSource source) {
  AocReport report;
  std::map<std::string, std::vector<double>> ages;
  if (grouping == AocGrouping::topic_keyword)
    for (const auto& t : topics) ages[t];
  for (const auto& e : corpus.citations()) {
    const Paper* citing = corpus.find(e.citing);
    std::optional<Date> cited_date;
    if (const Paper* cited = corpus.resolve(e.cited))
      cited_date = cited->published_at;
    else if (e.cited_year)
      cited_date = reference_date(*e.cited_year);
    auto aoc = age_of_citation(citing->published_at, cited_date, report.counters);
    if (!aoc) continue;
    if (grouping == AocGrouping::subject_group) {
      ages[primary_group(*citing, corpus.taxonomy())].push_back(*aoc);
    } else {
      auto kws = paper_keywords(*citing, source);
      for (const auto& t : topics)
        if (std::any_of(kws.begin(), kws.end(), [&](const Keyword& k) { return k.surface == t; }))
          ages[t].push_back(*aoc);
    }
  }
  for (auto& [group, list] : ages) {
    if (list.empty()) {
      report.omitted.push_back(group);
      continue;
    }
    report.groups.push_back(summarize_ages(group, std::move(list), binning));
  }
  return report;
}

std::string aoc_histogram_csv(const AocReport& report) {
  std::string out = "group,bin_start,bin_end,count\n";
  for (const auto& g : report.groups)
    for (const auto& b : g.histogram)
      out += csv_field(g.group) + "," + format_real(b.start) + "," + format_real(b.end) + "," +
             std::to_string(b.count) + "\n";
  return out;
}

std::string aoc_summary_csv(const AocReport& report) {
  std::string out = "group,count,median,q1,q3,iqr\n";
  for (const auto& g : report.groups)
    out += csv_field(g.group) + "," + std::to_string(g.ages.size()) + "," + format_real(g.median) + "," +
           format_real(g.q1) + "," + format_real(g.q3) + "," + format_real(g.iqr()) + "\n";
  return out;
}

// ---------------------------------------------------------------- homophily

HomophilyMode parse_homophily_mode(std::string_view name) {
  if (name == "primary_group" || name == "primary") return HomophilyMode::primary_group;
  if (name == "any_shared_group" || name == "any") return HomophilyMode::any_shared_group;
  throw Error(ErrorKind::invalid_argument, "unknown homophily mode '" + std::string(name) + "'");
}

HomophilyReport homophily_ratio(const Corpus& corpus, HomophilyMode mode) {
  HomophilyReport r;
  const auto& tax = corpus.taxonomy();
  for (const auto& e : corpus.citations()) {
    const Paper* cited = corpus.resolve(e.cited);
    if (!cited) continue;
    const Paper* citing = corpus.find(e.citing);
    if (cited == citing) continue;
    const auto gc = primary_group(*citing, tax);
    const auto gd = primary_group(*cited, tax);
    ++r.matrix[gc][gd];
    ++r.total;
    bool match = false;
    if (mode == HomophilyMode::primary_group) {
      match = gc == gd;
    } else {
      const auto a = paper_groups(*citing, tax);
      const auto b = paper_groups(*cited, tax);
      match = std::any_of(a.begin(), a.end(), [&](const std::string& g) { return b.count(g) > 0; });
    }
    if (match) ++r.matched;
  }
  if (r.total == 0) throw Error(ErrorKind::validation, "no citations resolve inside the corpus");
  r.ratio = static_cast<double>(r.matched) / static_cast<double>(r.total);
  return r;
}

std::string homophily_matrix_csv(const HomophilyReport& report, const Taxonomy& taxonomy) {
  std::vector<std::string> groups;
  for (const auto& [g, cats] : taxonomy.groups()) groups.push_back(g);
  std::string out = "citing_group";
  for (const auto& g : groups) out += "," + csv_field(g);
  out += "\n";
  for (const auto& row : groups) {
    out += csv_field(row);
    auto it = report.matrix.find(row);
    for (const auto& col : groups) {
      std::size_t n = 0;
      if (it != report.matrix.end())
        if (auto jt = it->second.find(col); jt != it->second.end()) n = jt->second;
      out += "," + std::to_string(n);
    }
    out += "\n";
  }
  return out;
}

}  // namespace scitrace
