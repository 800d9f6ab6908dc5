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

#include "scitrace/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "scitrace_assets.hpp"

namespace scitrace {

using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------- Taxonomy

Taxonomy::Taxonomy(std::map<std::string, std::vector<std::string>> groups)
    : groups_(std::move(groups)) {
  for (const auto& [group, categories] : groups_) {
    for (const auto& category : categories) {
      auto [it, inserted] = category_to_group_.emplace(category, group);
      if (!inserted)
        throw Error(ErrorKind::validation, "category '" + category + "' listed under both '" +
                                               it->second + "' and '" + group + "'");
    }
  }
}

const Taxonomy& Taxonomy::builtin() {
  static const Taxonomy taxonomy = from_json(assets::kTaxonomyJson);
  return taxonomy;
}

Taxonomy Taxonomy::from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::validation, std::string("taxonomy is not valid JSON: ") + e.what());
  }
  // Accept either {"groups": {...}} or a bare group map.
  const json& groups = doc.contains("groups") ? doc["groups"] : doc;
  if (!groups.is_object()) throw Error(ErrorKind::validation, "taxonomy must map group -> [categories]");
  std::map<std::string, std::vector<std::string>> out;
  for (auto it = groups.begin(); it != groups.end(); ++it) {
    if (!it.value().is_array())
      throw Error(ErrorKind::validation, "taxonomy group '" + it.key() + "' is not an array");
    auto& list = out[it.key()];
    for (const auto& c : it.value()) {
      if (!c.is_string()) throw Error(ErrorKind::validation, "taxonomy category is not a string");
      list.push_back(c.get<std::string>());
    }
  }
  return Taxonomy(std::move(out));
}

Taxonomy Taxonomy::load(const std::filesystem::path& path) { return from_json(read_text_file(path)); }

std::optional<std::string> Taxonomy::group_of(std::string_view category) const {
  auto it = category_to_group_.find(category);
  if (it == category_to_group_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------- validation

namespace {

void add(std::vector<Violation>& v, std::string code, std::string detail = {}) {
  v.push_back({std::move(code), std::move(detail)});
}

std::optional<std::string> optional_string(const json& record, const char* key,
                                           std::vector<Violation>& violations) {
  auto it = record.find(key);
  if (it == record.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    add(violations, "bad_field", std::string(key) + " is not a string");
    return std::nullopt;
  }
  return it->get<std::string>();
}

std::vector<Keyword> keyword_list(const json& record, const char* key,
                                  std::vector<Violation>& violations) {
  std::vector<Keyword> out;
  auto it = record.find(key);
  if (it == record.end() || it->is_null()) return out;
  if (!it->is_array()) {
    add(violations, "bad_keyword", std::string(key) + " is not an array");
    return out;
  }
  for (const auto& raw : *it) {
    if (!raw.is_string()) {
      add(violations, "bad_keyword", std::string(key) + " entry is not a string");
      continue;
    }
    auto kw = try_normalize_keyword(raw.get<std::string>());
    if (!kw) {
      add(violations, "bad_keyword", std::string(key) + ": '" + raw.get<std::string>() + "'");
      continue;
    }
    if (std::find(out.begin(), out.end(), *kw) == out.end()) out.push_back(std::move(*kw));
  }
  return out;
}

}  // namespace

RecordResult validate_record(const json& record, const Taxonomy& taxonomy) {
  std::vector<Violation> v;
  if (!record.is_object()) {
    add(v, "not_object");
    return v;
  }
  Paper p;

  auto id = record.find("id");
  if (id == record.end() || !id->is_string() || trim(id->get<std::string>()).empty())
    add(v, "missing_id");
  else
    p.id = trim(id->get<std::string>());

  auto title = record.find("title");
  if (title == record.end() || !title->is_string() || trim(title->get<std::string>()).empty())
    add(v, "missing_title");
  else
    p.title = title->get<std::string>();

  auto abstract = record.find("abstract");
  if (abstract == record.end() || !abstract->is_string())
    add(v, "missing_abstract");
  else
    p.abstract = abstract->get<std::string>();

  auto cats = record.find("categories");
  if (cats == record.end() || !cats->is_array()) {
    add(v, "missing_categories");
  } else if (cats->empty()) {
    add(v, "empty_categories");
  } else {
    for (const auto& c : *cats) {
      if (!c.is_string()) {
        add(v, "bad_category", "category is not a string");
        continue;
      }
      auto code = trim(c.get<std::string>());
      if (!taxonomy.knows(code)) add(v, "unknown_category", code);
      p.categories.push_back(std::move(code));
    }
  }

  auto published = record.find("published_at");
  bool have_published = false;
  if (published == record.end() || !published->is_string()) {
    add(v, "missing_published_at");
  } else if (auto d = Date::try_parse(published->get<std::string>())) {
    p.published_at = *d;
    have_published = true;
  } else {
    add(v, "bad_date", "published_at");
  }

  auto updated = record.find("updated_at");
  if (updated != record.end() && !updated->is_null()) {
    std::optional<Date> d;
    if (updated->is_string()) d = Date::try_parse(updated->get<std::string>());
    if (!d)
      add(v, "bad_date", "updated_at");
    else {
      p.updated_at = d;
      if (have_published && *d < p.published_at) add(v, "time_order");
    }
  }

  p.external_id = optional_string(record, "external_id", v);
  p.venue = optional_string(record, "venue", v);
  p.title_keywords = keyword_list(record, "title_keywords", v);
  p.abstract_keywords = keyword_list(record, "abstract_keywords", v);

  if (!v.empty()) return v;
  return p;
}

// ---------------------------------------------------------------- Corpus

Corpus::Corpus(std::vector<Paper> papers, std::vector<CitationEdge> citations, Taxonomy taxonomy)
    : papers_(std::move(papers)), citations_(std::move(citations)), taxonomy_(std::move(taxonomy)) {
  std::sort(papers_.begin(), papers_.end(),
            [](const Paper& a, const Paper& b) { return a.id < b.id; });
  std::sort(citations_.begin(), citations_.end());
  for (std::size_t i = 0; i < papers_.size(); ++i) {
    if (!by_id_.emplace(papers_[i].id, i).second)
      throw Error(ErrorKind::validation, "duplicate paper id: " + papers_[i].id);
    if (papers_[i].external_id) by_external_id_.emplace(*papers_[i].external_id, i);
  }
  for (const auto& e : citations_)
    if (!by_id_.count(e.citing))
      throw Error(ErrorKind::validation, "citation from unknown paper: " + e.citing);
}

const Paper* Corpus::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &papers_[it->second];
}

const Paper* Corpus::resolve(std::string_view reference) const {
  if (const Paper* p = find(reference)) return p;
  auto it = by_external_id_.find(std::string(reference));
  return it == by_external_id_.end() ? nullptr : &papers_[it->second];
}

// ---------------------------------------------------------------- loading

namespace {

struct LineRecord {
  std::size_t line;
  std::string text;
};

std::vector<LineRecord> read_nonblank_lines(const std::filesystem::path& path) {
  std::string content = read_text_file(path);
  std::vector<LineRecord> out;
  std::size_t line = 0, start = 0;
  while (start <= content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    ++line;
    std::string_view text(content.data() + start, end - start);
    if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
    if (!trim(text).empty()) out.push_back({line, std::string(text)});
    if (end == content.size()) break;
    start = end + 1;
  }
  return out;
}

void check_invalid_fraction(const std::string& file, std::size_t total, std::size_t invalid,
                            const std::vector<LineIssue>& issues, double max_fraction) {
  if (total == 0 || static_cast<double>(invalid) <= max_fraction * static_cast<double>(total)) return;
  std::ostringstream msg;
  msg << invalid << " of " << total << " lines invalid in " << file;
  for (const auto& issue : issues) {
    if (issue.file == file && !issue.violations.empty()) {
      msg << " (first: line " << issue.line << ": " << issue.violations.front().code << ")";
      break;
    }
  }
  throw Error(ErrorKind::validation, msg.str());
}

std::variant<CitationEdge, std::vector<Violation>> parse_citation(const json& record) {
  std::vector<Violation> v;
  if (!record.is_object()) {
    add(v, "not_object");
    return v;
  }
  CitationEdge e;
  auto citing = record.find("citing");
  if (citing == record.end() || !citing->is_string() || trim(citing->get<std::string>()).empty())
    add(v, "missing_citing");
  else
    e.citing = trim(citing->get<std::string>());
  auto cited = record.find("cited");
  if (cited == record.end() || !cited->is_string() || trim(cited->get<std::string>()).empty())
    add(v, "missing_cited");
  else
    e.cited = trim(cited->get<std::string>());
  auto year = record.find("cited_year");
  if (year != record.end() && !year->is_null()) {
    if (year->is_number_integer())
      e.cited_year = year->get<int>();
    else
      add(v, "bad_year");
  }
  auto fields = record.find("cited_fields");
  if (fields != record.end() && !fields->is_null()) {
    if (!fields->is_array()) {
      add(v, "bad_fields");
    } else {
      for (const auto& f : *fields) {
        if (!f.is_string() || trim(f.get<std::string>()).empty())
          add(v, "bad_fields");
        else
          e.cited_fields.insert(trim(f.get<std::string>()));
      }
    }
  }
  if (v.empty() && e.citing == e.cited) add(v, "self_citation");
  if (!v.empty()) return v;
  return e;
}

}  // namespace

LoadedCorpus load_corpus(const std::filesystem::path& papers_path,
                         const std::filesystem::path& citations_path, const Taxonomy& taxonomy,
                         const LoadOptions& options) {
  LoadedCorpus out;
  const std::string papers_name = papers_path.filename().string();
  auto lines = read_nonblank_lines(papers_path);
  out.paper_lines = lines.size();
  if (lines.empty()) throw Error(ErrorKind::validation, "empty corpus");

  std::vector<Paper> papers;
  std::set<std::string> seen;
  std::size_t invalid = 0;
  for (const auto& [line, text] : lines) {
    std::vector<Violation> violations;
    json record = json::parse(text, nullptr, false);
    if (record.is_discarded()) {
      add(violations, "parse_error");
    } else {
      auto result = validate_record(record, taxonomy);
      if (auto* p = std::get_if<Paper>(&result)) {
        if (!seen.insert(p->id).second)
          add(violations, "duplicate_id", p->id);
        else
          papers.push_back(std::move(*p));
      } else {
        violations = std::get<std::vector<Violation>>(std::move(result));
      }
    }
    if (!violations.empty()) {
      ++invalid;
      out.issues.push_back({papers_name, line, std::move(violations)});
    }
  }
  check_invalid_fraction(papers_name, lines.size(), invalid, out.issues, options.max_invalid_fraction);
  if (papers.empty()) throw Error(ErrorKind::validation, "empty corpus");

  std::vector<CitationEdge> citations;
  if (!citations_path.empty()) {
    const std::string cit_name = citations_path.filename().string();
    auto cit_lines = read_nonblank_lines(citations_path);
    out.citation_lines = cit_lines.size();
    std::set<std::pair<std::string, std::string>> pairs;
    std::size_t cit_invalid = 0;
    for (const auto& [line, text] : cit_lines) {
      std::vector<Violation> violations;
      json record = json::parse(text, nullptr, false);
      if (record.is_discarded()) {
        add(violations, "parse_error");
      } else {
        auto result = parse_citation(record);
        if (auto* e = std::get_if<CitationEdge>(&result)) {
          if (!seen.count(e->citing))
            add(violations, "unknown_citing", e->citing);
          else if (!pairs.emplace(e->citing, e->cited).second)
            add(violations, "duplicate_citation", e->citing + " -> " + e->cited);
          else
            citations.push_back(std::move(*e));
        } else {
          violations = std::get<std::vector<Violation>>(std::move(result));
        }
      }
      if (!violations.empty()) {
        ++cit_invalid;
        out.issues.push_back({cit_name, line, std::move(violations)});
      }
    }
    check_invalid_fraction(cit_name, cit_lines.size(), cit_invalid, out.issues,
                           options.max_invalid_fraction);
  }

  out.corpus = Corpus(std::move(papers), std::move(citations), taxonomy);
  return out;
}

// ---------------------------------------------------------------- persistence

ordered_json paper_to_json(const Paper& p) {
  ordered_json j;
  j["id"] = p.id;
  j["title"] = p.title;
  j["abstract"] = p.abstract;
  j["categories"] = p.categories;
  j["published_at"] = p.published_at.iso();
  if (p.updated_at) j["updated_at"] = p.updated_at->iso();
  if (p.external_id) j["external_id"] = *p.external_id;
  if (p.venue) j["venue"] = *p.venue;
  auto surfaces = [](const std::vector<Keyword>& kws) {
    ordered_json arr = ordered_json::array();
    for (const auto& k : kws) arr.push_back(k.surface);
    return arr;
  };
  j["title_keywords"] = surfaces(p.title_keywords);
  j["abstract_keywords"] = surfaces(p.abstract_keywords);
  return j;
}

ordered_json citation_to_json(const CitationEdge& e) {
  ordered_json j;
  j["citing"] = e.citing;
  j["cited"] = e.cited;
  j["cited_year"] = e.cited_year ? ordered_json(*e.cited_year) : ordered_json(nullptr);
  j["cited_fields"] = ordered_json::array();
  for (const auto& f : e.cited_fields) j["cited_fields"].push_back(f);
  return j;
}

std::string serialize_papers(std::span<const Paper> papers) {
  std::string out;
  for (const auto& p : papers) {
    out += paper_to_json(p).dump();
    out += '\n';
  }
  return out;
}

std::string serialize_citations(std::span<const CitationEdge> citations) {
  std::string out;
  for (const auto& e : citations) {
    out += citation_to_json(e).dump();
    out += '\n';
  }
  return out;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& papers_path,
                 const std::filesystem::path& citations_path) {
  write_file_atomic(papers_path, serialize_papers(corpus.papers()));
  if (!citations_path.empty()) write_file_atomic(citations_path, serialize_citations(corpus.citations()));
}

// ---------------------------------------------------------------- groups & stats

std::string primary_group(const Paper& paper, const Taxonomy& taxonomy) {
  if (paper.categories.empty()) throw Error(ErrorKind::validation, "paper " + paper.id + " has no categories");
  auto g = taxonomy.group_of(paper.categories.front());
  if (!g) throw Error(ErrorKind::validation, "unknown category: " + paper.categories.front());
  return *g;
}

std::set<std::string> paper_groups(const Paper& paper, const Taxonomy& taxonomy) {
  std::set<std::string> out;
  for (const auto& c : paper.categories) {
    auto g = taxonomy.group_of(c);
    if (!g) throw Error(ErrorKind::validation, "unknown category: " + c);
    out.insert(*g);
  }
  return out;
}

MeanSd mean_sd(std::span<const double> values) {
  MeanSd r;
  if (values.empty()) return r;
  double sum = 0.0;
  for (double x : values) sum += x;
  r.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double x : values) ss += (x - r.mean) * (x - r.mean);
  r.sd = std::sqrt(ss / static_cast<double>(values.size()));
  return r;
}

namespace {
std::size_t word_count(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::size_t n = 0;
  for (std::string w; in >> w;) ++n;
  return n;
}
}  // namespace

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats s;
  auto papers = corpus.papers();
  s.paper_count = papers.size();
  s.citation_count = corpus.citations().size();
  if (papers.empty()) return s;
  std::vector<double> cats, tw, aw, tk, ak;
  std::set<std::string> groups, categories;
  s.earliest = s.latest = papers.front().published_at;
  for (const auto& p : papers) {
    s.earliest = std::min(s.earliest, p.published_at);
    s.latest = std::max(s.latest, p.published_at);
    cats.push_back(static_cast<double>(p.categories.size()));
    tw.push_back(static_cast<double>(word_count(p.title)));
    aw.push_back(static_cast<double>(word_count(p.abstract)));
    tk.push_back(static_cast<double>(p.title_keywords.size()));
    ak.push_back(static_cast<double>(p.abstract_keywords.size()));
    for (const auto& c : p.categories) {
      categories.insert(c);
      if (auto g = corpus.taxonomy().group_of(c)) groups.insert(*g);
    }
    ++s.primary_group_histogram[primary_group(p, corpus.taxonomy())];
  }
  s.group_count = groups.size();
  s.category_count = categories.size();
  s.categories_per_paper = mean_sd(cats);
  s.title_words = mean_sd(tw);
  s.abstract_words = mean_sd(aw);
  s.title_keywords = mean_sd(tk);
  s.abstract_keywords = mean_sd(ak);
  return s;
}

ordered_json stats_to_json(const CorpusStats& s) {
  auto ms = [](const MeanSd& m) {
    ordered_json j;
    j["mean"] = m.mean;
    j["sd"] = m.sd;
    return j;
  };
  ordered_json j;
  j["papers"] = s.paper_count;
  j["citations"] = s.citation_count;
  j["time_span"] = {{"earliest", s.earliest.iso()}, {"latest", s.latest.iso()}};
  j["groups"] = s.group_count;
  j["categories"] = s.category_count;
  j["categories_per_paper"] = ms(s.categories_per_paper);
  j["title_words"] = ms(s.title_words);
  j["abstract_words"] = ms(s.abstract_words);
  j["title_keywords"] = ms(s.title_keywords);
  j["abstract_keywords"] = ms(s.abstract_keywords);
  j["primary_group_histogram"] = ordered_json::object();
  for (const auto& [g, n] : s.primary_group_histogram) j["primary_group_histogram"][g] = n;
  return j;
}

}  // namespace scitrace
