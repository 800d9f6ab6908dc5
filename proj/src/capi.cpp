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

#include "scitrace.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "scitrace/alignment.hpp"
#include "scitrace/analytics.hpp"
#include "scitrace/community.hpp"
#include "scitrace/keywords.hpp"
#include "scitrace/pipeline.hpp"

struct sct_config {
  scitrace::RunConfig config;
};

struct sct_corpus {
  scitrace::Corpus corpus;
};

namespace {

thread_local std::string g_last_error;

sct_status to_status(scitrace::ErrorKind kind) {
  using scitrace::ErrorKind;
  switch (kind) {
    case ErrorKind::validation: return SCT_ERR_VALIDATION;
    case ErrorKind::missing_prerequisite: return SCT_ERR_MISSING_PREREQUISITE;
    case ErrorKind::external_service: return SCT_ERR_EXTERNAL_SERVICE;
    case ErrorKind::invalid_argument: return SCT_ERR_INVALID_ARGUMENT;
    case ErrorKind::io: return SCT_ERR_IO;
    case ErrorKind::internal: return SCT_ERR_INTERNAL;
  }
  return SCT_ERR_INTERNAL;
}

template <typename F>
sct_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return SCT_OK;
  } catch (const scitrace::Error& e) {
    g_last_error = e.what();
    return to_status(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SCT_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SCT_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw scitrace::Error(scitrace::ErrorKind::invalid_argument, what);
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.data(), s.size() + 1);
  return p;
}

scitrace::WeightedGraph make_graph(size_t nodes, const uint32_t* edges, const double* weights, size_t edge_count) {
  require(edges || edge_count == 0, "edges is NULL");
  scitrace::WeightedGraph g;
  g.nodes = nodes;
  for (size_t i = 0; i < edge_count; ++i) {
    const uint32_t u = edges[2 * i], v = edges[2 * i + 1];
    require(u < nodes && v < nodes, "edge endpoint out of range");
    g.edges.push_back({u, v, weights ? weights[i] : 1.0});
  }
  return g;
}

}  // namespace

extern "C" {

const char* sct_version(void) { return SCITRACE_VERSION; }

const char* sct_last_error(void) { return g_last_error.c_str(); }

const char* sct_status_name(sct_status status) {
  switch (status) {
    case SCT_OK: return "ok";
    case SCT_ERR_VALIDATION: return "validation";
    case SCT_ERR_MISSING_PREREQUISITE: return "missing_prerequisite";
    case SCT_ERR_EXTERNAL_SERVICE: return "external_service";
    case SCT_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case SCT_ERR_IO: return "io";
    case SCT_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void sct_string_free(char* text) { std::free(text); }

sct_status sct_config_new(sct_config** out) {
  return guarded([&] {
    require(out, "out is NULL");
    *out = new sct_config{};
  });
}

sct_status sct_config_load(const char* path, sct_config** out) {
  return guarded([&] {
    require(path && out, "path or out is NULL");
    *out = new sct_config{scitrace::load_config(path)};
  });
}

sct_status sct_config_set(sct_config* config, const char* field, const char* value) {
  return guarded([&] {
    require(config && field && value, "config, field or value is NULL");
    scitrace::set_config_value(config->config, field, value);
  });
}

sct_status sct_config_get(const sct_config* config, const char* field, char** value) {
  return guarded([&] {
    require(config && field && value, "config, field or value is NULL");
    const auto values = scitrace::config_values(config->config);
    auto it = values.find(field);
    if (it == values.end())
      throw scitrace::Error(scitrace::ErrorKind::validation, "config: unknown key '" + std::string(field) + "'");
    *value = dup_string(it->second);
  });
}

sct_status sct_config_validate(const sct_config* config) {
  return guarded([&] {
    require(config, "config is NULL");
    scitrace::validate_config(config->config);
  });
}

void sct_config_free(sct_config* config) { delete config; }

sct_status sct_run(const sct_config* config, const char* const* stages, size_t stage_count, sct_log_fn log,
                   void* user) {
  return guarded([&] {
    require(config, "config is NULL");
    require(stages || stage_count == 0, "stages is NULL");
    std::vector<scitrace::Stage> list;
    for (size_t i = 0; i < stage_count; ++i) list.push_back(scitrace::parse_stage(stages[i]));
    if (list.empty()) list = scitrace::default_stages();
    scitrace::PipelineOptions options;
    if (log) options.log = [log, user](std::string_view line) { log(std::string(line).c_str(), user); };
    scitrace::run_pipeline(config->config, list, options);
  });
}

sct_status sct_default_stages(char** names) {
  return guarded([&] {
    require(names, "names is NULL");
    std::string out;
    for (auto s : scitrace::default_stages()) out += (out.empty() ? "" : ",") + std::string(scitrace::stage_name(s));
    *names = dup_string(out);
  });
}

sct_status sct_emit_report(const char* output_dir, const char* kind, const char* format, char** path) {
  return guarded([&] {
    require(output_dir && kind && format, "output_dir, kind or format is NULL");
    const auto p = scitrace::emit_report(output_dir, scitrace::parse_report_kind(kind),
                                         scitrace::parse_report_format(format));
    if (path) *path = dup_string(p.string());
  });
}

sct_status sct_corpus_load(const char* papers, const char* citations, const char* taxonomy, sct_corpus** out,
                           size_t* rejected_lines) {
  return guarded([&] {
    require(papers && out, "papers or out is NULL");
    const auto tax = taxonomy ? scitrace::Taxonomy::load(taxonomy) : scitrace::Taxonomy::builtin();
    auto loaded = scitrace::load_corpus(papers, citations ? citations : "", tax);
    if (rejected_lines) *rejected_lines = loaded.issues.size();
    *out = new sct_corpus{std::move(loaded.corpus)};
  });
}

size_t sct_corpus_paper_count(const sct_corpus* corpus) { return corpus ? corpus->corpus.papers().size() : 0; }

size_t sct_corpus_citation_count(const sct_corpus* corpus) {
  return corpus ? corpus->corpus.citations().size() : 0;
}

sct_status sct_corpus_stats_json(const sct_corpus* corpus, char** json) {
  return guarded([&] {
    require(corpus && json, "corpus or json is NULL");
    *json = dup_string(scitrace::stats_to_json(scitrace::corpus_stats(corpus->corpus)).dump());
  });
}

sct_status sct_corpus_homophily(const sct_corpus* corpus, const char* mode, double* ratio) {
  return guarded([&] {
    require(corpus && mode && ratio, "corpus, mode or ratio is NULL");
    *ratio = scitrace::homophily_ratio(corpus->corpus, scitrace::parse_homophily_mode(mode)).ratio;
  });
}

void sct_corpus_free(sct_corpus* corpus) { delete corpus; }

sct_status sct_diversity(const double* contributions, size_t count, double log_base, double scores[3]) {
  return guarded([&] {
    require(contributions || count == 0, "contributions is NULL");
    require(scores, "scores is NULL");
    const auto s = scitrace::diversity_from_contributions({contributions, count}, log_base);
    scores[0] = s.simpson;
    scores[1] = s.shannon;
    scores[2] = s.gini;
  });
}

sct_status sct_age_of_citation(const char* citing, const char* cited, double* years) {
  return guarded([&] {
    require(citing && cited && years, "citing, cited or years is NULL");
    scitrace::AocCounters counters;
    auto age = scitrace::age_of_citation(scitrace::Date::parse(citing), scitrace::Date::parse(cited), counters);
    if (!age) throw scitrace::Error(scitrace::ErrorKind::validation, "negative age of citation");
    *years = *age;
  });
}

sct_status sct_modularity(size_t nodes, const uint32_t* edges, const double* weights, size_t edge_count,
                          const uint32_t* membership, double* q) {
  return guarded([&] {
    require(membership && q, "membership or q is NULL");
    const auto g = make_graph(nodes, edges, weights, edge_count);
    *q = scitrace::modularity(g, std::vector<uint32_t>(membership, membership + nodes));
  });
}

sct_status sct_louvain(size_t nodes, const uint32_t* edges, const double* weights, size_t edge_count, uint64_t seed,
                       uint32_t* membership, size_t* communities, double* q) {
  return guarded([&] {
    require(membership, "membership is NULL");
    const auto p = scitrace::louvain(make_graph(nodes, edges, weights, edge_count), seed);
    std::copy(p.membership.begin(), p.membership.end(), membership);
    if (communities) *communities = p.community_count;
    if (q) *q = p.modularity;
  });
}

sct_status sct_procrustes(const double* source, const double* target, size_t rows, size_t dim, double* rotation) {
  return guarded([&] {
    require(source && target && rotation, "source, target or rotation is NULL");
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const auto r = static_cast<Eigen::Index>(rows), d = static_cast<Eigen::Index>(dim);
    const Eigen::MatrixXd a = Eigen::Map<const RowMajor>(source, r, d);
    const Eigen::MatrixXd b = Eigen::Map<const RowMajor>(target, r, d);
    Eigen::Map<RowMajor>(rotation, d, d) = scitrace::procrustes_rotation(a, b);
  });
}

sct_status sct_extract_keywords(const char* title, const char* abstract_text, char** json) {
  return guarded([&] {
    require(title && json, "title or json is NULL");
    const auto kw = scitrace::extract_keywords_fallback(title, abstract_text ? abstract_text : "");
    nlohmann::ordered_json j;
    j["title_keywords"] = nlohmann::ordered_json::array();
    j["abstract_keywords"] = nlohmann::ordered_json::array();
    for (const auto& k : kw.title_keywords) j["title_keywords"].push_back(k.surface);
    for (const auto& k : kw.abstract_keywords) j["abstract_keywords"].push_back(k.surface);
    *json = dup_string(j.dump());
  });
}

}  // extern "C"
