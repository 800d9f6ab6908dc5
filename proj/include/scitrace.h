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

/* C interface to the scitrace library. Every call returns an sct_status;
 * on failure sct_last_error() describes the problem (per thread). Strings
 * handed out by the library are released with sct_string_free. */
#ifndef SCITRACE_H
#define SCITRACE_H

#include <stddef.h>
#include <stdint.h>

#if defined(SCITRACE_BUILDING_LIBRARY)
#define SCITRACE_API __attribute__((visibility("default")))
#else
#define SCITRACE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sct_status {
  SCT_OK = 0,
  SCT_ERR_VALIDATION = 1,
  SCT_ERR_MISSING_PREREQUISITE = 2,
  SCT_ERR_EXTERNAL_SERVICE = 3,
  SCT_ERR_INVALID_ARGUMENT = 4,
  SCT_ERR_IO = 5,
  SCT_ERR_INTERNAL = 6
} sct_status;

typedef struct sct_config sct_config;
typedef struct sct_corpus sct_corpus;

typedef void (*sct_log_fn)(const char* line, void* user);

SCITRACE_API const char* sct_version(void);
SCITRACE_API const char* sct_last_error(void);
SCITRACE_API const char* sct_status_name(sct_status status);
SCITRACE_API void sct_string_free(char* text);

/* ---- run configuration ---- */

SCITRACE_API sct_status sct_config_new(sct_config** out);
/* INI file; relative paths resolve against the file's directory. */
SCITRACE_API sct_status sct_config_load(const char* path, sct_config** out);
/* field is "section.key", e.g. "embedding.seed". */
SCITRACE_API sct_status sct_config_set(sct_config* config, const char* field, const char* value);
SCITRACE_API sct_status sct_config_get(const sct_config* config, const char* field, char** value);
SCITRACE_API sct_status sct_config_validate(const sct_config* config);
SCITRACE_API void sct_config_free(sct_config* config);

/* Runs the named stages in order; stage_count 0 runs the default offline
 * sequence (everything except harvest). log may be NULL. */
SCITRACE_API sct_status sct_run(const sct_config* config, const char* const* stages, size_t stage_count,
                                sct_log_fn log, void* user);
/* Names of the default stages, comma separated. */
SCITRACE_API sct_status sct_default_stages(char** names);
/* Writes <output_dir>/reports/<kind>.<format>; the path is returned in *path. */
SCITRACE_API sct_status sct_emit_report(const char* output_dir, const char* kind, const char* format, char** path);

/* ---- corpus ---- */

/* citations and taxonomy may be NULL (no citations / shipped taxonomy). */
SCITRACE_API sct_status sct_corpus_load(const char* papers, const char* citations, const char* taxonomy,
                                        sct_corpus** out, size_t* rejected_lines);
SCITRACE_API size_t sct_corpus_paper_count(const sct_corpus* corpus);
SCITRACE_API size_t sct_corpus_citation_count(const sct_corpus* corpus);
SCITRACE_API sct_status sct_corpus_stats_json(const sct_corpus* corpus, char** json);
/* mode: "primary_group" or "any_shared_group". */
SCITRACE_API sct_status sct_corpus_homophily(const sct_corpus* corpus, const char* mode, double* ratio);
SCITRACE_API void sct_corpus_free(sct_corpus* corpus);

/* ---- analysis primitives ---- */

/* scores[0..2] = Simpson, Shannon, Gini of the raw subject contributions. */
SCITRACE_API sct_status sct_diversity(const double* contributions, size_t count, double log_base, double scores[3]);
/* Dates as YYYY-MM-DD. A negative gap is SCT_ERR_VALIDATION. */
SCITRACE_API sct_status sct_age_of_citation(const char* citing, const char* cited, double* years);
/* edges holds edge_count (u, v) pairs; weights may be NULL for unit weights. */
SCITRACE_API sct_status sct_modularity(size_t nodes, const uint32_t* edges, const double* weights, size_t edge_count,
                                       const uint32_t* membership, double* q);
SCITRACE_API sct_status sct_louvain(size_t nodes, const uint32_t* edges, const double* weights, size_t edge_count,
                                    uint64_t seed, uint32_t* membership, size_t* communities, double* q);
/* Row-major rows x dim matrices; rotation receives dim x dim, row-major. */
SCITRACE_API sct_status sct_procrustes(const double* source, const double* target, size_t rows, size_t dim,
                                       double* rotation);
/* {"title_keywords": [...], "abstract_keywords": [...]} from the fallback extractor. */
SCITRACE_API sct_status sct_extract_keywords(const char* title, const char* abstract_text, char** json);

#ifdef __cplusplus
}
#endif

#endif /* SCITRACE_H */
