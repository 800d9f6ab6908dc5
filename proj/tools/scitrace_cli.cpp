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

// scitrace command line. Every subcommand is one pipeline stage; `run`
// chains the offline stages. Exit codes: 0 ok, 1 validation, 2 missing
// prerequisite, 3 external service.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "scitrace.h"

namespace {

int exit_code(sct_status s) {
  switch (s) {
    case SCT_OK: return 0;
    case SCT_ERR_MISSING_PREREQUISITE: return 2;
    case SCT_ERR_EXTERNAL_SERVICE: return 3;
    default: return 1;
  }
}

struct ConfigHandle {
  sct_config* ptr = nullptr;
  ~ConfigHandle() { sct_config_free(ptr); }
};

void log_line(const char* line, void*) { std::fprintf(stderr, "scitrace: %s\n", line); }

struct Common {
  std::string config;
  std::vector<std::string> set;
  std::string out;
  bool offline = false;
  bool quiet = false;
};

// Flag -> config field, filled in per subcommand.
struct Binding {
  std::string field;
  std::string value;
};

struct Command {
  CLI::App* app = nullptr;
  std::vector<std::string> stages;
  std::vector<std::unique_ptr<Binding>> bindings;

  CLI::Option* bind(const std::string& flag, const std::string& field, const std::string& help) {
    bindings.push_back(std::make_unique<Binding>(Binding{field, {}}));
    return app->add_option(flag, bindings.back()->value, help);
  }
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config, "INI run configuration");
  app->add_option("--set", c.set, "override a config field, section.key=value (repeatable)");
  app->add_option("-o,--out", c.out, "output directory (paths.output_dir)");
  app->add_flag("--offline", c.offline, "replay harvest fixtures instead of the network");
  app->add_flag("-q,--quiet", c.quiet, "no progress lines on stderr");
}

int fail(sct_status s) {
  std::fprintf(stderr, "error: %s\n", sct_last_error());
  return exit_code(s);
}

int build_config(const Common& c, const Command& cmd, ConfigHandle& h) {
  sct_status s = c.config.empty() ? sct_config_new(&h.ptr) : sct_config_load(c.config.c_str(), &h.ptr);
  if (s != SCT_OK) return fail(s);
  for (const auto& assignment : c.set) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects section.key=value, got '%s'\n", assignment.c_str());
      return 1;
    }
    s = sct_config_set(h.ptr, assignment.substr(0, eq).c_str(), assignment.substr(eq + 1).c_str());
    if (s != SCT_OK) return fail(s);
  }
  // Dedicated flags win over both the file and --set.
  if (!c.out.empty() && (s = sct_config_set(h.ptr, "paths.output_dir", c.out.c_str())) != SCT_OK) return fail(s);
  if (c.offline && (s = sct_config_set(h.ptr, "harvest.offline", "true")) != SCT_OK) return fail(s);
  for (const auto& b : cmd.bindings)
    if (!b->value.empty() && (s = sct_config_set(h.ptr, b->field.c_str(), b->value.c_str())) != SCT_OK) return fail(s);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scitrace: scientometric corpus analysis pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(sct_version()));

  Common common;
  std::vector<std::unique_ptr<Command>> commands;
  auto stage = [&](const std::string& name, const std::string& help, std::vector<std::string> stages) {
    auto cmd = std::make_unique<Command>();
    cmd->app = app.add_subcommand(name, help);
    cmd->stages = std::move(stages);
    add_common(cmd->app, common);
    commands.push_back(std::move(cmd));
    return commands.back().get();
  };

  auto* harvest = stage("harvest", "fetch arXiv metadata and citation records (resumable)", {"harvest"});
  harvest->bind("--query", "harvest.query", "arXiv search query, e.g. cat:cs.CL");
  harvest->bind("--from", "harvest.from", "first submission date, YYYY-MM-DD");
  harvest->bind("--to", "harvest.to", "last submission date, YYYY-MM-DD");
  harvest->bind("--fixtures", "harvest.fixtures", "fixture directory for --offline");
  harvest->bind("--record", "harvest.record", "record live responses into this directory");
  harvest->bind("--max-pages", "harvest.max_pages", "stop after this many metadata pages");
  harvest->bind("--page-size", "harvest.page_size", "records per metadata page");
  harvest->bind("--citations", "harvest.citations", "also fetch citations (true/false)");

  auto* ingest = stage("ingest", "validate papers and citations into the canonical corpus", {"ingest"});
  ingest->bind("--papers", "paths.papers", "papers file (JSON lines)");
  ingest->bind("--citations", "paths.citations", "citations file (JSON lines)");
  ingest->bind("--taxonomy", "paths.taxonomy", "taxonomy JSON (default: shipped)");

  auto* keywords = stage("keywords", "extract keywords for papers that have none", {"keywords"});
  keywords->bind("--extractor", "keywords.extractor", "fallback, command or keep");
  keywords->bind("--command", "keywords.command", "external extractor command (JSON lines on stdin/stdout)");
  keywords->bind("--overwrite", "keywords.overwrite", "re-extract papers that carry keywords (true/false)");

  auto* snapshot = stage("snapshot", "partition the corpus into time windows", {"snapshot"});
  snapshot->bind("--preset", "partition.preset", "period, yearly or explicit");
  snapshot->bind("--boundaries", "partition.boundaries", "comma-separated dates for the explicit preset");

  auto* rank = stage("rank", "rank keywords by frequency in each snapshot", {"rank"});
  rank->bind("--top-k", "keywords.top_k", "rows kept per snapshot");
  rank->bind("--source", "keywords.source", "title, abstract or both");

  auto* cooccur = stage("cooccur", "build keyword co-occurrence graphs per snapshot", {"cooccur"});
  cooccur->bind("--min-count", "keywords.min_count", "minimum keyword frequency in a snapshot");
  cooccur->bind("--source", "keywords.source", "title, abstract or both");

  auto* embed = stage("embed", "train GCN link-prediction embeddings per snapshot", {"embed"});
  embed->bind("--seed", "embedding.seed", "training seed");
  embed->bind("--epochs", "embedding.epochs", "training epochs");
  embed->bind("--dims", "embedding.dims", "width of every GCN layer");

  stage("align", "rotate every snapshot's embedding into the latest one", {"align"});

  auto* trajectory = stage("trajectory", "trace keywords across aligned snapshots (t-SNE)", {"trajectory"});
  trajectory->bind("--keywords", "analytics.trajectory_keywords", "comma-separated keywords");
  trajectory->bind("--seed", "tsne.seed", "t-SNE seed");
  trajectory->bind("--perplexity", "tsne.perplexity", "t-SNE perplexity");

  auto* neighbors = stage("neighbors", "cosine nearest neighbours per snapshot", {"neighbors"});
  neighbors->bind("--keywords", "analytics.neighbor_keywords", "comma-separated keywords");
  neighbors->bind("-k,--count", "analytics.neighbors_k", "neighbours per keyword");

  auto* diversity = stage("diversity", "Simpson, Shannon and Gini diversity of references", {"diversity"});
  diversity->bind("--level", "analytics.diversity_level", "paper, group or topic");
  diversity->bind("--aggregation", "analytics.topic_aggregation", "pooled or mean");
  diversity->bind("--topics", "analytics.topics", "comma-separated topic keywords");

  auto* aoc = stage("aoc", "age-of-citation distributions", {"aoc"});
  aoc->bind("--group-by", "analytics.aoc_grouping", "subject_group or topic_keyword");
  aoc->bind("--bin-width", "analytics.aoc_bin_width", "histogram bin width in years");
  aoc->bind("--topics", "analytics.topics", "comma-separated topic keywords");

  auto* homophily = stage("homophily", "share of citations within the citing paper's discipline", {"homophily"});
  homophily->bind("--mode", "analytics.homophily_mode", "primary_group or any_shared_group");

  auto* communities = stage("communities", "Louvain communities of the citation graph", {"communities"});
  communities->bind("--seed", "analytics.louvain_seed", "node-order seed");

  stage("stats", "corpus summary statistics", {"stats"});

  auto* report = stage("report", "render analysis artifacts as csv, json or svg", {"report"});
  std::string report_kind, report_format;
  report->app->add_option("--kind", report_kind,
                          "ranks, trajectories, neighbors, diversity, aoc, homophily, communities or stats");
  report->app->add_option("--format", report_format, "csv, json or svg");

  auto* run = stage("run", "run every offline stage in order", {});
  std::vector<std::string> only;
  run->app->add_option("--stages", only, "explicit stage list instead of the default sequence")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  Command* chosen = nullptr;
  for (auto& c : commands)
    if (c->app->parsed()) chosen = c.get();

  ConfigHandle config;
  if (int rc = build_config(common, *chosen, config)) return rc;

  if (chosen == report && !report_kind.empty()) {
    char* out_dir = nullptr;
    sct_status s = sct_config_get(config.ptr, "paths.output_dir", &out_dir);
    if (s != SCT_OK) return fail(s);
    char* path = nullptr;
    s = sct_emit_report(out_dir, report_kind.c_str(), report_format.empty() ? "csv" : report_format.c_str(), &path);
    sct_string_free(out_dir);
    if (s != SCT_OK) return fail(s);
    std::printf("%s\n", path);
    sct_string_free(path);
    return 0;
  }

  std::vector<std::string> stages = chosen == run ? only : chosen->stages;
  std::vector<const char*> names;
  for (const auto& s : stages) names.push_back(s.c_str());
  const sct_status s =
      sct_run(config.ptr, names.data(), names.size(), common.quiet ? nullptr : log_line, nullptr);
  return s == SCT_OK ? 0 : fail(s);
}
