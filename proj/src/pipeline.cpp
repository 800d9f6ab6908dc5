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

#include "scitrace/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "scitrace/alignment.hpp"
#include "scitrace/community.hpp"
#include "scitrace/harvest.hpp"
#include "scitrace/snapshot.hpp"

namespace scitrace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string_view library_version() { return SCITRACE_VERSION; }

namespace {

constexpr std::string_view kStageNames[] = {"harvest", "ingest",   "keywords",  "snapshot", "rank",
                                            "cooccur", "embed",    "align",     "trajectory", "neighbors",
                                            "diversity", "aoc",    "homophily", "communities", "stats",
                                            "report"};

// ---------------------------------------------------------------- artifacts

// Logical artifact names, their files relative to the output directory, and
// the stage that produces them.
struct Artifact {
  std::string_view name;
  std::string_view path;
  Stage producer;
};

constexpr Artifact kHarvestPapers{"harvested papers", "raw/arxiv.jsonl", Stage::harvest};
constexpr Artifact kCorpus{"corpus", "corpus/papers.jsonl", Stage::ingest};
constexpr Artifact kCorpusCitations{"corpus", "corpus/citations.jsonl", Stage::ingest};
constexpr Artifact kKeywords{"keywords", "corpus/papers.keywords.jsonl", Stage::keywords};
constexpr Artifact kPartition{"snapshots", "snapshots/partition.json", Stage::snapshot};
constexpr Artifact kCooccurrence{"cooccurrence", "cooccurrence/index.json", Stage::cooccur};
constexpr Artifact kEmbeddings{"embeddings", "embeddings/index.json", Stage::embed};
constexpr Artifact kAligned{"aligned embeddings", "aligned/index.json", Stage::align};

struct Input {
  std::string key;  // manifest key; stable across output directories
  fs::path path;
  std::optional<Artifact> artifact;  // set for artifacts produced by another stage
  bool optional = false;
};

Input artifact_input(const fs::path& out, const Artifact& a) {
  return {std::string(a.path), out / std::string(a.path), a, false};
}

using Outputs = std::map<std::string, std::string>;  // relative path -> content

struct StageContext {
  const RunConfig& config;
  fs::path out;
  std::vector<std::string> notes;
  const PipelineOptions& options;

  void log(const std::string& msg) {
    if (options.log) options.log(msg);
  }
};

struct StageSpec {
  std::vector<Input> inputs;
  std::vector<std::string> config_keys;
  std::optional<std::uint64_t> seed;
  std::function<Outputs(StageContext&)> run;
};

std::string snapshot_file(std::size_t index, std::string_view suffix) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "s%02zu", index);
  return std::string(buf) + std::string(suffix);
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json read_json(const fs::path& path) {
  auto j = ordered_json::parse(read_text_file(path), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::validation, "not valid JSON: " + path.string());
  return j;
}

// Index files list their member files under "files"; those are hashed too.
std::map<std::string, std::string> hash_inputs(const std::vector<Input>& inputs) {
  std::map<std::string, std::string> hashes;
  for (const auto& in : inputs) {
    if (!fs::exists(in.path)) {
      if (in.optional) continue;
      if (in.artifact)
        throw Error(ErrorKind::missing_prerequisite,
                    "missing artifact: " + std::string(in.artifact->name) + " (run '" +
                        std::string(stage_name(in.artifact->producer)) + "' first)");
      throw Error(ErrorKind::missing_prerequisite, "missing input: " + in.key + " (" + in.path.string() + ")");
    }
    hashes[in.key] = sha256_file(in.path);
    if (in.path.filename() == "index.json") {
      const auto index = read_json(in.path);
      for (const auto& f : index.value("files", ordered_json::array())) {
        const auto rel = f.get<std::string>();
        const auto member = in.path.parent_path() / rel;
        const auto key = (fs::path(in.key).parent_path() / rel).generic_string();
        if (!fs::exists(member))
          throw Error(ErrorKind::missing_prerequisite,
                      "missing artifact: " + std::string(in.artifact ? in.artifact->name : in.key) + " file " + rel);
        hashes[key] = sha256_file(member);
      }
    }
  }
  return hashes;
}

std::string config_hash(const RunConfig& config, const std::vector<std::string>& keys) {
  const auto values = config_values(config);
  std::string text;
  for (const auto& k : keys) text += k + "=" + values.at(k) + "\n";
  return sha256_hex(text);
}

ordered_json make_manifest(Stage stage, std::optional<std::uint64_t> seed, const std::string& cfg_hash,
                           const std::map<std::string, std::string>& inputs,
                           const std::map<std::string, std::string>& outputs) {
  ordered_json m;
  m["stage"] = stage_name(stage);
  m["version"] = library_version();
  m["seed"] = seed ? ordered_json(*seed) : ordered_json(nullptr);
  m["config_hash"] = cfg_hash;
  m["inputs"] = ordered_json::object();
  for (const auto& [k, v] : inputs) m["inputs"][k] = v;
  m["outputs"] = ordered_json::object();
  for (const auto& [k, v] : outputs) m["outputs"][k] = v;
  return m;
}

bool manifest_current(const fs::path& out, const fs::path& manifest_path, const ordered_json& expected_head) {
  if (!fs::exists(manifest_path)) return false;
  auto m = ordered_json::parse(read_text_file(manifest_path), nullptr, false);
  if (m.is_discarded() || !m.is_object()) return false;
  for (const char* key : {"stage", "version", "seed", "config_hash", "inputs"})
    if (m.value(key, ordered_json()) != expected_head.at(key)) return false;
  const auto outputs = m.value("outputs", ordered_json::object());
  if (!outputs.is_object()) return false;
  for (const auto& [rel, hash] : outputs.items()) {
    const auto p = out / rel;
    if (!fs::exists(p) || sha256_file(p) != hash.get<std::string>()) return false;
  }
  return true;
}

StageOutcome execute(Stage stage, const StageSpec& spec, const RunConfig& config, const PipelineOptions& options) {
  const fs::path out = config.paths.output_dir;
  StageOutcome outcome{stage, false, {}, {}};
  const auto inputs = hash_inputs(spec.inputs);
  const auto cfg_hash = config_hash(config, spec.config_keys);
  const auto manifest_path = out / "manifests" / (std::string(stage_name(stage)) + ".json");
  const auto head = make_manifest(stage, spec.seed, cfg_hash, inputs, {});

  if (stage != Stage::harvest && manifest_current(out, manifest_path, head)) {
    outcome.skipped = true;
    if (options.log) options.log(std::string(stage_name(stage)) + ": up to date");
    return outcome;
  }

  StageContext ctx{config, out, {}, options};
  Outputs outputs = spec.run(ctx);

  std::map<std::string, std::string> output_hashes;
  for (const auto& [rel, content] : outputs) {
    const auto path = out / rel;
    if (!fs::exists(path) || read_text_file(path) != content) write_file_atomic(path, content);
    output_hashes[rel] = sha256_hex(content);
    outcome.outputs.push_back(rel);
  }
  // Outputs of an earlier run that this run no longer produces.
  if (fs::exists(manifest_path)) {
    auto old = ordered_json::parse(read_text_file(manifest_path), nullptr, false);
    if (!old.is_discarded() && old.contains("outputs"))
      for (const auto& [rel, hash] : old["outputs"].items())
        if (!outputs.count(rel)) fs::remove(out / rel);
  }
  write_file_atomic(manifest_path, dump(make_manifest(stage, spec.seed, cfg_hash, inputs, output_hashes)));
  outcome.notes = std::move(ctx.notes);
  if (options.log) {
    options.log(std::string(stage_name(stage)) + ": wrote " + std::to_string(outputs.size()) + " file(s)");
    for (const auto& n : outcome.notes) options.log("  " + n);
  }
  return outcome;
}

// ---------------------------------------------------------------- shared loaders

Taxonomy load_taxonomy(const RunConfig& c) {
  return c.paths.taxonomy.empty() ? Taxonomy::builtin() : Taxonomy::load(c.paths.taxonomy);
}

std::vector<Input> taxonomy_inputs(const RunConfig& c) {
  if (c.paths.taxonomy.empty()) return {};
  return {{"taxonomy", c.paths.taxonomy, std::nullopt, false}};
}

Corpus load_stage_corpus(const StageContext& ctx, bool with_keywords) {
  const auto papers = ctx.out / std::string(with_keywords ? kKeywords.path : kCorpus.path);
  return load_corpus(papers, ctx.out / std::string(kCorpusCitations.path), load_taxonomy(ctx.config)).corpus;
}

std::vector<Input> corpus_inputs(const RunConfig& c, bool with_keywords) {
  const fs::path out = c.paths.output_dir;
  auto in = taxonomy_inputs(c);
  in.push_back(artifact_input(out, with_keywords ? kKeywords : kCorpus));
  in.push_back(artifact_input(out, kCorpusCitations));
  return in;
}

TimePartition load_partition(const StageContext& ctx) {
  const auto j = read_json(ctx.out / std::string(kPartition.path));
  TimePartition p;
  for (const auto& s : j.at("snapshots")) {
    Snapshot snap;
    snap.label = s.at("label").get<std::string>();
    snap.start = Date::parse(s.at("start").get<std::string>());
    snap.end = Date::parse(s.at("end").get<std::string>());
    snap.paper_ids = s.at("papers").get<std::vector<std::string>>();
    p.snapshots.push_back(std::move(snap));
  }
  return p;
}

// Embedding matrices listed in an index, in order.
std::vector<EmbeddingMatrix> load_matrices(const fs::path& index_path) {
  const auto index = read_json(index_path);
  std::vector<EmbeddingMatrix> out;
  for (const auto& s : index.at("snapshots")) {
    if (!s.contains("file") || s["file"].is_null()) continue;
    auto m = parse_embedding(read_text_file(index_path.parent_path() / s["file"].get<std::string>()));
    m.label = s.at("label").get<std::string>();
    out.push_back(std::move(m));
  }
  return out;
}

// ---------------------------------------------------------------- harvest

std::vector<std::string> read_lines(const fs::path& p) {
  std::vector<std::string> lines;
  if (!fs::exists(p)) return lines;
  for (auto& l : split(read_text_file(p), '\n'))
    if (!l.empty()) lines.push_back(std::move(l));
  return lines;
}

void append_lines(const fs::path& p, const std::vector<std::string>& lines) {
  if (lines.empty()) return;
  fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary | std::ios::app);
  for (const auto& l : lines) f << l << '\n';
  if (!f) throw Error(ErrorKind::io, "cannot append to " + p.string());
}

Outputs run_harvest(StageContext& ctx) {
  const auto& h = ctx.config.harvest;
  if (h.query.empty()) throw Error(ErrorKind::validation, "config harvest.query: required for harvesting");
  std::unique_ptr<Transport> base;
  std::unique_ptr<Transport> recorder;
  std::unique_ptr<Clock> clock;
  if (h.offline) {
    if (h.fixtures.empty()) throw Error(ErrorKind::validation, "config harvest.fixtures: required with --offline");
    base = std::make_unique<FixtureTransport>(h.fixtures);
    clock = std::make_unique<ManualClock>();
  } else {
    base = std::make_unique<HttpTransport>();
    clock = std::make_unique<SystemClock>();
  }
  Transport* transport = base.get();
  if (!h.record.empty()) {
    recorder = std::make_unique<RecordingTransport>(*base, h.record);
    transport = recorder.get();
  }
  RateLimiter limiter(*clock, h.min_interval);

  const auto papers_path = ctx.out / "raw/arxiv.jsonl";
  const auto cursor_path = ctx.out / "raw/arxiv.cursor.json";
  std::set<std::string> seen;
  std::vector<std::string> harvested_ids;
  for (const auto& line : read_lines(papers_path)) {
    auto id = raw_record_from_json(nlohmann::json::parse(line)).id;
    if (seen.insert(id).second) harvested_ids.push_back(id);
  }

  ArxivOptions ao;
  ao.endpoint = h.arxiv_endpoint;
  ao.page_size = h.page_size;
  ao.max_pages = h.max_pages;
  ArxivHarvester harvester(*transport, limiter, *clock, {}, ao);
  std::optional<DateWindow> window;
  if (h.from || h.to) window = DateWindow{h.from.value_or(Date{1900, 1, 1}), h.to.value_or(Date{2100, 1, 1})};

  std::vector<std::string> pending;
  std::size_t fresh = 0;
  auto cursor = harvester.harvest(
      h.query, window, load_cursor(cursor_path),
      [&](const RawPaperRecord& r) {
        if (!seen.insert(r.id).second) return;
        pending.push_back(raw_record_to_json(r).dump());
        harvested_ids.push_back(r.id);
      },
      [&](const HarvestCursor& c) {
        append_lines(papers_path, pending);
        fresh += pending.size();
        pending.clear();
        save_cursor(c, cursor_path);
      });
  ctx.notes.push_back("arxiv: " + std::to_string(fresh) + " new record(s), " +
                      (cursor.complete ? "complete" : "incomplete; rerun to resume"));

  Outputs outputs;
  if (h.citations && !harvested_ids.empty()) {
    const auto citations_path = ctx.out / "raw/citations.jsonl";
    const auto status_path = ctx.out / "raw/citation_status.jsonl";
    std::set<std::string> done;
    for (const auto& line : read_lines(status_path)) done.insert(nlohmann::json::parse(line).at("id").get<std::string>());
    std::vector<std::string> todo;
    for (const auto& id : harvested_ids)
      if (!done.count(id)) todo.push_back(id);
    CitationOptions co;
    co.endpoint = h.citation_endpoint;
    co.max_batch = h.max_batch;
    co.api_key = citation_api_key_from_env();
    CitationClient client(*transport, limiter, *clock, {}, co);
    std::size_t not_found = 0;
    for (std::size_t at = 0; at < todo.size(); at += h.max_batch) {
      std::vector<std::string> batch(todo.begin() + static_cast<std::ptrdiff_t>(at),
                                     todo.begin() + static_cast<std::ptrdiff_t>(std::min(todo.size(), at + h.max_batch)));
      std::vector<std::string> edge_lines, status_lines;
      for (const auto& g : client.fetch_batch(batch)) {
        for (const auto& e : g.edges) edge_lines.push_back(citation_to_json(e).dump());
        status_lines.push_back(citation_status_json(g).dump());
        not_found += g.not_found;
      }
      append_lines(citations_path, edge_lines);
      append_lines(status_path, status_lines);
    }
    ctx.notes.push_back("citations: " + std::to_string(todo.size()) + " paper(s) looked up, " +
                        std::to_string(not_found) + " not found");
    if (fs::exists(citations_path)) outputs["raw/citations.jsonl"] = read_text_file(citations_path);
    if (fs::exists(status_path)) outputs["raw/citation_status.jsonl"] = read_text_file(status_path);
  }
  outputs["raw/arxiv.jsonl"] = fs::exists(papers_path) ? read_text_file(papers_path) : std::string();
  outputs["raw/arxiv.cursor.json"] = read_text_file(cursor_path);
  return outputs;
}

// ---------------------------------------------------------------- ingest / keywords / snapshot

Outputs run_ingest(StageContext& ctx) {
  const auto& c = ctx.config;
  Outputs outputs;
  fs::path papers = c.paths.papers;
  fs::path citations = c.paths.citations;
  if (papers.empty()) {
    // Harvested records are converted here, after the raw copy is on disk.
    std::string converted;
    for (const auto& line : read_lines(ctx.out / std::string(kHarvestPapers.path)))
      converted += raw_record_to_paper_json(raw_record_from_json(nlohmann::json::parse(line))).dump() + "\n";
    papers = ctx.out / "corpus/harvested_papers.jsonl";
    write_file_atomic(papers, converted);
    outputs["corpus/harvested_papers.jsonl"] = converted;
    if (citations.empty() && fs::exists(ctx.out / "raw/citations.jsonl")) citations = ctx.out / "raw/citations.jsonl";
  }
  auto loaded = load_corpus(papers, citations, load_taxonomy(c));
  std::string issues;
  for (const auto& issue : loaded.issues) {
    ordered_json j;
    j["file"] = issue.file == papers.string() ? "papers" : "citations";
    j["line"] = issue.line;
    j["violations"] = ordered_json::array();
    for (const auto& v : issue.violations) j["violations"].push_back({{"code", v.code}, {"detail", v.detail}});
    issues += j.dump() + "\n";
  }
  outputs[std::string(kCorpus.path)] = serialize_papers(loaded.corpus.papers());
  outputs[std::string(kCorpusCitations.path)] = serialize_citations(loaded.corpus.citations());
  outputs["corpus/ingest_issues.jsonl"] = issues;
  ctx.notes.push_back(std::to_string(loaded.corpus.papers().size()) + " papers, " +
                      std::to_string(loaded.corpus.citations().size()) + " citations, " +
                      std::to_string(loaded.issues.size()) + " rejected line(s)");
  return outputs;
}

Outputs run_keywords(StageContext& ctx) {
  const auto& k = ctx.config.keywords;
  const auto corpus = load_stage_corpus(ctx, false);
  std::vector<Paper> papers(corpus.papers().begin(), corpus.papers().end());

  std::vector<std::size_t> todo;
  if (k.extractor != "keep")
    for (std::size_t i = 0; i < papers.size(); ++i)
      if (k.overwrite || (papers[i].title_keywords.empty() && papers[i].abstract_keywords.empty())) todo.push_back(i);

  if (!todo.empty()) {
    std::optional<StopwordList> custom;
    if (!ctx.config.paths.stopwords.empty())
      custom = StopwordList::parse(read_text_file(ctx.config.paths.stopwords));
    std::unique_ptr<KeywordExtractor> extractor;
    if (k.extractor == "command")
      extractor = std::make_unique<CommandExtractor>(k.command);
    else
      extractor = std::make_unique<FallbackExtractor>(custom ? *custom : StopwordList::builtin());
    std::vector<ExtractionInput> inputs;
    for (auto i : todo) inputs.push_back({papers[i].title, papers[i].abstract});
    auto results = extractor->extract(inputs);
    for (std::size_t n = 0; n < todo.size(); ++n) {
      papers[todo[n]].title_keywords = std::move(results[n].title_keywords);
      papers[todo[n]].abstract_keywords = std::move(results[n].abstract_keywords);
    }
  }
  ctx.notes.push_back(std::to_string(todo.size()) + " paper(s) sent to the " + k.extractor + " extractor");
  return {{std::string(kKeywords.path), serialize_papers(papers)}};
}

PartitionScheme scheme_from(const RunConfig::Partition& p) {
  if (p.preset == "period") return period_preset();
  if (p.preset == "yearly") return yearly_preset(p.first_year, p.end_year);
  return PartitionScheme{p.boundaries, p.labels};
}

Outputs run_snapshot(StageContext& ctx) {
  const auto corpus = load_stage_corpus(ctx, false);
  const auto partition = partition_by_time(corpus, scheme_from(ctx.config.partition));
  ordered_json j;
  j["snapshots"] = ordered_json::array();
  for (const auto& s : partition.snapshots)
    j["snapshots"].push_back(
        {{"label", s.label}, {"start", s.start.iso()}, {"end", s.end.iso()}, {"papers", s.paper_ids}});
  j["out_of_range"] = partition.out_of_range;
  if (!partition.out_of_range.empty())
    ctx.notes.push_back(std::to_string(partition.out_of_range.size()) + " paper(s) outside every window");
  return {{std::string(kPartition.path), dump(j)}};
}

// ---------------------------------------------------------------- ranks / co-occurrence

Outputs run_rank(StageContext& ctx) {
  const auto corpus = load_stage_corpus(ctx, true);
  const auto partition = load_partition(ctx);
  std::vector<RankTable> tables;
  for (const auto& s : partition.snapshots)
    tables.push_back(keyword_ranks(corpus, s, ctx.config.keywords.source, ctx.config.keywords.top_k));
  ordered_json j = ordered_json::array();
  for (const auto& t : tables) {
    ordered_json rows = ordered_json::array();
    for (const auto& r : t.rows) rows.push_back({{"keyword", r.keyword}, {"frequency", r.frequency}, {"rank", r.rank}});
    j.push_back({{"snapshot", t.label}, {"rows", rows}});
  }
  return {{"analysis/ranks.csv", ranks_to_csv(tables)}, {"analysis/ranks.json", dump(j)}};
}

Outputs run_cooccur(StageContext& ctx) {
  const auto& k = ctx.config.keywords;
  const auto corpus = load_stage_corpus(ctx, true);
  const auto partition = load_partition(ctx);
  Outputs outputs;
  ordered_json index;
  index["files"] = ordered_json::array();
  index["snapshots"] = ordered_json::array();
  for (std::size_t i = 0; i < partition.snapshots.size(); ++i) {
    const auto& s = partition.snapshots[i];
    const auto papers = snapshot_papers(corpus, s);
    const auto vocab = build_vocabulary(papers, k.source, k.min_count);
    const auto graph = build_cooccurrence(papers, vocab, k.source, s.label);
    const auto nodes_file = snapshot_file(i, ".nodes.tsv");
    const auto edges_file = snapshot_file(i, ".edges.tsv");
    outputs["cooccurrence/" + nodes_file] = cooccurrence_nodes_tsv(graph);
    outputs["cooccurrence/" + edges_file] = cooccurrence_edges_tsv(graph);
    index["files"].push_back(nodes_file);
    index["files"].push_back(edges_file);
    index["snapshots"].push_back({{"label", s.label},
                                  {"papers", papers.size()},
                                  {"nodes", graph.nodes.size()},
                                  {"edges", graph.edges.size()},
                                  {"nodes_file", nodes_file},
                                  {"edges_file", edges_file}});
  }
  outputs[std::string(kCooccurrence.path)] = dump(index);
  return outputs;
}

// ---------------------------------------------------------------- embeddings

Outputs run_embed(StageContext& ctx) {
  const auto& e = ctx.config.embedding;
  const auto dir = ctx.out / "cooccurrence";
  const auto index = read_json(dir / "index.json");
  Outputs outputs;
  ordered_json out_index;
  out_index["dim"] = e.training.dims.output;
  out_index["files"] = ordered_json::array();
  out_index["snapshots"] = ordered_json::array();
  std::size_t i = 0;
  for (const auto& s : index.at("snapshots")) {
    const auto label = s.at("label").get<std::string>();
    const auto graph = parse_cooccurrence(read_text_file(dir / s.at("nodes_file").get<std::string>()),
                                          read_text_file(dir / s.at("edges_file").get<std::string>()), label);
    ordered_json entry{{"label", label}, {"nodes", graph.nodes.size()}, {"edges", graph.edges.size()}};
    if (graph.nodes.size() < 2 || graph.edges.empty()) {
      entry["file"] = nullptr;
      entry["skipped"] = "fewer than two keywords or no co-occurrence";
      ctx.notes.push_back(label + ": skipped (no co-occurrence edges)");
    } else {
      ctx.log("embed: training " + label + " (" + std::to_string(graph.nodes.size()) + " nodes)");
      const auto result = train_link_prediction(graph, e.training, derive_seed(e.seed, i));
      const auto file = snapshot_file(i, ".emb");
      outputs["embeddings/" + file] = embedding_to_text(result.embedding);
      out_index["files"].push_back(file);
      entry["file"] = file;
      entry["initial_loss"] = result.initial_loss;
      entry["final_loss"] = result.final_loss;
      entry["epoch_loss"] = result.epoch_loss;
    }
    out_index["snapshots"].push_back(entry);
    ++i;
  }
  outputs[std::string(kEmbeddings.path)] = dump(out_index);
  return outputs;
}

Outputs run_align(StageContext& ctx) {
  EmbeddingSeries series;
  series.matrices = load_matrices(ctx.out / std::string(kEmbeddings.path));
  if (series.matrices.size() < 2)
    throw Error(ErrorKind::validation, "alignment needs at least two embedded snapshots, have " +
                                           std::to_string(series.matrices.size()));
  const auto aligned = align_series(std::move(series));
  Outputs outputs;
  ordered_json index;
  index["reference"] = aligned.matrices.back().label;
  index["files"] = ordered_json::array();
  index["snapshots"] = ordered_json::array();
  for (std::size_t i = 0; i < aligned.matrices.size(); ++i) {
    const auto file = snapshot_file(i, ".emb");
    outputs["aligned/" + file] = embedding_to_text(aligned.matrices[i]);
    index["files"].push_back(file);
    index["snapshots"].push_back({{"label", aligned.matrices[i].label}, {"file", file}});
  }
  ordered_json rotations = ordered_json::array();
  for (std::size_t t = 0; t < aligned.rotations.size(); ++t) {
    const auto& r = aligned.rotations[t];
    ordered_json rows = ordered_json::array();
    for (Eigen::Index a = 0; a < r.rows(); ++a) {
      ordered_json row = ordered_json::array();
      for (Eigen::Index b = 0; b < r.cols(); ++b) row.push_back(r(a, b));
      rows.push_back(row);
    }
    rotations.push_back({{"from", aligned.matrices[t].label},
                         {"to", aligned.matrices[t + 1].label},
                         {"orthogonality_error", orthogonality_error(r)},
                         {"rotation", rows}});
  }
  outputs["aligned/rotations.json"] = dump(rotations);
  outputs[std::string(kAligned.path)] = dump(index);
  return outputs;
}

// Configured keywords, or those present in the most snapshots (ties lexicographic).
std::vector<std::string> tracked_keywords(const std::vector<EmbeddingMatrix>& matrices,
                                          const std::vector<std::string>& configured, std::size_t top) {
  if (!configured.empty()) return configured;
  std::map<std::string, std::size_t> presence;
  for (const auto& m : matrices)
    for (const auto& kw : m.vocab) ++presence[kw];
  std::vector<std::pair<std::string, std::size_t>> ranked(presence.begin(), presence.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < ranked.size() && i < top; ++i) out.push_back(ranked[i].first);
  return out;
}

Outputs run_trajectory(StageContext& ctx) {
  const auto& a = ctx.config.analytics;
  EmbeddingSeries series;
  series.matrices = load_matrices(ctx.out / std::string(kAligned.path));
  series.aligned = true;
  std::vector<Trajectory> trajectories;
  for (const auto& kw : tracked_keywords(series.matrices, a.trajectory_keywords, a.trajectory_top)) {
    try {
      trajectories.push_back(build_trajectory(kw, series));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::validation) throw;
      ctx.notes.push_back(e.what());
    }
  }
  // One joint t-SNE fit so all points share a plane.
  std::vector<TrajectoryPoint*> present;
  for (auto& t : trajectories)
    for (auto& p : t.points)
      if (p.vector) present.push_back(&p);
  if (present.size() >= 4) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(present.size()), present.front()->vector->size());
    for (std::size_t i = 0; i < present.size(); ++i) x.row(static_cast<Eigen::Index>(i)) = present[i]->vector->transpose();
    const auto result = tsne_project(x, ctx.config.tsne);
    for (std::size_t i = 0; i < present.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      present[i]->xy = std::array<double, 2>{result.embedding(r, 0), result.embedding(r, 1)};
    }
    if (result.perplexity_lowered)
      ctx.notes.push_back("t-SNE perplexity lowered to " + format_real(result.perplexity_used) + " for " +
                          std::to_string(present.size()) + " points");
  } else {
    ctx.notes.push_back("too few trajectory points for t-SNE; xy left empty");
  }
  std::string csv = "keyword,snapshot,x,y\n";
  for (const auto& t : trajectories)
    for (const auto& p : t.points)
      csv += csv_field(t.keyword) + "," + csv_field(p.label) + "," + (p.xy ? format_real((*p.xy)[0], 12) : "") + "," +
             (p.xy ? format_real((*p.xy)[1], 12) : "") + "\n";
  return {{"analysis/trajectories.json", trajectories_to_json(trajectories)}, {"analysis/trajectories.csv", csv}};
}

Outputs run_neighbors(StageContext& ctx) {
  const auto& a = ctx.config.analytics;
  const auto matrices = load_matrices(ctx.out / std::string(kAligned.path));
  const auto keywords = tracked_keywords(
      matrices, a.neighbor_keywords.empty() ? a.trajectory_keywords : a.neighbor_keywords, a.trajectory_top);
  std::string csv = "snapshot,keyword,rank,neighbor,cosine\n";
  ordered_json j = ordered_json::array();
  for (const auto& kw : keywords) {
    for (const auto& m : matrices) {
      const auto idx = m.index_of(kw);
      if (idx < 0 || m.values.row(idx).norm() == 0.0) continue;
      const auto list = nearest_keywords(m, kw, a.neighbors_k);
      ordered_json arr = ordered_json::array();
      for (std::size_t r = 0; r < list.size(); ++r) {
        csv += csv_field(m.label) + "," + csv_field(kw) + "," + std::to_string(r + 1) + "," +
               csv_field(list[r].keyword) + "," + format_real(list[r].cosine, 12) + "\n";
        arr.push_back({{"keyword", list[r].keyword}, {"cosine", list[r].cosine}});
      }
      j.push_back({{"snapshot", m.label}, {"keyword", kw}, {"neighbors", arr}});
    }
  }
  return {{"analysis/neighbors.csv", csv}, {"analysis/neighbors.json", dump(j)}};
}

// ---------------------------------------------------------------- citation analytics

bool needs_keywords(const RunConfig& c, Stage s) {
  if (s == Stage::diversity) return c.analytics.diversity_level == DiversityLevel::topic;
  if (s == Stage::aoc) return c.analytics.aoc_grouping == AocGrouping::topic_keyword;
  return false;
}

Outputs run_diversity(StageContext& ctx) {
  const auto& a = ctx.config.analytics;
  const auto corpus = load_stage_corpus(ctx, needs_keywords(ctx.config, Stage::diversity));
  DiversityOptions opt;
  opt.aggregation = a.topic_aggregation;
  opt.source = ctx.config.keywords.source;
  opt.topics = a.topics;
  opt.log_base = a.log_base;
  const auto rows = diversity_table(corpus, a.diversity_level, opt);
  const auto level = config_values(ctx.config).at("analytics.diversity_level");
  std::size_t excluded = 0;
  for (const auto& [paper, refs] : references_by_paper(corpus))
    excluded += subject_contributions(refs).excluded_empty_fields;
  if (excluded) ctx.notes.push_back(std::to_string(excluded) + " reference(s) without fields excluded");
  ordered_json j;
  j["level"] = level;
  j["aggregation"] = a.topic_aggregation == TopicAggregation::pooled ? "pooled" : "mean";
  j["log_base"] = a.log_base;
  j["excluded_empty_fields"] = excluded;
  j["rows"] = ordered_json::array();
  for (const auto& r : rows)
    j["rows"].push_back({{"key", r.key},
                         {"papers", r.papers},
                         {"references", r.references},
                         {"subjects", r.subjects},
                         {"simpson", r.scores.simpson},
                         {"shannon", r.scores.shannon},
                         {"gini", r.scores.gini}});
  return {{"analysis/diversity.csv", diversity_to_csv(level, rows)}, {"analysis/diversity.json", dump(j)}};
}

Outputs run_aoc(StageContext& ctx) {
  const auto& a = ctx.config.analytics;
  const auto corpus = load_stage_corpus(ctx, needs_keywords(ctx.config, Stage::aoc));
  const auto report = aoc_distribution(corpus, a.aoc_grouping, AocBinning{a.aoc_bin_width}, a.topics,
                                       ctx.config.keywords.source);
  ordered_json j;
  j["grouping"] = config_values(ctx.config).at("analytics.aoc_grouping");
  j["bin_width"] = a.aoc_bin_width;
  j["negative_aoc"] = report.counters.negative_aoc;
  j["missing_year"] = report.counters.missing_year;
  j["omitted"] = report.omitted;
  j["groups"] = ordered_json::array();
  for (const auto& g : report.groups) {
    ordered_json bins = ordered_json::array();
    for (const auto& b : g.histogram) bins.push_back({{"bin_start", b.start}, {"bin_end", b.end}, {"count", b.count}});
    j["groups"].push_back({{"group", g.group},
                           {"count", g.ages.size()},
                           {"median", g.median},
                           {"q1", g.q1},
                           {"q3", g.q3},
                           {"iqr", g.iqr()},
                           {"histogram", bins}});
  }
  for (const auto& g : report.omitted) ctx.notes.push_back("group '" + g + "' has no valid AoC; omitted");
  if (report.counters.negative_aoc || report.counters.missing_year)
    ctx.notes.push_back(std::to_string(report.counters.negative_aoc) + " negative AoC, " +
                        std::to_string(report.counters.missing_year) + " missing year");
  return {{"analysis/aoc.csv", aoc_histogram_csv(report)},
          {"analysis/aoc_summary.csv", aoc_summary_csv(report)},
          {"analysis/aoc.json", dump(j)}};
}

Outputs run_homophily(StageContext& ctx) {
  const auto corpus = load_stage_corpus(ctx, false);
  const auto mode = ctx.config.analytics.homophily_mode;
  const auto r = homophily_ratio(corpus, mode);
  ordered_json j;
  j["mode"] = config_values(ctx.config).at("analytics.homophily_mode");
  j["matched"] = r.matched;
  j["total"] = r.total;
  j["ratio"] = r.ratio;
  j["matrix"] = ordered_json::object();
  for (const auto& [from, row] : r.matrix)
    for (const auto& [to, n] : row) j["matrix"][from][to] = n;
  return {{"analysis/homophily.csv", homophily_matrix_csv(r, corpus.taxonomy())},
          {"analysis/homophily.json", dump(j)}};
}

Outputs run_communities(StageContext& ctx) {
  const auto corpus = load_stage_corpus(ctx, false);
  const auto graph = citation_graph(corpus);
  if (graph.graph.edges.empty())
    throw Error(ErrorKind::validation, "no in-corpus citations; community detection needs at least one edge");
  const auto p = louvain(graph.graph, ctx.config.analytics.louvain_seed);
  ordered_json j;
  j["nodes"] = graph.graph.nodes;
  j["edges"] = graph.graph.edges.size();
  j["community_count"] = p.community_count;
  j["modularity"] = p.modularity;
  j["level_modularity"] = p.level_modularity;
  j["membership"] = ordered_json::object();
  for (std::size_t i = 0; i < graph.ids.size(); ++i) j["membership"][graph.ids[i]] = p.membership[i];
  ctx.notes.push_back(std::to_string(p.community_count) + " communities, Q = " + format_real(p.modularity, 6));
  return {{"analysis/communities.csv", communities_csv(graph, p)},
          {"analysis/community_edges.csv", community_edges_csv(graph, p)},
          {"analysis/communities.json", dump(j)}};
}

Outputs run_stats(StageContext& ctx) {
  const bool with_keywords = fs::exists(ctx.out / std::string(kKeywords.path));
  const auto corpus = load_stage_corpus(ctx, with_keywords);
  const auto j = stats_to_json(corpus_stats(corpus));
  std::string csv = "metric,value\n";
  const auto flat = j.flatten();
  for (const auto& item : flat.items()) {
    const auto& v = item.value();
    csv += csv_field(item.key()) + "," +
           csv_field(v.is_string() ? v.get<std::string>() : v.is_number_float() ? format_real(v.get<double>(), 12)
                                                                                : v.dump()) +
           "\n";
  }
  return {{"analysis/stats.csv", csv}, {"analysis/stats.json", dump(j)}};
}

// ---------------------------------------------------------------- report

constexpr std::pair<ReportKind, Stage> kReportSources[] = {
    {ReportKind::ranks, Stage::rank},           {ReportKind::trajectories, Stage::trajectory},
    {ReportKind::neighbors, Stage::neighbors},  {ReportKind::diversity, Stage::diversity},
    {ReportKind::aoc, Stage::aoc},              {ReportKind::homophily, Stage::homophily},
    {ReportKind::communities, Stage::communities}, {ReportKind::stats, Stage::stats},
};

Outputs run_report(StageContext& ctx) {
  const auto& r = ctx.config.report;
  std::vector<ReportKind> kinds;
  if (r.kinds.empty()) {
    for (const auto& [kind, stage] : kReportSources)
      if (fs::exists(ctx.out / "analysis" / (std::string(report_kind_name(kind)) + ".json"))) kinds.push_back(kind);
  } else {
    for (const auto& k : r.kinds) kinds.push_back(parse_report_kind(k));
  }
  Outputs outputs;
  for (auto kind : kinds) {
    const auto supported = supported_formats(kind);
    for (const auto& f : r.formats) {
      const auto format = parse_report_format(f);
      if (std::find(supported.begin(), supported.end(), format) == supported.end()) {
        ctx.notes.push_back(std::string(report_kind_name(kind)) + ": no " + f + " rendering");
        continue;
      }
      const auto path = emit_report(ctx.out, kind, format);
      outputs[fs::relative(path, ctx.out).generic_string()] = read_text_file(path);
    }
  }
  return outputs;
}

std::vector<Input> report_inputs(const RunConfig& c) {
  std::vector<Input> in;
  const fs::path out = c.paths.output_dir;
  for (const auto& [kind, stage] : kReportSources) {
    const std::string base = "analysis/" + std::string(report_kind_name(kind));
    const bool wanted = c.report.kinds.empty() ||
                        std::find(c.report.kinds.begin(), c.report.kinds.end(), report_kind_name(kind)) != c.report.kinds.end();
    if (!wanted) continue;
    for (const char* ext : {".json", ".csv"})
      in.push_back({base + ext, out / (base + ext), Artifact{report_kind_name(kind), "", stage}, c.report.kinds.empty()});
  }
  return in;
}

std::vector<std::string> keys_with_prefix(const RunConfig& c, std::string_view prefix) {
  std::vector<std::string> keys;
  for (const auto& [k, v] : config_values(c))
    if (k.rfind(prefix, 0) == 0) keys.push_back(k);
  return keys;
}

StageSpec spec_for(Stage stage, const RunConfig& c) {
  const fs::path out = c.paths.output_dir;
  switch (stage) {
    case Stage::harvest:
      return {{}, keys_with_prefix(c, "harvest."), std::nullopt, run_harvest};
    case Stage::ingest: {
      auto in = taxonomy_inputs(c);
      if (c.paths.papers.empty()) {
        in.push_back(artifact_input(out, kHarvestPapers));
        in.push_back({"raw/citations.jsonl", out / "raw/citations.jsonl", std::nullopt, true});
      } else {
        in.push_back({"papers", c.paths.papers, std::nullopt, false});
        if (!c.paths.citations.empty()) in.push_back({"citations", c.paths.citations, std::nullopt, false});
      }
      return {in, {}, std::nullopt, run_ingest};
    }
    case Stage::keywords: {
      auto in = taxonomy_inputs(c);
      in.push_back(artifact_input(out, kCorpus));
      if (!c.paths.stopwords.empty()) in.push_back({"stopwords", c.paths.stopwords, std::nullopt, false});
      return {in, {"keywords.command", "keywords.extractor", "keywords.overwrite"}, std::nullopt, run_keywords};
    }
    case Stage::snapshot: {
      auto in = corpus_inputs(c, false);
      return {in, keys_with_prefix(c, "partition."), std::nullopt, run_snapshot};
    }
    case Stage::rank: {
      auto in = corpus_inputs(c, true);
      in.push_back(artifact_input(out, kPartition));
      return {in, {"keywords.source", "keywords.top_k"}, std::nullopt, run_rank};
    }
    case Stage::cooccur: {
      auto in = corpus_inputs(c, true);
      in.push_back(artifact_input(out, kPartition));
      return {in, {"keywords.min_count", "keywords.source"}, std::nullopt, run_cooccur};
    }
    case Stage::embed:
      return {{artifact_input(out, kCooccurrence)}, keys_with_prefix(c, "embedding."), c.embedding.seed, run_embed};
    case Stage::align:
      return {{artifact_input(out, kEmbeddings)}, {}, std::nullopt, run_align};
    case Stage::trajectory: {
      auto keys = keys_with_prefix(c, "tsne.");
      keys.push_back("analytics.trajectory_keywords");
      keys.push_back("analytics.trajectory_top");
      return {{artifact_input(out, kAligned)}, keys, c.tsne.seed, run_trajectory};
    }
    case Stage::neighbors:
      return {{artifact_input(out, kAligned)},
              {"analytics.neighbor_keywords", "analytics.neighbors_k", "analytics.trajectory_keywords",
               "analytics.trajectory_top"},
              std::nullopt,
              run_neighbors};
    case Stage::diversity:
      return {corpus_inputs(c, needs_keywords(c, stage)),
              {"analytics.diversity_level", "analytics.log_base", "analytics.topic_aggregation", "analytics.topics",
               "keywords.source"},
              std::nullopt,
              run_diversity};
    case Stage::aoc:
      return {corpus_inputs(c, needs_keywords(c, stage)),
              {"analytics.aoc_bin_width", "analytics.aoc_grouping", "analytics.topics", "keywords.source"},
              std::nullopt,
              run_aoc};
    case Stage::homophily:
      return {corpus_inputs(c, false), {"analytics.homophily_mode"}, std::nullopt, run_homophily};
    case Stage::communities:
      return {corpus_inputs(c, false), {"analytics.louvain_seed"}, c.analytics.louvain_seed, run_communities};
    case Stage::stats: {
      auto in = corpus_inputs(c, false);
      in.push_back({std::string(kKeywords.path), out / std::string(kKeywords.path), std::nullopt, true});
      return {in, {}, std::nullopt, run_stats};
    }
    case Stage::report:
      return {report_inputs(c), keys_with_prefix(c, "report."), std::nullopt, run_report};
  }
  throw Error(ErrorKind::internal, "unhandled stage");
}

}  // namespace

Stage parse_stage(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kStageNames); ++i)
    if (kStageNames[i] == name) return static_cast<Stage>(i);
  throw Error(ErrorKind::invalid_argument, "unknown stage '" + std::string(name) + "'");
}

std::string_view stage_name(Stage stage) { return kStageNames[static_cast<std::size_t>(stage)]; }

std::vector<Stage> default_stages() {
  std::vector<Stage> out;
  for (std::size_t i = 1; i < std::size(kStageNames); ++i) out.push_back(static_cast<Stage>(i));
  return out;
}

std::vector<StageOutcome> run_pipeline(const RunConfig& config, std::span<const Stage> stages,
                                       const PipelineOptions& options) {
  validate_config(config);
  std::vector<StageOutcome> outcomes;
  for (Stage s : stages) outcomes.push_back(execute(s, spec_for(s, config), config, options));
  return outcomes;
}

}  // namespace scitrace
