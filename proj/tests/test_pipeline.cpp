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


#include "doctest.h"
#include "scitrace/pipeline.hpp"
#include "support.hpp"

using namespace scitrace;
namespace fs = std::filesystem;

namespace {

RunConfig synthetic(const fs::path& out) {
  auto c = load_config(testing::data_dir() / "synthetic/config.ini");
  c.paths.output_dir = out;
  return c;
}

std::map<std::string, std::string> snapshot_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = read_text_file(e.path());
  return files;
}

}  // namespace

TEST_CASE("config loading and overrides") {
  auto c = load_config(testing::data_dir() / "synthetic/config.ini");
  CHECK(c.paths.papers == testing::data_dir() / "synthetic/papers.jsonl");
  CHECK(c.embedding.seed == 42);
  CHECK(c.keywords.min_count == 2);
  apply_override(c, "embedding.seed=7");
  CHECK(c.embedding.seed == 7);
  set_config_value(c, "embedding.dims", "12");
  auto values = config_values(c);
  CHECK(values.at("embedding.seed") == "7");
  CHECK(values.count("tsne.perplexity") == 1);

  RunConfig d;
  CHECK(d.embedding.training.epochs == 50);
  CHECK(d.embedding.training.learning_rate == 0.01);
  CHECK(d.embedding.training.negative_ratio == 1.0);
  CHECK(d.tsne.perplexity == 30.0);
  CHECK(d.tsne.iterations == 1000);

  CHECK_THROWS_WITH_AS(apply_override(c, "embedding.seed=abc"), doctest::Contains("embedding.seed"), Error);
  CHECK_THROWS_WITH_AS(apply_override(c, "nope.key=1"), doctest::Contains("unknown key"), Error);
  CHECK_THROWS_AS(apply_override(c, "no equals sign"), Error);
  RunConfig bad;
  bad.tsne.perplexity = -1;
  CHECK_THROWS_WITH_AS(validate_config(bad), doctest::Contains("tsne.perplexity"), Error);
}

TEST_CASE("stage and report names") {
  CHECK(parse_stage("cooccur") == Stage::cooccur);
  CHECK(stage_name(Stage::aoc) == "aoc");
  CHECK_THROWS_AS(parse_stage("dance"), Error);
  CHECK(default_stages().front() == Stage::ingest);
  CHECK(parse_report_kind("ranks") == ReportKind::ranks);
  CHECK_THROWS_AS(parse_report_kind("everything"), Error);
  CHECK(supported_formats(ReportKind::homophily).size() == 2);
  CHECK(supported_formats(ReportKind::ranks).size() == 3);
}

TEST_CASE("a stage without its prerequisite names the stage to run") {
  testing::TempDir dir("prereq");
  auto c = synthetic(dir.path());
  std::vector<Stage> embed{Stage::embed};
  try {
    run_pipeline(c, embed);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::missing_prerequisite);
    CHECK(std::string(e.what()).rfind("missing artifact: cooccurrence", 0) == 0);
  }
}

TEST_CASE("full run, no-op rerun and reports") {
  testing::TempDir dir("full");
  auto c = synthetic(dir.path());
  auto first = run_pipeline(c, default_stages());
  CHECK(first.size() == default_stages().size());
  for (const auto& o : first) CHECK_FALSE(o.skipped);
  for (const char* rel : {"analysis/ranks.csv", "analysis/trajectories.json", "analysis/neighbors.csv",
                          "analysis/diversity.csv", "analysis/aoc.csv", "analysis/homophily.csv",
                          "analysis/communities.csv", "analysis/stats.json", "aligned/rotations.json"})
    CHECK_MESSAGE(fs::exists(dir / rel), rel);
  auto before = snapshot_tree(dir.path());

  auto second = run_pipeline(c, default_stages());
  for (const auto& o : second) CHECK(o.skipped);
  CHECK(snapshot_tree(dir.path()) == before);

  // A changed seed reruns embed and everything downstream of it, nothing upstream.
  auto changed = c;
  changed.embedding.seed = 43;
  auto third = run_pipeline(changed, default_stages());
  std::map<Stage, bool> skipped;
  for (const auto& o : third) skipped[o.stage] = o.skipped;
  CHECK(skipped[Stage::cooccur]);
  CHECK_FALSE(skipped[Stage::embed]);
  CHECK(skipped[Stage::homophily]);

  auto ranks = emit_report(dir.path(), ReportKind::ranks, ReportFormat::csv);
  CHECK(read_text_file(ranks).rfind("snapshot,keyword,frequency,rank\n", 0) == 0);
  auto traj = nlohmann::json::parse(read_text_file(emit_report(dir.path(), ReportKind::trajectories, ReportFormat::json)));
  REQUIRE(traj.is_array());
  REQUIRE_FALSE(traj.empty());
  CHECK(traj[0].contains("keyword"));
  CHECK(traj[0]["points"][0].contains("label"));
  CHECK(traj[0]["points"][0].contains("xy"));
  auto svg = read_text_file(emit_report(dir.path(), ReportKind::aoc, ReportFormat::svg));
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK_THROWS_WITH_AS(emit_report(dir.path(), ReportKind::homophily, ReportFormat::svg),
                       doctest::Contains("csv, json"), Error);
}

TEST_CASE("manifests do not depend on the output directory") {
  testing::TempDir a("det-a"), b("det-b");
  run_pipeline(synthetic(a.path()), default_stages());
  run_pipeline(synthetic(b.path()), default_stages());
  CHECK(snapshot_tree(a.path()) == snapshot_tree(b.path()));
}

TEST_CASE("svg helpers produce standalone documents") {
  std::vector<SvgSeries> s{{"kw", {{0, 3}, {1, 1}, {2, 2}}}};
  std::vector<std::string> ticks{"a", "b", "c"};
  auto line = svg_line_plot("ranks", "snapshot", "rank", ticks, s, true);
  CHECK(line.find("</svg>") != std::string::npos);
  CHECK(line.find("kw") != std::string::npos);
  std::vector<HistogramBin> bins{{0, 1, 3}, {1, 2, 0}, {2, 3, 5}};
  CHECK(svg_histogram("aoc", bins).find("<rect") != std::string::npos);
  CHECK(svg_scatter_plot("t", s).find("<circle") != std::string::npos);
}
