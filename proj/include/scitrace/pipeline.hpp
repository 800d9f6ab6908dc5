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

#ifndef SCITRACE_PIPELINE_HPP
#define SCITRACE_PIPELINE_HPP

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scitrace/analytics.hpp"
#include "scitrace/gcn.hpp"
#include "scitrace/keywords.hpp"
#include "scitrace/tsne.hpp"

namespace scitrace {

/// Library version recorded in every manifest.
std::string_view library_version();

struct RunConfig {
  struct Paths {
    std::filesystem::path papers;     // empty: ingest the harvested records
    std::filesystem::path citations;  // empty: harvested citations, if any
    std::filesystem::path taxonomy;   // empty: shipped taxonomy
    std::filesystem::path stopwords;  // empty: shipped list
    std::filesystem::path output_dir = "out";
  } paths;

  struct Partition {
    std::string preset = "period";  // period | yearly | explicit
    int first_year = 1991;
    int end_year = 2025;
    std::vector<Date> boundaries;  // explicit only
    std::vector<std::string> labels;
  } partition;

  struct Keywords {
    std::string extractor = "fallback";  // fallback | command | keep
    std::string command;
    bool overwrite = false;  // re-extract papers that already carry keywords
    KeywordSource source = KeywordSource::title;
    std::size_t min_count = 3;
    std::size_t top_k = 100;
  } keywords;

  struct Embedding {
    TrainingConfig training;
    std::uint64_t seed = 42;
  } embedding;

  TsneConfig tsne{.seed = 7};

  struct Analytics {
    std::vector<std::string> trajectory_keywords;  // empty: most persistent keywords
    std::size_t trajectory_top = 5;
    std::vector<std::string> neighbor_keywords;  // empty: same as trajectories
    std::size_t neighbors_k = 10;
    DiversityLevel diversity_level = DiversityLevel::group;
    TopicAggregation topic_aggregation = TopicAggregation::pooled;
    std::vector<std::string> topics;
    double log_base = std::numbers::e;
    AocGrouping aoc_grouping = AocGrouping::subject_group;
    double aoc_bin_width = 1.0;
    HomophilyMode homophily_mode = HomophilyMode::primary_group;
    std::uint64_t louvain_seed = 1;
  } analytics;

  struct Harvest {
    std::string query;
    std::optional<Date> from;
    std::optional<Date> to;
    std::string arxiv_endpoint = "https://export.arxiv.org/api/query";
    std::string citation_endpoint = "https://api.semanticscholar.org/graph/v1/paper/batch";
    std::size_t page_size = 100;
    std::optional<std::size_t> max_pages;
    double min_interval = 3.0;
    std::size_t max_batch = 100;
    bool citations = true;
    bool offline = false;
    std::filesystem::path fixtures;  // replay directory for offline mode
    std::filesystem::path record;    // record live responses here
  } harvest;

  struct Report {
    std::vector<std::string> kinds;    // empty: every kind with an artifact
    std::vector<std::string> formats = {"csv", "json"};
  } report;
};

/// Sets "section.key" from text. Unknown keys and unparsable values are
/// Error(validation) naming the field path. Relative paths resolve against base_dir.
void set_config_value(RunConfig& config, std::string_view field, std::string_view value,
                      const std::filesystem::path& base_dir = {});
/// "section.key=value"
void apply_override(RunConfig& config, std::string_view assignment);
/// INI file with the sections above; relative paths resolve against the file's directory.
RunConfig load_config(const std::filesystem::path& path);
/// Every field as "section.key" -> canonical text.
std::map<std::string, std::string> config_values(const RunConfig& config);
/// Checks cross-field constraints; throws Error(validation) with field paths.
void validate_config(const RunConfig& config);

enum class Stage {
  harvest,
  ingest,
  keywords,
  snapshot,
  rank,
  cooccur,
  embed,
  align,
  trajectory,
  neighbors,
  diversity,
  aoc,
  homophily,
  communities,
  stats,
  report,
};

Stage parse_stage(std::string_view name);
std::string_view stage_name(Stage stage);
/// Stages of a full offline run, in order (harvest excluded).
std::vector<Stage> default_stages();

struct StageOutcome {
  Stage stage;
  bool skipped = false;  // manifest matched; nothing rewritten
  std::vector<std::string> outputs;
  std::vector<std::string> notes;
};

struct PipelineOptions {
  std::function<void(std::string_view)> log;
};

/// Runs the stages in order. Each writes its artifacts atomically plus
/// manifests/<stage>.json; a stage whose inputs, config and outputs match its
/// manifest is skipped. A missing input is Error(missing_prerequisite)
/// "missing artifact: <name>".
std::vector<StageOutcome> run_pipeline(const RunConfig& config, std::span<const Stage> stages,
                                       const PipelineOptions& options = {});

// ---------------------------------------------------------------- reports

enum class ReportKind { ranks, trajectories, neighbors, diversity, aoc, homophily, communities, stats };
enum class ReportFormat { csv, json, svg };

ReportKind parse_report_kind(std::string_view name);
std::string_view report_kind_name(ReportKind kind);
ReportFormat parse_report_format(std::string_view name);
std::string_view report_format_name(ReportFormat format);
std::vector<ReportFormat> supported_formats(ReportKind kind);

/// Renders one report from the analysis artifacts under output_dir into
/// output_dir/reports/<kind>.<format> and returns that path.
std::filesystem::path emit_report(const std::filesystem::path& output_dir, ReportKind kind, ReportFormat format);

struct SvgSeries {
  std::string name;
  std::vector<std::array<double, 2>> points;
};

std::string svg_line_plot(std::string_view title, std::string_view x_label, std::string_view y_label,
                          std::span<const std::string> x_ticks, std::span<const SvgSeries> series, bool invert_y);
std::string svg_scatter_plot(std::string_view title, std::span<const SvgSeries> series);
std::string svg_histogram(std::string_view title, std::span<const HistogramBin> bins);

}  // namespace scitrace

#endif  // SCITRACE_PIPELINE_HPP
