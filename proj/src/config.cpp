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

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <functional>

#include "scitrace/pipeline.hpp"

namespace scitrace {

namespace {

namespace fs = std::filesystem;

[[noreturn]] void bad_value(std::string_view field, std::string_view expected, std::string_view value) {
  throw Error(ErrorKind::validation, "config " + std::string(field) + ": expected " + std::string(expected) +
                                         ", got '" + std::string(value) + "'");
}

std::uint64_t to_u64(std::string_view field, std::string_view text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) bad_value(field, "a non-negative integer", text);
  return v;
}

std::size_t to_size(std::string_view field, std::string_view text) {
  return static_cast<std::size_t>(to_u64(field, text));
}

int to_int(std::string_view field, std::string_view text) {
  const std::string t = trim(text);
  int v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) bad_value(field, "an integer", text);
  return v;
}

double to_double(std::string_view field, std::string_view text) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v)) bad_value(field, "a number", text);
  return v;
}

bool to_bool(std::string_view field, std::string_view text) {
  const auto t = to_lower_ascii(trim(text));
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  bad_value(field, "true or false", text);
}

std::vector<std::string> to_list(std::string_view text) {
  std::vector<std::string> out;
  for (auto& part : split(text, ','))
    if (auto t = trim(part); !t.empty()) out.push_back(std::move(t));
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
  return out;
}

Date to_date(std::string_view field, std::string_view text) {
  auto d = Date::try_parse(text);
  if (!d) bad_value(field, "a YYYY-MM-DD date", text);
  return *d;
}

fs::path to_path(std::string_view text, const fs::path& base) {
  const std::string t = trim(text);
  if (t.empty()) return {};
  fs::path p(t);
  return (p.is_relative() && !base.empty()) ? base / p : p;
}

template <typename F>
auto parse_enum(std::string_view field, std::string_view text, F parse) {
  try {
    return parse(trim(text));
  } catch (const Error& e) {
    throw Error(ErrorKind::validation, "config " + std::string(field) + ": " + e.what());
  }
}

std::string real(double v) { return format_real(v, 17); }

std::string_view level_name(DiversityLevel l) {
  switch (l) {
    case DiversityLevel::paper: return "paper";
    case DiversityLevel::group: return "group";
    case DiversityLevel::topic: return "topic";
  }
  return "";
}

struct Field {
  std::string name;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, std::string_view, const fs::path&)> set;
};

#define SCT_FIELD(NAME, GET, SET)                                                               \
  Field {                                                                                       \
    NAME, [](const RunConfig& c) -> std::string { return GET; },                                \
        [](RunConfig& c, std::string_view v, [[maybe_unused]] const fs::path& base) { SET; }    \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      SCT_FIELD("paths.papers", c.paths.papers.string(), c.paths.papers = to_path(v, base)),
      SCT_FIELD("paths.citations", c.paths.citations.string(), c.paths.citations = to_path(v, base)),
      SCT_FIELD("paths.taxonomy", c.paths.taxonomy.string(), c.paths.taxonomy = to_path(v, base)),
      SCT_FIELD("paths.stopwords", c.paths.stopwords.string(), c.paths.stopwords = to_path(v, base)),
      SCT_FIELD("paths.output_dir", c.paths.output_dir.string(), c.paths.output_dir = to_path(v, base)),

      SCT_FIELD("partition.preset", c.partition.preset, c.partition.preset = trim(v)),
      SCT_FIELD("partition.first_year", std::to_string(c.partition.first_year),
                c.partition.first_year = to_int("partition.first_year", v)),
      SCT_FIELD("partition.end_year", std::to_string(c.partition.end_year),
                c.partition.end_year = to_int("partition.end_year", v)),
      SCT_FIELD("partition.boundaries",
                [&] {
                  std::vector<std::string> s;
                  for (const auto& d : c.partition.boundaries) s.push_back(d.iso());
                  return join(s);
                }(),
                c.partition.boundaries.clear();
                for (const auto& s : to_list(v)) c.partition.boundaries.push_back(to_date("partition.boundaries", s))),
      SCT_FIELD("partition.labels", join(c.partition.labels), c.partition.labels = to_list(v)),

      SCT_FIELD("keywords.extractor", c.keywords.extractor, c.keywords.extractor = trim(v)),
      SCT_FIELD("keywords.command", c.keywords.command, c.keywords.command = trim(v)),
      SCT_FIELD("keywords.overwrite", c.keywords.overwrite ? "true" : "false",
                c.keywords.overwrite = to_bool("keywords.overwrite", v)),
      SCT_FIELD("keywords.source", std::string(to_string(c.keywords.source)),
                c.keywords.source = parse_enum("keywords.source", v, parse_keyword_source)),
      SCT_FIELD("keywords.min_count", std::to_string(c.keywords.min_count),
                c.keywords.min_count = to_size("keywords.min_count", v)),
      SCT_FIELD("keywords.top_k", std::to_string(c.keywords.top_k), c.keywords.top_k = to_size("keywords.top_k", v)),

      SCT_FIELD("embedding.input_dim", std::to_string(c.embedding.training.dims.input),
                c.embedding.training.dims.input = to_size("embedding.input_dim", v)),
      SCT_FIELD("embedding.hidden_dim", std::to_string(c.embedding.training.dims.hidden),
                c.embedding.training.dims.hidden = to_size("embedding.hidden_dim", v)),
      SCT_FIELD("embedding.output_dim", std::to_string(c.embedding.training.dims.output),
                c.embedding.training.dims.output = to_size("embedding.output_dim", v)),
      SCT_FIELD("embedding.epochs", std::to_string(c.embedding.training.epochs),
                c.embedding.training.epochs = to_size("embedding.epochs", v)),
      SCT_FIELD("embedding.learning_rate", real(c.embedding.training.learning_rate),
                c.embedding.training.learning_rate = to_double("embedding.learning_rate", v)),
      SCT_FIELD("embedding.beta1", real(c.embedding.training.beta1),
                c.embedding.training.beta1 = to_double("embedding.beta1", v)),
      SCT_FIELD("embedding.beta2", real(c.embedding.training.beta2),
                c.embedding.training.beta2 = to_double("embedding.beta2", v)),
      SCT_FIELD("embedding.negative_ratio", real(c.embedding.training.negative_ratio),
                c.embedding.training.negative_ratio = to_double("embedding.negative_ratio", v)),
      SCT_FIELD("embedding.input_std", real(c.embedding.training.input_std),
                c.embedding.training.input_std = to_double("embedding.input_std", v)),
      SCT_FIELD("embedding.seed", std::to_string(c.embedding.seed), c.embedding.seed = to_u64("embedding.seed", v)),

      SCT_FIELD("tsne.perplexity", real(c.tsne.perplexity), c.tsne.perplexity = to_double("tsne.perplexity", v)),
      SCT_FIELD("tsne.iterations", std::to_string(c.tsne.iterations),
                c.tsne.iterations = to_size("tsne.iterations", v)),
      SCT_FIELD("tsne.learning_rate", real(c.tsne.learning_rate),
                c.tsne.learning_rate = to_double("tsne.learning_rate", v)),
      SCT_FIELD("tsne.exaggeration", real(c.tsne.exaggeration),
                c.tsne.exaggeration = to_double("tsne.exaggeration", v)),
      SCT_FIELD("tsne.exaggeration_iterations", std::to_string(c.tsne.exaggeration_iterations),
                c.tsne.exaggeration_iterations = to_size("tsne.exaggeration_iterations", v)),
      SCT_FIELD("tsne.seed", std::to_string(c.tsne.seed), c.tsne.seed = to_u64("tsne.seed", v)),

      SCT_FIELD("analytics.trajectory_keywords", join(c.analytics.trajectory_keywords),
                c.analytics.trajectory_keywords = to_list(v)),
      SCT_FIELD("analytics.trajectory_top", std::to_string(c.analytics.trajectory_top),
                c.analytics.trajectory_top = to_size("analytics.trajectory_top", v)),
      SCT_FIELD("analytics.neighbor_keywords", join(c.analytics.neighbor_keywords),
                c.analytics.neighbor_keywords = to_list(v)),
      SCT_FIELD("analytics.neighbors_k", std::to_string(c.analytics.neighbors_k),
                c.analytics.neighbors_k = to_size("analytics.neighbors_k", v)),
      SCT_FIELD("analytics.diversity_level", std::string(level_name(c.analytics.diversity_level)),
                c.analytics.diversity_level = parse_enum("analytics.diversity_level", v, parse_diversity_level)),
      SCT_FIELD("analytics.topic_aggregation",
                c.analytics.topic_aggregation == TopicAggregation::pooled ? "pooled" : "mean",
                c.analytics.topic_aggregation =
                    parse_enum("analytics.topic_aggregation", v, parse_topic_aggregation)),
      SCT_FIELD("analytics.topics", join(c.analytics.topics), c.analytics.topics = to_list(v)),
      SCT_FIELD("analytics.log_base", real(c.analytics.log_base),
                c.analytics.log_base = to_double("analytics.log_base", v)),
      SCT_FIELD("analytics.aoc_grouping",
                c.analytics.aoc_grouping == AocGrouping::subject_group ? "subject_group" : "topic_keyword",
                c.analytics.aoc_grouping = parse_enum("analytics.aoc_grouping", v, parse_aoc_grouping)),
      SCT_FIELD("analytics.aoc_bin_width", real(c.analytics.aoc_bin_width),
                c.analytics.aoc_bin_width = to_double("analytics.aoc_bin_width", v)),
      SCT_FIELD("analytics.homophily_mode",
                c.analytics.homophily_mode == HomophilyMode::primary_group ? "primary_group" : "any_shared_group",
                c.analytics.homophily_mode = parse_enum("analytics.homophily_mode", v, parse_homophily_mode)),
      SCT_FIELD("analytics.louvain_seed", std::to_string(c.analytics.louvain_seed),
                c.analytics.louvain_seed = to_u64("analytics.louvain_seed", v)),

      SCT_FIELD("harvest.query", c.harvest.query, c.harvest.query = trim(v)),
      SCT_FIELD("harvest.from", c.harvest.from ? c.harvest.from->iso() : "",
                if (trim(v).empty()) c.harvest.from.reset(); else c.harvest.from = to_date("harvest.from", v)),
      SCT_FIELD("harvest.to", c.harvest.to ? c.harvest.to->iso() : "",
                if (trim(v).empty()) c.harvest.to.reset(); else c.harvest.to = to_date("harvest.to", v)),
      SCT_FIELD("harvest.arxiv_endpoint", c.harvest.arxiv_endpoint, c.harvest.arxiv_endpoint = trim(v)),
      SCT_FIELD("harvest.citation_endpoint", c.harvest.citation_endpoint, c.harvest.citation_endpoint = trim(v)),
      SCT_FIELD("harvest.page_size", std::to_string(c.harvest.page_size),
                c.harvest.page_size = to_size("harvest.page_size", v)),
      SCT_FIELD("harvest.max_pages", c.harvest.max_pages ? std::to_string(*c.harvest.max_pages) : "",
                if (trim(v).empty()) c.harvest.max_pages.reset();
                else c.harvest.max_pages = to_size("harvest.max_pages", v)),
      SCT_FIELD("harvest.min_interval", real(c.harvest.min_interval),
                c.harvest.min_interval = to_double("harvest.min_interval", v)),
      SCT_FIELD("harvest.max_batch", std::to_string(c.harvest.max_batch),
                c.harvest.max_batch = to_size("harvest.max_batch", v)),
      SCT_FIELD("harvest.citations", c.harvest.citations ? "true" : "false",
                c.harvest.citations = to_bool("harvest.citations", v)),
      SCT_FIELD("harvest.offline", c.harvest.offline ? "true" : "false",
                c.harvest.offline = to_bool("harvest.offline", v)),
      SCT_FIELD("harvest.fixtures", c.harvest.fixtures.string(), c.harvest.fixtures = to_path(v, base)),
      SCT_FIELD("harvest.record", c.harvest.record.string(), c.harvest.record = to_path(v, base)),

      SCT_FIELD("report.kinds", join(c.report.kinds), c.report.kinds = to_list(v)),
      SCT_FIELD("report.formats", join(c.report.formats), c.report.formats = to_list(v)),
  };
  return table;
}

#undef SCT_FIELD

}  // namespace

void set_config_value(RunConfig& config, std::string_view field, std::string_view value, const fs::path& base_dir) {
  // "embedding.dims" sets all three layer widths at once.
  if (field == "embedding.dims") {
    const auto d = to_size(field, value);
    config.embedding.training.dims = {d, d, d};
    return;
  }
  for (const auto& f : fields()) {
    if (f.name == field) {
      f.set(config, value, base_dir);
      return;
    }
  }
  throw Error(ErrorKind::validation, "config: unknown key '" + std::string(field) + "'");
}

void apply_override(RunConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw Error(ErrorKind::validation, "override '" + std::string(assignment) + "' is not section.key=value");
  set_config_value(config, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

RunConfig load_config(const fs::path& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorKind::validation, "config " + path.string() + ": " + e.message() + " (line " +
                                           std::to_string(e.line()) + ")");
  }
  RunConfig config;
  const auto base = path.parent_path();
  for (const auto& [section, keys] : tree) {
    if (keys.empty() && !keys.data().empty())
      throw Error(ErrorKind::validation, "config: key '" + section + "' outside any section");
    for (const auto& [key, value] : keys) set_config_value(config, section + "." + key, value.data(), base);
  }
  return config;
}

std::map<std::string, std::string> config_values(const RunConfig& config) {
  std::map<std::string, std::string> out;
  for (const auto& f : fields()) out[f.name] = f.get(config);
  return out;
}

void validate_config(const RunConfig& c) {
  auto fail = [](const std::string& field, const std::string& why) {
    throw Error(ErrorKind::validation, "config " + field + ": " + why);
  };
  const auto& p = c.partition;
  if (p.preset != "period" && p.preset != "yearly" && p.preset != "explicit")
    fail("partition.preset", "expected period, yearly or explicit");
  if (p.preset == "yearly" && p.end_year <= p.first_year) fail("partition.end_year", "must exceed first_year");
  if (p.preset == "explicit") {
    if (p.boundaries.size() < 2) fail("partition.boundaries", "needs at least two dates");
    for (std::size_t i = 1; i < p.boundaries.size(); ++i)
      if (!(p.boundaries[i - 1] < p.boundaries[i])) fail("partition.boundaries", "must be strictly increasing");
    if (!p.labels.empty() && p.labels.size() + 1 != p.boundaries.size())
      fail("partition.labels", "needs one label per window");
  }
  const auto& k = c.keywords;
  if (k.extractor != "fallback" && k.extractor != "command" && k.extractor != "keep")
    fail("keywords.extractor", "expected fallback, command or keep");
  if (k.extractor == "command" && k.command.empty()) fail("keywords.command", "required by the command extractor");
  if (k.min_count == 0) fail("keywords.min_count", "must be at least 1");
  const auto& t = c.embedding.training;
  if (t.dims.input == 0 || t.dims.hidden == 0 || t.dims.output == 0) fail("embedding.dims", "must be positive");
  if (t.epochs == 0) fail("embedding.epochs", "must be positive");
  if (!(t.learning_rate > 0)) fail("embedding.learning_rate", "must be positive");
  if (!(t.negative_ratio > 0)) fail("embedding.negative_ratio", "must be positive");
  if (!(c.tsne.perplexity > 0)) fail("tsne.perplexity", "must be positive");
  if (c.tsne.iterations == 0) fail("tsne.iterations", "must be positive");
  if (!(c.analytics.log_base > 1)) fail("analytics.log_base", "must exceed 1");
  if (!(c.analytics.aoc_bin_width > 0)) fail("analytics.aoc_bin_width", "must be positive");
  if (c.analytics.diversity_level == DiversityLevel::topic && c.analytics.topics.empty())
    fail("analytics.topics", "required for topic-level diversity");
  if (c.analytics.aoc_grouping == AocGrouping::topic_keyword && c.analytics.topics.empty())
    fail("analytics.topics", "required for topic AoC grouping");
  if (c.harvest.page_size == 0) fail("harvest.page_size", "must be positive");
  if (c.harvest.max_batch == 0 || c.harvest.max_batch > 500) fail("harvest.max_batch", "must be in 1..500");
  if (c.harvest.min_interval < 0) fail("harvest.min_interval", "must be non-negative");
  if (c.harvest.from && c.harvest.to && *c.harvest.to < *c.harvest.from)
    fail("harvest.to", "precedes harvest.from");
  for (const auto& kind : c.report.kinds) parse_enum("report.kinds", kind, parse_report_kind);
  for (const auto& f : c.report.formats) parse_enum("report.formats", f, parse_report_format);
}

}  // namespace scitrace
