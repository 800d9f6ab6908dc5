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

#include "scitrace/snapshot.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace scitrace {

namespace {

Date jan1(int year) { return Date{year, 1, 1}; }

std::string derive_label(const Date& start, const Date& end) {
  if (start.month == 1 && start.day == 1 && end.month == 1 && end.day == 1) {
    if (end.year - start.year == 1) return std::to_string(start.year);
    return std::to_string(start.year) + "-" + std::to_string(end.year - 1);
  }
  return start.iso() + ".." + end.iso();
}

}  // namespace

PartitionScheme period_preset() {
  PartitionScheme s;
  s.boundaries = {jan1(1900), jan1(1995), jan1(2005), jan1(2015), jan1(2018),
                  jan1(2020), jan1(2022), jan1(2024), jan1(2100)};
  s.labels = {"~1994",     "1995-2004", "2005-2014", "2015-2017",
              "2018-2019", "2020-2021", "2022-2023", "2024~"};
  return s;
}

PartitionScheme yearly_preset(int first_year, int end_year) {
  if (end_year <= first_year)
    throw Error(ErrorKind::invalid_argument, "yearly preset needs end_year > first_year");
  PartitionScheme s;
  for (int y = first_year; y <= end_year; ++y) s.boundaries.push_back(jan1(y));
  return s;
}

TimePartition partition_by_time(const Corpus& corpus, const PartitionScheme& scheme) {
  const auto& b = scheme.boundaries;
  if (b.size() < 2) throw Error(ErrorKind::invalid_argument, "partition needs at least two boundaries");
  for (std::size_t i = 1; i < b.size(); ++i)
    if (!(b[i - 1] < b[i]))
      throw Error(ErrorKind::invalid_argument, "partition boundaries must be strictly increasing (" +
                                                   b[i - 1].iso() + " >= " + b[i].iso() + ")");
  if (!scheme.labels.empty() && scheme.labels.size() != b.size() - 1)
    throw Error(ErrorKind::invalid_argument, "partition needs one label per window");

  TimePartition out;
  for (std::size_t i = 0; i + 1 < b.size(); ++i) {
    Snapshot s;
    s.start = b[i];
    s.end = b[i + 1];
    s.label = scheme.labels.empty() ? derive_label(s.start, s.end) : scheme.labels[i];
    out.snapshots.push_back(std::move(s));
  }
  for (const auto& p : corpus.papers()) {
    // first boundary strictly greater than the date; window index is one less
    auto it = std::upper_bound(b.begin(), b.end(), p.published_at);
    if (it == b.begin() || it == b.end()) {
      out.out_of_range.push_back(p.id);
      continue;
    }
    out.snapshots[static_cast<std::size_t>(it - b.begin()) - 1].paper_ids.push_back(p.id);
  }
  return out;
}

std::vector<const Paper*> snapshot_papers(const Corpus& corpus, const Snapshot& snapshot) {
  std::vector<const Paper*> out;
  out.reserve(snapshot.paper_ids.size());
  for (const auto& id : snapshot.paper_ids) {
    const Paper* p = corpus.find(id);
    if (!p) throw Error(ErrorKind::validation, "snapshot references unknown paper " + id);
    out.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------- ranks

RankTable rank_counts(std::string label, const std::map<std::string, std::size_t>& counts,
                      std::optional<std::size_t> top_k) {
  RankTable t;
  t.label = std::move(label);
  for (const auto& [kw, n] : counts) t.rows.push_back({kw, n, 0});
  std::sort(t.rows.begin(), t.rows.end(), [](const RankRow& a, const RankRow& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.keyword < b.keyword;
  });
  if (top_k && t.rows.size() > *top_k) t.rows.resize(*top_k);
  for (std::size_t i = 0; i < t.rows.size(); ++i) t.rows[i].rank = i + 1;
  return t;
}

RankTable keyword_ranks(const Corpus& corpus, const Snapshot& snapshot, KeywordSource source,
                        std::optional<std::size_t> top_k) {
  auto papers = snapshot_papers(corpus, snapshot);
  return rank_counts(snapshot.label, keyword_counts(papers, source), top_k);
}

std::vector<RankPoint> rank_trajectory(std::string_view keyword, std::span<const RankTable> tables) {
  std::vector<RankPoint> out;
  for (const auto& t : tables) {
    RankPoint pt{t.label, std::nullopt};
    for (const auto& row : t.rows) {
      if (row.keyword == keyword) {
        pt.rank = row.rank;
        break;
      }
    }
    out.push_back(std::move(pt));
  }
  return out;
}

std::string ranks_to_csv(std::span<const RankTable> tables) {
  std::string out = "snapshot,keyword,frequency,rank\n";
  for (const auto& t : tables)
    for (const auto& r : t.rows)
      out += csv_field(t.label) + "," + csv_field(r.keyword) + "," + std::to_string(r.frequency) + "," +
             std::to_string(r.rank) + "\n";
  return out;
}

// ---------------------------------------------------------------- co-occurrence

std::size_t CooccurrenceGraph::total_weight() const {
  std::size_t w = 0;
  for (const auto& e : edges) w += e.weight;
  return w;
}

std::ptrdiff_t CooccurrenceGraph::index_of(std::string_view keyword) const {
  auto it = std::find(nodes.begin(), nodes.end(), keyword);
  return it == nodes.end() ? -1 : it - nodes.begin();
}

CooccurrenceGraph build_cooccurrence(std::span<const Paper* const> papers, const Vocabulary& vocabulary,
                                     KeywordSource source, std::string label) {
  CooccurrenceGraph g;
  g.label = std::move(label);
  for (const auto& e : vocabulary.entries()) {
    g.nodes.push_back(e.keyword);
    g.frequency.push_back(e.frequency);
  }
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> weights;
  for (const Paper* p : papers) {
    std::set<std::uint32_t> present;
    for (const auto& k : paper_keywords(*p, source)) {
      auto idx = vocabulary.index_of(k.surface);
      if (idx >= 0) present.insert(static_cast<std::uint32_t>(idx));
    }
    for (auto a = present.begin(); a != present.end(); ++a)
      for (auto b = std::next(a); b != present.end(); ++b) ++weights[{*a, *b}];
  }
  g.edges.reserve(weights.size());
  for (const auto& [key, w] : weights) g.edges.push_back({key.first, key.second, w});
  return g;
}

std::string cooccurrence_edges_tsv(const CooccurrenceGraph& graph) {
  std::string out;
  for (const auto& e : graph.edges)
    out += graph.nodes[e.u] + "\t" + graph.nodes[e.v] + "\t" + std::to_string(e.weight) + "\n";
  return out;
}

std::string cooccurrence_nodes_tsv(const CooccurrenceGraph& graph) {
  std::string out;
  for (std::size_t i = 0; i < graph.nodes.size(); ++i)
    out += graph.nodes[i] + "\t" + std::to_string(graph.frequency[i]) + "\n";
  return out;
}

namespace {
std::size_t parse_count(const std::string& s, std::string_view what) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw Error(ErrorKind::validation, "bad " + std::string(what) + " value '" + s + "'");
  return v;
}
}  // namespace

CooccurrenceGraph parse_cooccurrence(std::string_view nodes_tsv, std::string_view edges_tsv,
                                     std::string label) {
  CooccurrenceGraph g;
  g.label = std::move(label);
  std::unordered_map<std::string, std::uint32_t> index;
  for (const auto& line : split(nodes_tsv, '\n')) {
    if (line.empty()) continue;
    auto cols = split(line, '\t');
    if (cols.size() != 2) throw Error(ErrorKind::validation, "bad nodes line: " + line);
    index.emplace(cols[0], static_cast<std::uint32_t>(g.nodes.size()));
    g.nodes.push_back(cols[0]);
    g.frequency.push_back(parse_count(cols[1], "frequency"));
  }
  for (const auto& line : split(edges_tsv, '\n')) {
    if (line.empty()) continue;
    auto cols = split(line, '\t');
    if (cols.size() != 3) throw Error(ErrorKind::validation, "bad edge line: " + line);
    auto a = index.find(cols[0]), b = index.find(cols[1]);
    if (a == index.end() || b == index.end())
      throw Error(ErrorKind::validation, "edge references unknown keyword: " + line);
    if (a->second == b->second) throw Error(ErrorKind::validation, "self-loop in co-occurrence edges");
    g.edges.push_back({std::min(a->second, b->second), std::max(a->second, b->second),
                       parse_count(cols[2], "weight")});
  }
  std::sort(g.edges.begin(), g.edges.end(),
            [](const auto& x, const auto& y) { return std::tie(x.u, x.v) < std::tie(y.u, y.v); });
  return g;
}

}  // namespace scitrace
