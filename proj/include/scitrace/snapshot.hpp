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
#ifndef SCITRACE_SNAPSHOT_HPP
#define SCITRACE_SNAPSHOT_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scitrace/corpus.hpp"
#include "scitrace/keywords.hpp"

namespace scitrace {

/// Papers published within the half-open window [start, end).
struct Snapshot {
  std::string label;
  Date start;
  Date end;
  std::vector<std::string> paper_ids;  // ascending
};

struct TimePartition {
  std::vector<Snapshot> snapshots;
  std::vector<std::string> out_of_range;  // papers before the first or at/after the last boundary
};

struct PartitionScheme {
  std::vector<Date> boundaries;
  std::vector<std::string> labels;  // one per window; empty means derive from boundaries
};

/// The eight publication periods used for the all-subject keyword tables
/// (~1994, 1995-2004, ..., 2024~).
PartitionScheme period_preset();
/// One window per calendar year in [first_year, end_year).
PartitionScheme yearly_preset(int first_year = 1991, int end_year = 2025);

/// Throws Error(invalid_argument) unless boundaries are strictly increasing
/// with at least two entries.
TimePartition partition_by_time(const Corpus& corpus, const PartitionScheme& scheme);

std::vector<const Paper*> snapshot_papers(const Corpus& corpus, const Snapshot& snapshot);

struct RankRow {
  std::string keyword;
  std::size_t frequency = 0;
  std::size_t rank = 0;  // 1-based
};

struct RankTable {
  std::string label;
  std::vector<RankRow> rows;
};

/// Orders by descending frequency, lexicographic tie-break; ranks are row
/// positions starting at 1.
RankTable rank_counts(std::string label, const std::map<std::string, std::size_t>& counts,
                      std::optional<std::size_t> top_k = std::nullopt);

RankTable keyword_ranks(const Corpus& corpus, const Snapshot& snapshot, KeywordSource source,
                        std::optional<std::size_t> top_k = std::nullopt);

struct RankPoint {
  std::string label;
  std::optional<std::size_t> rank;
};

std::vector<RankPoint> rank_trajectory(std::string_view keyword, std::span<const RankTable> tables);

/// Header "snapshot,keyword,frequency,rank".
std::string ranks_to_csv(std::span<const RankTable> tables);

/// Undirected keyword graph; edge weight counts the papers in which both
/// endpoints co-occur.
struct CooccurrenceGraph {
  struct Edge {
    std::uint32_t u;  // u < v, indices into nodes
    std::uint32_t v;
    std::size_t weight;
  };

  std::string label;
  std::vector<std::string> nodes;       // vocabulary order
  std::vector<std::size_t> frequency;   // per node
  std::vector<Edge> edges;              // sorted by (u, v)

  std::size_t node_count() const { return nodes.size(); }
  std::size_t edge_count() const { return edges.size(); }
  std::size_t total_weight() const;
  std::ptrdiff_t index_of(std::string_view keyword) const;
};

/// Clique expansion: every paper adds +1 to each pair of its in-vocabulary keywords.
CooccurrenceGraph build_cooccurrence(std::span<const Paper* const> papers, const Vocabulary& vocabulary,
                                     KeywordSource source, std::string label = {});

/// "keyword_a<TAB>keyword_b<TAB>weight" per line.
std::string cooccurrence_edges_tsv(const CooccurrenceGraph& graph);
/// "keyword<TAB>frequency" per line, vocabulary order.
std::string cooccurrence_nodes_tsv(const CooccurrenceGraph& graph);
CooccurrenceGraph parse_cooccurrence(std::string_view nodes_tsv, std::string_view edges_tsv,
                                     std::string label = {});

}  // namespace scitrace

#endif  // SCITRACE_SNAPSHOT_HPP
