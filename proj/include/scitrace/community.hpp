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

#ifndef SCITRACE_COMMUNITY_HPP
#define SCITRACE_COMMUNITY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "scitrace/corpus.hpp"

namespace scitrace {

struct WeightedEdge {
  std::uint32_t u = 0;
  std::uint32_t v = 0;
  double weight = 1.0;
};

/// Undirected graph. A self-loop of weight w counts w towards its
/// community's internal weight and 2w towards the node degree.
struct WeightedGraph {
  std::size_t nodes = 0;
  std::vector<WeightedEdge> edges;

  double total_weight() const;
  std::vector<double> degrees() const;
};

/// Q = sum_c [ e_c / m - (d_c / 2m)^2 ]. Throws Error(validation) when the
/// graph has no edge weight.
double modularity(const WeightedGraph& graph, const std::vector<std::uint32_t>& membership);

struct Partition {
  std::vector<std::uint32_t> membership;  // dense ids, numbered by first appearance
  std::size_t community_count = 0;
  double modularity = 0.0;
  std::vector<double> level_modularity;  // after each aggregation level
};

/// Two-phase Louvain. Nodes are visited in a seeded shuffle; a node moves only
/// for a strictly better gain, and equal gains go to the smaller community id.
Partition louvain(const WeightedGraph& graph, std::uint64_t seed);

/// In-corpus citations, symmetrized; a mutual citation pair is one edge.
/// Papers without any in-corpus citation are left out.
struct CitationGraph {
  std::vector<std::string> ids;
  WeightedGraph graph;
};

CitationGraph citation_graph(const Corpus& corpus);

/// "node,community"
std::string communities_csv(const CitationGraph& graph, const Partition& partition);
/// "source,target,weight,community"; community is -1 for edges between communities.
std::string community_edges_csv(const CitationGraph& graph, const Partition& partition);

}  // namespace scitrace

#endif  // SCITRACE_COMMUNITY_HPP
