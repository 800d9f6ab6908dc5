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

#include "scitrace/community.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace scitrace {

double WeightedGraph::total_weight() const {
  double m = 0.0;
  for (const auto& e : edges) m += e.weight;
  return m;
}

std::vector<double> WeightedGraph::degrees() const {
  std::vector<double> k(nodes, 0.0);
  for (const auto& e : edges) {
    k[e.u] += e.weight;
    k[e.v] += e.weight;
  }
  return k;
}

double modularity(const WeightedGraph& graph, const std::vector<std::uint32_t>& membership) {
  if (membership.size() != graph.nodes)
    throw Error(ErrorKind::invalid_argument, "partition does not cover the graph");
  const double m = graph.total_weight();
  if (!(m > 0.0)) throw Error(ErrorKind::validation, "modularity of a graph without edges");
  const std::size_t communities =
      membership.empty() ? 0 : *std::max_element(membership.begin(), membership.end()) + std::size_t{1};
  std::vector<double> internal(communities, 0.0), degree(communities, 0.0);
  for (const auto& e : graph.edges) {
    degree[membership[e.u]] += e.weight;
    degree[membership[e.v]] += e.weight;
    if (membership[e.u] == membership[e.v]) internal[membership[e.u]] += e.weight;
  }
  double q = 0.0;
  for (std::size_t c = 0; c < communities; ++c) {
    const double share = degree[c] / (2.0 * m);
    q += internal[c] / m - share * share;
  }
  return q;
}

namespace {

struct Level {
  std::size_t n = 0;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;  // no self entries
  std::vector<double> loops;
  std::vector<double> degree;
};

Level level_from(const WeightedGraph& g) {
  Level lv;
  lv.n = g.nodes;
  lv.adj.resize(g.nodes);
  lv.loops.assign(g.nodes, 0.0);
  std::vector<std::map<std::uint32_t, double>> merged(g.nodes);
  for (const auto& e : g.edges) {
    if (e.u == e.v) {
      lv.loops[e.u] += e.weight;
    } else {
      merged[e.u][e.v] += e.weight;
      merged[e.v][e.u] += e.weight;
    }
  }
  for (std::size_t i = 0; i < g.nodes; ++i) lv.adj[i].assign(merged[i].begin(), merged[i].end());
  lv.degree = g.degrees();
  return lv;
}

// Returns true when any node changed community.
bool local_moving(const Level& lv, double m, std::vector<std::uint32_t>& comm, Rng& rng) {
  constexpr double kEps = 1e-12;
  std::vector<double> tot(lv.n);
  for (std::size_t i = 0; i < lv.n; ++i) {
    comm[i] = static_cast<std::uint32_t>(i);
    tot[i] = lv.degree[i];
  }
  std::vector<std::uint32_t> order(lv.n);
  std::iota(order.begin(), order.end(), 0u);
  rng.shuffle(order);

  bool any = false;
  std::map<std::uint32_t, double> links;
  for (bool moved = true; moved;) {
    moved = false;
    for (std::uint32_t i : order) {
      const std::uint32_t own = comm[i];
      const double ki = lv.degree[i];
      links.clear();
      links[own] = 0.0;
      for (const auto& [j, w] : lv.adj[i]) links[comm[j]] += w;
      tot[own] -= ki;
      auto gain = [&](std::uint32_t c, double kin) { return kin / m - tot[c] * ki / (2.0 * m * m); };
      std::uint32_t best = own;
      double best_gain = gain(own, links[own]);
      for (const auto& [c, kin] : links) {
        if (c == own) continue;
        const double g = gain(c, kin);
        if (g > best_gain + kEps) {
          best = c;
          best_gain = g;
        }
      }
      tot[best] += ki;
      if (best != own) {
        comm[i] = best;
        moved = true;
        any = true;
      }
    }
  }
  return any;
}

std::size_t renumber(std::vector<std::uint32_t>& ids) {
  std::map<std::uint32_t, std::uint32_t> remap;
  for (auto& c : ids) {
    auto [it, inserted] = remap.emplace(c, static_cast<std::uint32_t>(remap.size()));
    c = it->second;
  }
  return remap.size();
}

Level aggregate(const Level& lv, const std::vector<std::uint32_t>& comm, std::size_t communities) {
  Level out;
  out.n = communities;
  out.adj.resize(communities);
  out.loops.assign(communities, 0.0);
  out.degree.assign(communities, 0.0);
  std::vector<std::map<std::uint32_t, double>> merged(communities);
  for (std::size_t i = 0; i < lv.n; ++i) {
    const auto ci = comm[i];
    out.loops[ci] += lv.loops[i];
    out.degree[ci] += lv.degree[i];
    for (const auto& [j, w] : lv.adj[i]) {
      const auto cj = comm[j];
      if (cj == ci) {
        if (i < j) out.loops[ci] += w;
      } else {
        merged[ci][cj] += w;
      }
    }
  }
  for (std::size_t c = 0; c < communities; ++c) out.adj[c].assign(merged[c].begin(), merged[c].end());
  return out;
}

}  // namespace

Partition louvain(const WeightedGraph& graph, std::uint64_t seed) {
  if (graph.nodes == 0) throw Error(ErrorKind::validation, "louvain on an empty graph");
  for (const auto& e : graph.edges)
    if (e.u >= graph.nodes || e.v >= graph.nodes || !(e.weight >= 0.0))
      throw Error(ErrorKind::invalid_argument, "bad edge in louvain input");
  const double m = graph.total_weight();
  if (!(m > 0.0)) throw Error(ErrorKind::validation, "louvain needs at least one edge");

  Partition p;
  p.membership.resize(graph.nodes);
  std::iota(p.membership.begin(), p.membership.end(), 0u);
  Level lv = level_from(graph);
  for (std::uint64_t level = 0;; ++level) {
    Rng rng(derive_seed(seed, level));
    std::vector<std::uint32_t> comm(lv.n);
    if (!local_moving(lv, m, comm, rng)) break;
    const std::size_t count = renumber(comm);
    for (auto& c : p.membership) c = comm[c];
    p.level_modularity.push_back(modularity(graph, p.membership));
    if (count == lv.n) break;
    lv = aggregate(lv, comm, count);
  }
  p.community_count = renumber(p.membership);
  p.modularity = modularity(graph, p.membership);
  return p;
}

CitationGraph citation_graph(const Corpus& corpus) {
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& e : corpus.citations()) {
    const Paper* cited = corpus.resolve(e.cited);
    if (!cited || cited->id == e.citing) continue;
    pairs.insert(std::minmax(e.citing, cited->id));
  }
  CitationGraph out;
  std::map<std::string, std::uint32_t> index;
  for (const auto& [a, b] : pairs) {
    index.emplace(a, 0);
    index.emplace(b, 0);
  }
  for (auto& [id, idx] : index) {
    idx = static_cast<std::uint32_t>(out.ids.size());
    out.ids.push_back(id);
  }
  out.graph.nodes = out.ids.size();
  for (const auto& [a, b] : pairs) out.graph.edges.push_back({index[a], index[b], 1.0});
  return out;
}

std::string communities_csv(const CitationGraph& graph, const Partition& partition) {
  std::string out = "node,community\n";
  for (std::size_t i = 0; i < graph.ids.size(); ++i)
    out += csv_field(graph.ids[i]) + "," + std::to_string(partition.membership.at(i)) + "\n";
  return out;
}

std::string community_edges_csv(const CitationGraph& graph, const Partition& partition) {
  std::string out = "source,target,weight,community\n";
  for (const auto& e : graph.graph.edges) {
    const auto cu = partition.membership.at(e.u), cv = partition.membership.at(e.v);
    out += csv_field(graph.ids[e.u]) + "," + csv_field(graph.ids[e.v]) + "," + format_real(e.weight) + "," +
           (cu == cv ? std::to_string(cu) : std::string("-1")) + "\n";
  }
  return out;
}

}  // namespace scitrace
