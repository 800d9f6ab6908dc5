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


#include <cmath>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "scitrace/analytics.hpp"
#include "scitrace/community.hpp"

using namespace scitrace;

namespace {

Paper paper(const std::string& id, const std::string& date, std::vector<std::string> cats,
            std::vector<std::string> title_keywords = {}) {
  Paper p;
  p.id = id;
  p.title = id;
  p.categories = std::move(cats);
  p.published_at = Date::parse(date);
  for (const auto& k : title_keywords) p.title_keywords.push_back(normalize_keyword(k));
  return p;
}

CitationEdge cite(const std::string& from, const std::string& to, std::optional<int> year = std::nullopt,
                  std::set<std::string> fields = {}) {
  return {from, to, year, std::move(fields)};
}

WeightedGraph graph(std::size_t n, const std::vector<std::pair<int, int>>& edges) {
  WeightedGraph g;
  g.nodes = n;
  for (auto [u, v] : edges) g.edges.push_back({static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v), 1.0});
  return g;
}

std::vector<oracle::Edge> oracle_edges(const WeightedGraph& g) {
  std::vector<oracle::Edge> out;
  for (const auto& e : g.edges) out.push_back({static_cast<int>(e.u), static_cast<int>(e.v), e.weight});
  return out;
}

std::vector<int> as_int(const std::vector<std::uint32_t>& m) { return {m.begin(), m.end()}; }

}  // namespace

TEST_CASE("subject contributions") {
  std::vector<Reference> refs{{"r1", 2020, {"CS"}}, {"r2", 2019, {"CS", "Math"}}};
  auto p = subject_contributions(refs, "x");
  CHECK(p.contributions.at("CS") == 1.5);
  CHECK(p.contributions.at("Math") == 0.5);
  CHECK(p.subject_count() == 2);
  CHECK(p.reference_count == 2);

  std::vector<Reference> three{{"r", 2020, {"A", "B", "C"}}};
  for (const auto& [s, c] : subject_contributions(three).contributions) CHECK(c == doctest::Approx(1.0 / 3.0));

  auto empty = subject_contributions({});
  CHECK(empty.contributions.empty());
  CHECK_THROWS_AS(diversity_scores(empty), Error);

  std::vector<Reference> with_blank{{"a", 2020, {}}, {"b", 2020, {"X"}}};
  auto wb = subject_contributions(with_blank);
  CHECK(wb.excluded_empty_fields == 1);
  CHECK(wb.reference_count == 1);
}

TEST_CASE("diversity scores on hand cases") {
  std::vector<double> even{0.5, 0.5};
  auto s = diversity_from_contributions(even);
  CHECK(s.simpson == doctest::Approx(0.5));
  CHECK(s.shannon == doctest::Approx(std::log(2.0)));
  CHECK(s.gini == 0.0);
  std::vector<double> single{3.0};
  s = diversity_from_contributions(single);
  CHECK(s.simpson == 0.0);
  CHECK(s.shannon == 0.0);
  CHECK(s.gini == 0.0);
  std::vector<double> c{2, 1, 1};
  s = diversity_from_contributions(c);
  auto o = oracle::diversity(c);
  CHECK(s.simpson == doctest::Approx(0.625));
  CHECK(s.shannon == doctest::Approx(1.039720771));
  CHECK(s.gini == doctest::Approx(1.0 / 6.0));
  CHECK(std::abs(s.simpson - o.simpson) <= 1e-12);
  CHECK(std::abs(s.shannon - o.shannon) <= 1e-12);
  CHECK(std::abs(s.gini - o.gini) <= 1e-12);
  CHECK(diversity_from_contributions(c, 2.0).shannon == doctest::Approx(1.5));
}

TEST_CASE("diversity invariances") {
  Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> c(1 + rng.uniform_index(8));
    for (auto& x : c) x = 0.1 + rng.uniform() * 5;
    auto base = diversity_from_contributions(c);
    auto shuffled = c;
    rng.shuffle(shuffled);
    auto ps = diversity_from_contributions(shuffled);
    CHECK(std::abs(ps.simpson - base.simpson) <= 1e-12);
    CHECK(std::abs(ps.shannon - base.shannon) <= 1e-12);
    CHECK(std::abs(ps.gini - base.gini) <= 1e-12);
    auto scaled = c;
    for (auto& x : scaled) x *= 7.5;
    auto sc = diversity_from_contributions(scaled);
    CHECK(std::abs(sc.simpson - base.simpson) <= 1e-12);
    CHECK(std::abs(sc.shannon - base.shannon) <= 1e-12);
    CHECK(std::abs(sc.gini - base.gini) <= 1e-12);
  }
}

TEST_CASE("diversity tables per paper and group") {
  Corpus c({paper("a", "2020-01-01", {"cs.LG"}, {"graphs"}), paper("b", "2020-01-01", {"math.ST"}, {"graphs"})},
           {cite("a", "x1", 2019, {"Computer Science"}), cite("a", "x2", 2018, {"Mathematics"}),
            cite("b", "x3", 2017, {"Mathematics"}), cite("b", "x4", 2017, {})},
           Taxonomy::builtin());
  auto rows = diversity_table(c, DiversityLevel::paper);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].key == "a");
  CHECK(rows[0].scores.simpson == doctest::Approx(0.5));
  CHECK(rows[1].references == 1);
  CHECK(rows[1].scores.simpson == 0.0);

  auto groups = diversity_table(c, DiversityLevel::group);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].key == "cs");

  DiversityOptions opt;
  opt.topics = {"graphs"};
  auto pooled = diversity_table(c, DiversityLevel::topic, opt);
  REQUIRE(pooled.size() == 1);
  CHECK(pooled[0].papers == 2);
  // pooled profile: CS 1, Math 2
  CHECK(pooled[0].scores.simpson == doctest::Approx(1.0 - (1.0 / 9 + 4.0 / 9)));
  opt.aggregation = TopicAggregation::mean;
  auto mean = diversity_table(c, DiversityLevel::topic, opt);
  CHECK(mean[0].scores.simpson == doctest::Approx(0.25));
  CHECK(diversity_to_csv("group", groups).rfind("group,papers,references,subjects,simpson,shannon,gini\n", 0) == 0);
  CHECK_THROWS_AS(parse_diversity_level("planet"), Error);
}

TEST_CASE("age of citation") {
  AocCounters k;
  CHECK(age_of_citation(Date{2020, 6, 1}, Date{2015, 6, 1}, k) == 5.0);
  CHECK(age_of_citation(Date{2020, 6, 1}, Date{2020, 6, 1}, k) == 0.0);
  CHECK_FALSE(age_of_citation(reference_date(2019), reference_date(2021), k));
  CHECK(k.negative_aoc == 1);
  CHECK_FALSE(age_of_citation(Date{2020, 1, 1}, std::nullopt, k));
  CHECK(k.missing_year == 1);
  CHECK(reference_date(2011) == Date{2011, 7, 1});
}

TEST_CASE("age summaries") {
  auto s = summarize_ages("g", {10, 1, 3, 2}, {});
  CHECK(s.median == 2.5);
  CHECK(s.ages == std::vector<double>{1, 2, 3, 10});
  std::size_t total = 0;
  for (const auto& b : s.histogram) {
    total += b.count;
    if (b.start == 1.0 || b.start == 2.0 || b.start == 3.0 || b.start == 10.0) CHECK(b.count == 1);
    else CHECK(b.count == 0);
  }
  CHECK(total == 4);
  auto flat = summarize_ages("g", {4, 4, 4}, {});
  CHECK(flat.median == 4);
  CHECK(flat.iqr() == 0);
  std::vector<double> xs{0.5, 1, 7, 8, 20};
  for (double q : {0.0, 0.1, 0.25, 0.5, 0.9, 1.0})
    CHECK(quantile_sorted(xs, q) == doctest::Approx(oracle::quantile(xs, q)));
}

TEST_CASE("AoC distribution over a planted corpus") {
  Corpus c({paper("old", "2010-07-01", {"cs.LG"}), paper("p", "2020-07-01", {"cs.LG"}, {"graphs"}),
            paper("q", "2020-07-01", {"math.ST"})},
           {cite("p", "e1", 2019), cite("p", "e2", 2018), cite("p", "e3", 2017), cite("p", "old", 2099),
            cite("p", "future", 2021), cite("p", "undated"), cite("q", "e5", 2016)},
           Taxonomy::builtin());
  auto r = aoc_distribution(c, AocGrouping::subject_group);
  REQUIRE(r.groups.size() == 2);
  CHECK(r.groups[0].group == "cs");
  CHECK(r.groups[0].ages == std::vector<double>{1, 2, 3, 10});  // "old" resolves to its own date
  CHECK(r.groups[0].median == 2.5);
  CHECK(r.counters.negative_aoc == 1);
  CHECK(r.counters.missing_year == 1);
  CHECK(r.groups[1].ages == std::vector<double>{4});
  std::vector<std::string> topics{"graphs", "absent"};
  auto t = aoc_distribution(c, AocGrouping::topic_keyword, {}, topics);
  REQUIRE(t.groups.size() == 1);
  CHECK(t.groups[0].group == "graphs");
  CHECK(t.omitted == std::vector<std::string>{"absent"});
  CHECK(aoc_histogram_csv(r).rfind("group,bin_start,bin_end,count\n", 0) == 0);
  CHECK(aoc_summary_csv(r).rfind("group,count,median,q1,q3,iqr\ncs,4,2.5,", 0) == 0);
}

TEST_CASE("homophily") {
  std::vector<Paper> ps;
  for (int i = 0; i < 11; ++i) ps.push_back(paper("c" + std::to_string(i), "2020-01-01", {"cs.LG"}));
  ps.push_back(paper("m", "2020-01-01", {"math.ST", "cs.LG"}));
  std::vector<CitationEdge> es;
  for (int i = 1; i < 10; ++i) es.push_back(cite("c" + std::to_string(i), "c0"));
  es.push_back(cite("c10", "m"));
  es.push_back(cite("c10", "elsewhere", 2000));
  Corpus c(ps, es, Taxonomy::builtin());
  auto r = homophily_ratio(c, HomophilyMode::primary_group);
  CHECK(r.total == 10);
  CHECK(r.ratio == doctest::Approx(0.9));
  CHECK(r.matrix["cs"]["math"] == 1);
  CHECK(homophily_ratio(c, HomophilyMode::any_shared_group).ratio == 1.0);
  CHECK(homophily_matrix_csv(r, c.taxonomy()).rfind("citing_group,cs,econ,", 0) == 0);

  Corpus none({paper("a", "2020-01-01", {"cs.LG"})}, {cite("a", "outside", 2001)}, Taxonomy::builtin());
  CHECK_THROWS_AS(homophily_ratio(none, HomophilyMode::primary_group), Error);
}

TEST_CASE("modularity on small graphs") {
  auto one = graph(2, {{0, 1}});
  CHECK(modularity(one, {0, 1}) == doctest::Approx(-0.5));
  CHECK(modularity(one, {0, 0}) == doctest::Approx(0.0));
  auto two = graph(4, {{0, 1}, {2, 3}});
  CHECK(modularity(two, {0, 0, 1, 1}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(modularity(graph(3, {}), {0, 1, 2}), Error);
  CHECK_THROWS_AS(modularity(two, {0, 1}), Error);

  WeightedGraph loops = graph(3, {{0, 1}, {1, 2}});
  loops.edges.push_back({2, 2, 2.0});
  for (auto m : std::vector<std::vector<std::uint32_t>>{{0, 0, 1}, {0, 1, 1}, {0, 1, 2}, {0, 0, 0}})
    CHECK(modularity(loops, m) == doctest::Approx(oracle::modularity(3, oracle_edges(loops), as_int(m))));
}

TEST_CASE("louvain canonical cases match the exhaustive optimum") {
  auto cliques = graph(8, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}, {4, 5}, {4, 6}, {4, 7}, {5, 6}, {5, 7},
                           {6, 7}, {3, 4}});
  auto p = louvain(cliques, 1);
  auto best = oracle::best_partition(8, oracle_edges(cliques));
  CHECK(oracle::same_grouping(as_int(p.membership), best.second));
  CHECK(p.community_count == 2);
  CHECK(p.modularity == doctest::Approx(best.first).epsilon(1e-12));
  CHECK(p.modularity == modularity(cliques, p.membership));

  auto triangles = graph(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
  auto t = louvain(triangles, 9);
  CHECK(oracle::same_grouping(as_int(t.membership), {0, 0, 0, 1, 1, 1}));

  auto edge = louvain(graph(2, {{0, 1}}), 3);
  CHECK(edge.community_count == 1);
  CHECK(edge.modularity == 0.0);
  CHECK_THROWS_AS(louvain(graph(4, {}), 1), Error);
}

TEST_CASE("louvain is seeded and monotone") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t n = 10 + rng.uniform_index(20);
    std::vector<std::pair<int, int>> es;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (rng.uniform() < 0.2) es.emplace_back(static_cast<int>(i), static_cast<int>(j));
    if (es.empty()) continue;
    auto g = graph(n, es);
    auto a = louvain(g, 42), b = louvain(g, 42);
    CHECK(a.membership == b.membership);
    std::vector<std::uint32_t> singletons(n);
    std::iota(singletons.begin(), singletons.end(), 0u);
    CHECK(a.modularity >= modularity(g, singletons));
    for (std::size_t l = 1; l < a.level_modularity.size(); ++l)
      CHECK(a.level_modularity[l] >= a.level_modularity[l - 1] - 1e-12);
    CHECK(a.modularity == modularity(g, a.membership));
    CHECK(a.modularity == doctest::Approx(oracle::modularity(static_cast<int>(n), oracle_edges(g), as_int(a.membership))));
  }
}

TEST_CASE("citation graph for community detection") {
  Corpus c({paper("a", "2020-01-01", {"cs.LG"}), paper("b", "2020-02-01", {"cs.LG"}),
            paper("c", "2020-03-01", {"cs.LG"}), paper("lonely", "2020-03-01", {"cs.LG"})},
           {cite("b", "a"), cite("a", "b"), cite("c", "a"), cite("c", "external", 2001)}, Taxonomy::builtin());
  auto cg = citation_graph(c);
  CHECK(cg.ids == std::vector<std::string>{"a", "b", "c"});
  CHECK(cg.graph.edges.size() == 2);
  auto part = louvain(cg.graph, 1);
  CHECK(communities_csv(cg, part).rfind("node,community\na,", 0) == 0);
  CHECK(community_edges_csv(cg, part).rfind("source,target,weight,community\n", 0) == 0);
}
