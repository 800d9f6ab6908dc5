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
#include "scitrace/corpus.hpp"
#include "support.hpp"

using namespace scitrace;
using nlohmann::json;

namespace {

json record(const std::string& id, std::vector<std::string> cats, const std::string& published = "2020-01-01") {
  return {{"id", id},
          {"title", "Graph models of " + id},
          {"abstract", "We study graph models."},
          {"categories", cats},
          {"published_at", published}};
}

std::vector<std::string> codes(const RecordResult& r) {
  std::vector<std::string> out;
  if (auto* v = std::get_if<std::vector<Violation>>(&r))
    for (const auto& x : *v) out.push_back(x.code);
  return out;
}

std::string lines(const std::vector<json>& records) {
  std::string out;
  for (const auto& r : records) out += r.dump() + "\n";
  return out;
}

}  // namespace

TEST_CASE("taxonomy lookups") {
  const auto& t = Taxonomy::builtin();
  CHECK(t.group_count() == 8);
  CHECK(t.category_count() == 156);
  CHECK(t.group_of("hep-th") == "physics");
  CHECK(t.group_of("econ.EM") == "econ");
  CHECK_FALSE(t.group_of("xx.YZ"));
  CHECK_THROWS_AS(Taxonomy::from_json("{\"groups\": {\"a\": [\"x\"], \"b\": [\"x\"]}}"), Error);
  CHECK_THROWS_AS(Taxonomy::from_json("not json"), Error);
}

TEST_CASE("validate_record accepts well-formed records") {
  auto r = validate_record(record("p1", {"cs.LG", "stat.ML"}), Taxonomy::builtin());
  REQUIRE(std::holds_alternative<Paper>(r));
  const auto& p = std::get<Paper>(r);
  CHECK(p.categories.size() == 2);
  CHECK(p.published_at == Date{2020, 1, 1});
  CHECK(p.effective_updated_at() == p.published_at);
}

TEST_CASE("validate_record reports violations") {
  CHECK(codes(validate_record(record("p1", {"xx.YZ"}), Taxonomy::builtin())) ==
        std::vector<std::string>{"unknown_category"});
  auto late = record("p2", {"cs.LG"}, "2021-05-01");
  late["updated_at"] = "2021-04-01";
  CHECK(codes(validate_record(late, Taxonomy::builtin())) == std::vector<std::string>{"time_order"});
  auto no_id = record("p3", {"cs.LG"});
  no_id.erase("id");
  CHECK(codes(validate_record(no_id, Taxonomy::builtin())) == std::vector<std::string>{"missing_id"});
  CHECK(codes(validate_record(json::array(), Taxonomy::builtin())) == std::vector<std::string>{"not_object"});
  auto bad_date = record("p4", {"cs.LG"}, "2021-13-01");
  CHECK(codes(validate_record(bad_date, Taxonomy::builtin())) == std::vector<std::string>{"bad_date"});
}

TEST_CASE("primary group is the first-listed category's group") {
  Paper p;
  p.categories = {"cs.LG", "stat.ML"};
  CHECK(primary_group(p, Taxonomy::builtin()) == "cs");
  CHECK(paper_groups(p, Taxonomy::builtin()) == std::set<std::string>{"cs", "stat"});
  p.categories = {"hep-th"};
  CHECK(primary_group(p, Taxonomy::builtin()) == "physics");
  p.categories = {"econ.EM"};
  CHECK(primary_group(p, Taxonomy::builtin()) == "econ");
  p.categories = {"xx.YZ"};
  CHECK_THROWS_AS(primary_group(p, Taxonomy::builtin()), Error);
}

TEST_CASE("mean and population sd") {
  std::vector<double> v{1, 3};
  auto m = mean_sd(v);
  CHECK(m.mean == 2.0);
  CHECK(m.sd == 1.0);
  std::vector<double> one{4};
  CHECK(mean_sd(one).sd == 0.0);
}

TEST_CASE("load_corpus on small files") {
  testing::TempDir dir("corpus");
  SUBCASE("three well-formed records") {
    testing::write(dir / "p.jsonl", lines({record("c", {"cs.LG"}), record("a", {"math.ST"}), record("b", {"q-bio.NC"})}));
    auto loaded = load_corpus(dir / "p.jsonl", "");
    CHECK(loaded.corpus.papers().size() == 3);
    CHECK(loaded.corpus.papers()[0].id == "a");  // ascending id order
    CHECK(loaded.issues.empty());
  }
  SUBCASE("empty file") {
    testing::write(dir / "p.jsonl", "");
    try {
      load_corpus(dir / "p.jsonl", "");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()) == "empty corpus");
      CHECK(e.kind() == ErrorKind::validation);
    }
  }
  SUBCASE("one record missing its id") {
    std::vector<json> recs;
    for (int i = 0; i < 11; ++i) recs.push_back(record("p" + std::to_string(i), {"cs.LG"}));
    recs[4].erase("id");
    testing::write(dir / "p.jsonl", lines(recs));
    auto loaded = load_corpus(dir / "p.jsonl", "");
    CHECK(loaded.corpus.papers().size() == 10);
    REQUIRE(loaded.issues.size() == 1);
    CHECK(loaded.issues[0].line == 5);
    CHECK(loaded.issues[0].violations[0].code == "missing_id");
  }
  SUBCASE("too many invalid lines abort") {
    testing::write(dir / "p.jsonl", lines({record("a", {"cs.LG"}), record("b", {"xx.YZ"})}));
    CHECK_THROWS_AS(load_corpus(dir / "p.jsonl", ""), Error);
  }
  SUBCASE("unreadable file") {
    try {
      load_corpus(dir / "missing.jsonl", "");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::io);
    }
  }
}

TEST_CASE("corpus resolves external ids and round-trips") {
  testing::TempDir dir("corpus-rt");
  auto a = record("a", {"cs.LG"}, "2019-01-01");
  a["external_id"] = "S2:1";
  testing::write(dir / "p.jsonl", lines({a, record("b", {"cs.CL"}, "2020-03-04")}));
  testing::write(dir / "c.jsonl",
                 json({{"citing", "b"}, {"cited", "S2:1"}, {"cited_year", 2019}, {"cited_fields", {"Computer Science"}}})
                         .dump() +
                     "\n");
  auto loaded = load_corpus(dir / "p.jsonl", dir / "c.jsonl");
  const auto& c = loaded.corpus;
  REQUIRE(c.resolve("S2:1"));
  CHECK(c.resolve("S2:1")->id == "a");
  CHECK(c.resolve("b")->id == "b");
  CHECK_FALSE(c.resolve("nope"));

  save_corpus(c, dir / "p2.jsonl", dir / "c2.jsonl");
  auto again = load_corpus(dir / "p2.jsonl", dir / "c2.jsonl");
  CHECK(serialize_papers(again.corpus.papers()) == serialize_papers(c.papers()));
  CHECK(serialize_citations(again.corpus.citations()) == serialize_citations(c.citations()));

  auto stats = corpus_stats(c);
  CHECK(stats.paper_count == 2);
  CHECK(stats.citation_count == 1);
  CHECK(stats.earliest == Date{2019, 1, 1});
  CHECK(stats.latest == Date{2020, 3, 4});
  CHECK(stats.primary_group_histogram.at("cs") == 2);
  auto j = stats_to_json(stats);
  CHECK(j["papers"] == 2);
}
