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

// Writes the synthetic 200-paper fixture corpus (papers.jsonl and
// citations.jsonl) used by the end-to-end tests. Output is a pure function
// of the seed.
//
//   make_fixture <out_dir> [seed]

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

namespace {

using nlohmann::ordered_json;

struct Group {
  const char* code;
  std::vector<const char*> categories;
  std::vector<const char*> fields;
  std::vector<const char*> phrases;
};

const std::vector<Group> kGroups = {
    {"cs",
     {"cs.LG", "cs.CL", "cs.CV", "cs.AI"},
     {"Computer Science"},
     {"neural networks", "language models", "graph neural networks", "image recognition", "reinforcement learning",
      "transformer architectures", "word embeddings", "knowledge graphs", "speech recognition", "topic models"}},
    {"math",
     {"math.ST", "math.OC", "math.PR"},
     {"Mathematics"},
     {"random matrices", "convex optimization", "stochastic processes", "optimization methods",
      "statistical inference", "sparse recovery", "markov chains", "graph theory"}},
    {"physics",
     {"quant-ph", "astro-ph.CO", "cond-mat.stat-mech"},
     {"Physics"},
     {"quantum states", "dark matter", "phase transitions", "quantum circuits", "spin glasses",
      "cosmic microwave background", "entanglement entropy", "neural networks"}},
    {"q-bio",
     {"q-bio.NC", "q-bio.GN", "q-bio.PE"},
     {"Biology", "Medicine"},
     {"gene expression", "protein folding", "neural coding", "population dynamics", "single cell sequencing",
      "deep learning", "graph neural networks", "time series"}},
};

// Phrases that grow in later windows, so rankings drift over time.
const std::vector<const char*> kRising = {"language models", "deep learning", "transformer architectures",
                                          "graph neural networks", "quantum circuits", "single cell sequencing"};

// Period windows: ~1994, 1995-2004, 2005-2014, 2015-2017, 2018-2019, 2020-2021, 2022-2023, 2024~
const int kWindowStart[] = {1990, 1995, 2005, 2015, 2018, 2020, 2022, 2024};
const int kWindowEnd[] = {1994, 2004, 2014, 2017, 2019, 2021, 2023, 2025};

class Draw {
public:
  explicit Draw(std::uint64_t seed) : engine_(seed) {}
  // Plain modulo keeps the stream identical across standard libraries.
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  bool chance(double p) { return static_cast<double>(engine_() >> 11) * 0x1.0p-53 < p; }

private:
  std::mt19937_64 engine_;
};

struct Synthetic {
  std::string id;
  int year, month, day;
  std::size_t group;
  std::vector<std::string> categories;
  std::string title, abstract;
};

std::string iso(int y, int m, int d) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
  return buf;
}

std::string pick_phrase(Draw& draw, const Group& g, std::size_t window) {
  if (window >= 4 && draw.chance(0.3)) return kRising[draw.below(kRising.size())];
  return g.phrases[draw.below(g.phrases.size())];
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: make_fixture <out_dir> [seed]\n");
    return 1;
  }
  const std::filesystem::path out = argv[1];
  const std::uint64_t seed = argc > 2 ? std::stoull(argv[2]) : 20240601ULL;
  Draw draw(seed);

  std::vector<Synthetic> papers;
  for (std::size_t w = 0; w < 8; ++w) {
    for (int n = 0; n < 25; ++n) {
      Synthetic p;
      p.year = kWindowStart[w] + static_cast<int>(draw.below(static_cast<std::size_t>(kWindowEnd[w] - kWindowStart[w] + 1)));
      p.month = 1 + static_cast<int>(draw.below(12));
      p.day = 1 + static_cast<int>(draw.below(28));
      const std::size_t r = draw.below(10);
      p.group = r < 4 ? 0 : r < 6 ? 1 : r < 8 ? 2 : 3;
      const auto& g = kGroups[p.group];
      p.categories.push_back(g.categories[draw.below(g.categories.size())]);
      if (draw.chance(0.2)) {
        const auto& other = kGroups[(p.group + 1 + draw.below(3)) % 4];
        p.categories.push_back(other.categories[draw.below(other.categories.size())]);
      }
      std::vector<std::string> phrases;
      while (phrases.size() < 4) {
        auto ph = pick_phrase(draw, g, w);
        if (std::find(phrases.begin(), phrases.end(), ph) == phrases.end()) phrases.push_back(ph);
      }
      const bool long_title = draw.chance(0.5);
      p.title = phrases[0] + " for " + phrases[1] + " with " + phrases[2];
      if (long_title) p.title += " and " + phrases[3];
      p.title[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(p.title[0])));
      p.abstract = "We study " + phrases[0] + " and " + phrases[1] + ". Our approach combines " + phrases[2] +
                   " with " + phrases[3] + ", and it improves " + phrases[0] + " on standard benchmarks.";
      papers.push_back(std::move(p));
    }
  }
  std::stable_sort(papers.begin(), papers.end(), [](const Synthetic& a, const Synthetic& b) {
    return std::tie(a.year, a.month, a.day) < std::tie(b.year, b.month, b.day);
  });
  for (std::size_t i = 0; i < papers.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "fx.%04zu", i + 1);
    papers[i].id = buf;
  }

  std::filesystem::create_directories(out);
  std::ofstream pf(out / "papers.jsonl", std::ios::binary);
  for (const auto& p : papers) {
    ordered_json j;
    j["id"] = p.id;
    j["title"] = p.title;
    j["abstract"] = p.abstract;
    j["categories"] = p.categories;
    j["published_at"] = iso(p.year, p.month, p.day);
    if (draw.chance(0.3)) j["updated_at"] = iso(std::min(p.year + 1, 2025), p.month, p.day);
    pf << j.dump() << '\n';
  }

  std::ofstream cf(out / "citations.jsonl", std::ios::binary);
  std::size_t external = 0;
  for (std::size_t i = 1; i < papers.size(); ++i) {
    const auto& p = papers[i];
    std::set<std::size_t> chosen;
    const std::size_t want = std::min<std::size_t>(i, 3 + draw.below(5));
    for (int attempts = 0; chosen.size() < want && attempts < 200; ++attempts) {
      const std::size_t j = draw.below(i);
      const bool same = papers[j].group == p.group;
      if (same || draw.chance(0.2)) chosen.insert(j);
    }
    for (std::size_t j : chosen) {
      const auto& cited = papers[j];
      ordered_json e;
      e["citing"] = p.id;
      e["cited"] = cited.id;
      e["cited_year"] = cited.year;
      e["cited_fields"] = ordered_json::array();
      for (const char* f : kGroups[cited.group].fields) e["cited_fields"].push_back(f);
      cf << e.dump() << '\n';
    }
    for (int k = 0; k < 2; ++k) {
      ordered_json e;
      e["citing"] = p.id;
      e["cited"] = "ext." + std::to_string(++external);
      const auto& g = kGroups[draw.chance(0.7) ? p.group : draw.below(4)];
      if (draw.chance(0.03))
        e["cited_year"] = nullptr;
      else
        e["cited_year"] = p.year - static_cast<int>(draw.below(16));
      e["cited_fields"] = ordered_json::array();
      e["cited_fields"].push_back(g.fields[draw.below(g.fields.size())]);
      if (draw.chance(0.25)) e["cited_fields"].push_back(kGroups[draw.below(4)].fields[0]);
      cf << e.dump() << '\n';
    }
  }
  std::printf("wrote %zu papers to %s\n", papers.size(), out.string().c_str());
  return 0;
}
