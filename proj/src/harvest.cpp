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

#include "scitrace/harvest.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <cstdlib>
#include <set>
#include <sstream>

namespace scitrace {

using nlohmann::ordered_json;
namespace pt = boost::property_tree;

// ---------------------------------------------------------------- cursor

namespace {

const char* source_name(HarvestSource s) { return s == HarvestSource::arxiv ? "arxiv" : "citation_index"; }

}  // namespace

ordered_json cursor_to_json(const HarvestCursor& c) {
  ordered_json j;
  j["source"] = source_name(c.source);
  j["query"] = c.query;
  j["last_token"] = c.last_token;
  j["fetched_count"] = c.fetched_count;
  j["complete"] = c.complete;
  return j;
}

HarvestCursor cursor_from_json(const nlohmann::json& j) {
  try {
    HarvestCursor c;
    const auto source = j.at("source").get<std::string>();
    if (source == "arxiv")
      c.source = HarvestSource::arxiv;
    else if (source == "citation_index")
      c.source = HarvestSource::citation_index;
    else
      throw Error(ErrorKind::validation, "unknown cursor source '" + source + "'");
    c.query = j.at("query").get<std::string>();
    c.last_token = j.at("last_token").get<std::string>();
    c.fetched_count = j.at("fetched_count").get<std::size_t>();
    c.complete = j.value("complete", false);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::validation, std::string("bad cursor: ") + e.what());
  }
}

std::optional<HarvestCursor> load_cursor(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return std::nullopt;
  const auto text = read_text_file(path);
  auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::validation, "cursor file is not JSON: " + path.string());
  return cursor_from_json(j);
}

void save_cursor(const HarvestCursor& cursor, const std::filesystem::path& path) {
  write_file_atomic(path, cursor_to_json(cursor).dump() + "\n");
}

// ---------------------------------------------------------------- raw records

ordered_json raw_record_to_json(const RawPaperRecord& r) {
  ordered_json j;
  j["id"] = r.id;
  j["title"] = r.title;
  j["abstract"] = r.abstract;
  j["categories"] = r.categories;
  j["published"] = r.published;
  j["updated"] = r.updated;
  if (!r.journal_ref.empty()) j["journal_ref"] = r.journal_ref;
  return j;
}

RawPaperRecord raw_record_from_json(const nlohmann::json& j) {
  try {
    RawPaperRecord r;
    r.id = j.at("id").get<std::string>();
    r.title = j.value("title", "");
    r.abstract = j.value("abstract", "");
    r.categories = j.value("categories", std::vector<std::string>{});
    r.published = j.value("published", "");
    r.updated = j.value("updated", "");
    r.journal_ref = j.value("journal_ref", "");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::validation, std::string("bad raw record: ") + e.what());
  }
}

ordered_json raw_record_to_paper_json(const RawPaperRecord& r) {
  ordered_json j;
  j["id"] = r.id;
  j["title"] = r.title;
  j["abstract"] = r.abstract;
  j["categories"] = r.categories;
  j["published_at"] = r.published.substr(0, 10);
  if (!r.updated.empty() && r.updated != r.published) j["updated_at"] = r.updated.substr(0, 10);
  if (!r.journal_ref.empty()) j["venue"] = r.journal_ref;
  return j;
}

// ---------------------------------------------------------------- Atom

namespace {

std::string collapse_spaces(std::string_view text) {
  std::string out;
  bool space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
      continue;
    }
    if (space) out.push_back(' ');
    space = false;
    out.push_back(c);
  }
  return out;
}

// "http://arxiv.org/abs/2101.00001v2" -> "2101.00001"
std::optional<std::string> arxiv_id_from_url(const std::string& url) {
  const auto at = url.find("/abs/");
  if (at == std::string::npos) return std::nullopt;
  std::string id = url.substr(at + 5);
  auto v = id.find_last_of('v');
  if (v != std::string::npos && v + 1 < id.size() &&
      id.find_first_not_of("0123456789", v + 1) == std::string::npos)
    id.resize(v);
  if (id.empty()) return std::nullopt;
  return id;
}

[[noreturn]] void parse_failure(std::string_view token, const std::string& what) {
  throw Error(ErrorKind::external_service, "parse_failure at page " + std::string(token) + ": " + what);
}

}  // namespace

AtomPage parse_atom_page(std::string_view xml, std::string_view page_token) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(xml)};
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    parse_failure(page_token, e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  auto feed = tree.get_child_optional("feed");
  if (!feed) parse_failure(page_token, "no <feed> element");

  AtomPage page;
  if (auto total = feed->get_optional<std::size_t>("opensearch:totalResults")) page.total_results = *total;
  std::size_t index = 0;
  for (const auto& [name, entry] : *feed) {
    if (name != "entry") continue;
    const auto where = "entry " + std::to_string(index++);
    const auto url = entry.get<std::string>("id", "");
    if (url.find("/api/errors") != std::string::npos)
      throw Error(ErrorKind::external_service,
                  "service error at page " + std::string(page_token) + ": " + entry.get<std::string>("summary", ""));
    RawPaperRecord r;
    auto id = arxiv_id_from_url(url);
    if (!id) parse_failure(page_token, where + " has no usable <id>");
    r.id = *id;
    auto title = entry.get_optional<std::string>("title");
    auto summary = entry.get_optional<std::string>("summary");
    auto published = entry.get_optional<std::string>("published");
    if (!title || !summary || !published) parse_failure(page_token, where + " (" + r.id + ") lacks title/summary/published");
    r.title = collapse_spaces(*title);
    r.abstract = collapse_spaces(*summary);
    r.published = trim(*published);
    r.updated = trim(entry.get<std::string>("updated", ""));
    r.journal_ref = collapse_spaces(entry.get<std::string>("arxiv:journal_ref", ""));
    if (auto primary = entry.get_optional<std::string>("arxiv:primary_category.<xmlattr>.term"))
      r.categories.push_back(*primary);
    for (const auto& [child, node] : entry) {
      if (child != "category") continue;
      auto term = node.get<std::string>("<xmlattr>.term", "");
      if (!term.empty() && std::find(r.categories.begin(), r.categories.end(), term) == r.categories.end())
        r.categories.push_back(term);
    }
    page.entries.push_back(std::move(r));
  }
  return page;
}

// ---------------------------------------------------------------- arXiv harvester

ArxivHarvester::ArxivHarvester(Transport& transport, RateLimiter& limiter, Clock& clock, RetryPolicy retry,
                               ArxivOptions options)
    : transport_(transport), limiter_(limiter), clock_(clock), retry_(retry), options_(std::move(options)) {
  if (options_.page_size == 0) throw Error(ErrorKind::invalid_argument, "page size must be positive");
}

std::string ArxivHarvester::search_query(const std::string& query, const std::optional<DateWindow>& window) {
  if (!window) return query;
  auto stamp = [](const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d%02d%02d", d.year, d.month, d.day);
    return std::string(buf);
  };
  return "(" + query + ") AND submittedDate:[" + stamp(window->from) + "0000 TO " + stamp(window->to) + "2359]";
}

HarvestCursor ArxivHarvester::harvest(const std::string& query, const std::optional<DateWindow>& window,
                                      std::optional<HarvestCursor> cursor, const RecordSink& on_record,
                                      const CursorSink& on_page) {
  const std::string full_query = search_query(query, window);
  HarvestCursor c;
  c.source = HarvestSource::arxiv;
  c.query = full_query;
  c.last_token = "0";
  if (cursor) {
    if (cursor->source != HarvestSource::arxiv || cursor->query != full_query)
      throw Error(ErrorKind::invalid_argument, "cursor belongs to a different harvest: " + cursor->query);
    c = *cursor;
  }
  if (c.complete) return c;

  std::size_t start = 0;
  try {
    start = std::stoul(c.last_token);
  } catch (const std::exception&) {
    throw Error(ErrorKind::validation, "bad arXiv cursor token '" + c.last_token + "'");
  }
  for (std::size_t pages = 0; !options_.max_pages || pages < *options_.max_pages; ++pages) {
    HttpRequest req;
    req.url = options_.endpoint;
    req.params = {{"search_query", full_query},
                  {"start", std::to_string(start)},
                  {"max_results", std::to_string(options_.page_size)},
                  {"sortBy", "submittedDate"},
                  {"sortOrder", "ascending"}};
    const auto response = send_with_retry(transport_, limiter_, clock_, retry_, req);
    const auto page = parse_atom_page(response.body, "start=" + std::to_string(start));
    for (const auto& r : page.entries) on_record(r);
    start += page.entries.size();
    c.last_token = std::to_string(start);
    c.fetched_count += page.entries.size();
    c.complete = page.entries.size() < options_.page_size || (page.total_results && start >= *page.total_results);
    if (on_page) on_page(c);
    if (c.complete) break;
  }
  return c;
}

// ---------------------------------------------------------------- citation index

ordered_json citation_status_json(const CitationGroup& g) {
  ordered_json j;
  j["id"] = g.paper_id;
  j["external_id"] = g.external_id ? ordered_json(*g.external_id) : ordered_json(nullptr);
  j["status"] = g.not_found ? "not_found" : "found";
  j["references"] = g.edges.size();
  j["skipped_references"] = g.skipped_references;
  return j;
}

std::string citation_api_key_from_env() {
  const char* v = std::getenv("SCIEVO_S2_API_KEY");
  return v ? std::string(v) : std::string();
}

CitationClient::CitationClient(Transport& transport, RateLimiter& limiter, Clock& clock, RetryPolicy retry,
                               CitationOptions options)
    : transport_(transport), limiter_(limiter), clock_(clock), retry_(retry), options_(std::move(options)) {
  if (options_.max_batch == 0) throw Error(ErrorKind::invalid_argument, "citation batch size must be positive");
}

HttpRequest CitationClient::batch_request(const std::vector<std::string>& paper_ids) const {
  HttpRequest req;
  req.method = "POST";
  req.url = options_.endpoint;
  req.params = {{"fields", "externalIds,references.paperId,references.externalIds,references.year,"
                           "references.fieldsOfStudy"}};
  ordered_json body;
  body["ids"] = ordered_json::array();
  for (const auto& id : paper_ids) body["ids"].push_back("arXiv:" + id);
  req.body = body.dump();
  req.headers["content-type"] = "application/json";
  if (!options_.api_key.empty()) req.headers["x-api-key"] = options_.api_key;
  return req;
}

namespace {

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) out += (out.empty() ? "" : ",") + id;
  return out;
}

CitationGroup parse_group(const std::string& paper_id, const nlohmann::json& item) {
  CitationGroup g;
  g.paper_id = paper_id;
  if (item.is_null()) {
    g.not_found = true;
    return g;
  }
  if (!item.is_object()) throw Error(ErrorKind::external_service, "unexpected batch item for " + paper_id);
  if (auto pid = item.find("paperId"); pid != item.end() && pid->is_string()) g.external_id = pid->get<std::string>();
  std::set<std::string> seen;
  auto refs = item.find("references");
  if (refs == item.end() || refs->is_null()) return g;
  if (!refs->is_array()) throw Error(ErrorKind::external_service, "references of " + paper_id + " is not a list");
  for (const auto& ref : *refs) {
    std::string cited;
    if (auto ext = ref.find("externalIds"); ext != ref.end() && ext->is_object())
      if (auto ax = ext->find("ArXiv"); ax != ext->end() && ax->is_string()) cited = ax->get<std::string>();
    if (cited.empty())
      if (auto pid = ref.find("paperId"); pid != ref.end() && pid->is_string()) cited = pid->get<std::string>();
    if (cited.empty() || cited == paper_id || !seen.insert(cited).second) {
      ++g.skipped_references;
      continue;
    }
    CitationEdge e;
    e.citing = paper_id;
    e.cited = cited;
    if (auto y = ref.find("year"); y != ref.end() && y->is_number_integer()) e.cited_year = y->get<int>();
    if (auto f = ref.find("fieldsOfStudy"); f != ref.end() && f->is_array())
      for (const auto& field : *f)
        if (field.is_string()) e.cited_fields.insert(field.get<std::string>());
    g.edges.push_back(std::move(e));
  }
  return g;
}

}  // namespace

std::vector<CitationGroup> CitationClient::fetch_batch(const std::vector<std::string>& paper_ids) {
  if (paper_ids.empty()) throw Error(ErrorKind::invalid_argument, "citation lookup needs at least one id");
  if (paper_ids.size() > options_.max_batch)
    throw Error(ErrorKind::invalid_argument, "citation batch of " + std::to_string(paper_ids.size()) +
                                                 " exceeds the maximum of " + std::to_string(options_.max_batch));
  HttpResponse response;
  try {
    response = send_with_retry(transport_, limiter_, clock_, retry_, batch_request(paper_ids));
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(e.what()) + " [batch: " + join_ids(paper_ids) + "]");
  }
  auto body = nlohmann::json::parse(response.body, nullptr, false);
  if (body.is_discarded() || !body.is_array() || body.size() != paper_ids.size())
    throw Error(ErrorKind::external_service,
                "parse_failure in citation batch response [batch: " + join_ids(paper_ids) + "]");
  std::vector<CitationGroup> out;
  out.reserve(paper_ids.size());
  for (std::size_t i = 0; i < paper_ids.size(); ++i) out.push_back(parse_group(paper_ids[i], body[i]));
  return out;
}

std::vector<CitationGroup> CitationClient::fetch_citations(const std::vector<std::string>& paper_ids) {
  if (paper_ids.empty()) throw Error(ErrorKind::invalid_argument, "citation lookup needs at least one id");
  std::vector<CitationGroup> out;
  for (std::size_t at = 0; at < paper_ids.size(); at += options_.max_batch) {
    const auto end = std::min(paper_ids.size(), at + options_.max_batch);
    auto part = fetch_batch({paper_ids.begin() + static_cast<std::ptrdiff_t>(at),
                             paper_ids.begin() + static_cast<std::ptrdiff_t>(end)});
    std::move(part.begin(), part.end(), std::back_inserter(out));
  }
  return out;
}

}  // namespace scitrace
