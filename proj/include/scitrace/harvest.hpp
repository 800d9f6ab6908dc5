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

#ifndef SCITRACE_HARVEST_HPP
#define SCITRACE_HARVEST_HPP

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scitrace/common.hpp"
#include "scitrace/corpus.hpp"

namespace scitrace {

// ---------------------------------------------------------------- transport

struct HttpRequest {
  std::string method = "GET";
  std::string url;  // scheme://host[:port]/path, without query
  std::vector<std::pair<std::string, std::string>> params;
  std::map<std::string, std::string> headers;
  std::string body;
};

struct HttpResponse {
  int status = 0;
  std::map<std::string, std::string> headers;  // keys lowercased
  std::string body;
};

/// Sends one request. Connection-level failures throw Error(external_service);
/// HTTP error statuses are returned, not thrown.
class Transport {
public:
  virtual ~Transport() = default;
  virtual HttpResponse send(const HttpRequest& request) = 0;
};

/// Live HTTPS/HTTP client.
class HttpTransport : public Transport {
public:
  explicit HttpTransport(std::chrono::seconds timeout = std::chrono::seconds(60));
  HttpResponse send(const HttpRequest& request) override;

private:
  std::chrono::seconds timeout_;
};

/// Stable name of the fixture file for a request: SHA-256 over method, url,
/// sorted params and body. Headers (and so API keys) do not take part.
std::string fixture_key(const HttpRequest& request);

/// Fixture file layout: "STATUS <code>", header lines "name: value", a blank
/// line, then the body verbatim.
std::string format_fixture(const HttpResponse& response);
HttpResponse parse_fixture(std::string_view text);

/// Replays <dir>/<fixture_key>.http. A missing file is an external-service
/// error naming the request.
class FixtureTransport : public Transport {
public:
  explicit FixtureTransport(std::filesystem::path dir);
  HttpResponse send(const HttpRequest& request) override;

private:
  std::filesystem::path dir_;
};

/// Forwards to another transport and records every response as a fixture.
class RecordingTransport : public Transport {
public:
  RecordingTransport(Transport& inner, std::filesystem::path dir);
  HttpResponse send(const HttpRequest& request) override;

private:
  Transport& inner_;
  std::filesystem::path dir_;
};

// ---------------------------------------------------------------- pacing

class Clock {
public:
  virtual ~Clock() = default;
  virtual double now() = 0;  // seconds, monotonic
  virtual void sleep(double seconds) = 0;
};

class SystemClock : public Clock {
public:
  double now() override;
  void sleep(double seconds) override;
};

/// Virtual time for tests and fixture replay; sleeping only advances now().
class ManualClock : public Clock {
public:
  double now() override { return now_; }
  void sleep(double seconds) override;
  const std::vector<double>& sleeps() const { return sleeps_; }

private:
  double now_ = 0.0;
  std::vector<double> sleeps_;
};

/// Spaces successive acquire() calls at least min_interval seconds apart.
class RateLimiter {
public:
  RateLimiter(Clock& clock, double min_interval_seconds = 3.0);
  void acquire();
  double min_interval() const { return min_interval_; }

private:
  Clock& clock_;
  double min_interval_;
  std::optional<double> last_;
};

struct RetryPolicy {
  double base_delay = 1.0;
  double factor = 2.0;
  int max_attempts = 5;
};

/// One request under the rate limit, retried on 429, 5xx and transport
/// errors with exponential backoff (Retry-After wins when present). Other
/// non-2xx statuses fail at once.
HttpResponse send_with_retry(Transport& transport, RateLimiter& limiter, Clock& clock, const RetryPolicy& policy,
                             const HttpRequest& request);

// ---------------------------------------------------------------- cursor

enum class HarvestSource { arxiv, citation_index };

struct HarvestCursor {
  HarvestSource source = HarvestSource::arxiv;
  std::string query;
  std::string last_token;  // arXiv: next start offset
  std::size_t fetched_count = 0;
  bool complete = false;
};

nlohmann::ordered_json cursor_to_json(const HarvestCursor& cursor);
HarvestCursor cursor_from_json(const nlohmann::json& j);
std::optional<HarvestCursor> load_cursor(const std::filesystem::path& path);
void save_cursor(const HarvestCursor& cursor, const std::filesystem::path& path);

// ---------------------------------------------------------------- arXiv metadata

struct RawPaperRecord {
  std::string id;  // arXiv id without version
  std::string title;
  std::string abstract;
  std::vector<std::string> categories;  // primary first
  std::string published;
  std::string updated;
  std::string journal_ref;
};

nlohmann::ordered_json raw_record_to_json(const RawPaperRecord& record);
RawPaperRecord raw_record_from_json(const nlohmann::json& j);
/// Papers-file record for validate_record; the caller adds keywords.
nlohmann::ordered_json raw_record_to_paper_json(const RawPaperRecord& record);

struct AtomPage {
  std::vector<RawPaperRecord> entries;
  std::optional<std::size_t> total_results;
};

/// Parses one Atom feed page. Throws Error(external_service) whose message
/// starts with "parse_failure" and names page_token.
AtomPage parse_atom_page(std::string_view xml, std::string_view page_token);

struct DateWindow {
  Date from;
  Date to;  // inclusive
};

struct ArxivOptions {
  std::string endpoint = "https://export.arxiv.org/api/query";
  std::size_t page_size = 100;
  std::optional<std::size_t> max_pages;  // stop early, leaving a resumable cursor
};

class ArxivHarvester {
public:
  ArxivHarvester(Transport& transport, RateLimiter& limiter, Clock& clock, RetryPolicy retry = {},
                 ArxivOptions options = {});

  using RecordSink = std::function<void(const RawPaperRecord&)>;
  using CursorSink = std::function<void(const HarvestCursor&)>;

  /// Streams records in service order. The cursor is updated after each page
  /// and handed to on_page; a cursor for a different query is rejected.
  HarvestCursor harvest(const std::string& query, const std::optional<DateWindow>& window,
                        std::optional<HarvestCursor> cursor, const RecordSink& on_record,
                        const CursorSink& on_page = {});

  static std::string search_query(const std::string& query, const std::optional<DateWindow>& window);

private:
  Transport& transport_;
  RateLimiter& limiter_;
  Clock& clock_;
  RetryPolicy retry_;
  ArxivOptions options_;
};

// ---------------------------------------------------------------- citation index

struct CitationGroup {
  std::string paper_id;
  std::optional<std::string> external_id;
  bool not_found = false;
  std::vector<CitationEdge> edges;
  std::size_t skipped_references = 0;  // no usable identifier
};

nlohmann::ordered_json citation_status_json(const CitationGroup& group);

struct CitationOptions {
  std::string endpoint = "https://api.semanticscholar.org/graph/v1/paper/batch";
  std::size_t max_batch = 100;
  std::string api_key;  // empty: anonymous
};

class CitationClient {
public:
  CitationClient(Transport& transport, RateLimiter& limiter, Clock& clock, RetryPolicy retry = {},
                 CitationOptions options = {});

  /// One batch lookup; 0 ids or more than max_batch is Error(invalid_argument).
  std::vector<CitationGroup> fetch_batch(const std::vector<std::string>& paper_ids);
  /// Splits into batches of max_batch in order.
  std::vector<CitationGroup> fetch_citations(const std::vector<std::string>& paper_ids);

  HttpRequest batch_request(const std::vector<std::string>& paper_ids) const;

private:
  Transport& transport_;
  RateLimiter& limiter_;
  Clock& clock_;
  RetryPolicy retry_;
  CitationOptions options_;
};

/// Reads SCIEVO_S2_API_KEY; empty when unset.
std::string citation_api_key_from_env();

}  // namespace scitrace

#endif  // SCITRACE_HARVEST_HPP
