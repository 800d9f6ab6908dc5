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

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include <algorithm>
#include <cmath>
#include <thread>

#include "scitrace/harvest.hpp"

namespace scitrace {

namespace {

struct UrlParts {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

UrlParts split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorKind::invalid_argument, "url without scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string describe(const HttpRequest& r) { return r.method + " " + r.url; }

}  // namespace

HttpTransport::HttpTransport(std::chrono::seconds timeout) : timeout_(timeout) {}

HttpResponse HttpTransport::send(const HttpRequest& request) {
  const auto parts = split_url(request.url);
  httplib::Client client(parts.origin);
  client.set_connection_timeout(static_cast<time_t>(timeout_.count()));
  client.set_read_timeout(static_cast<time_t>(timeout_.count()));
  client.set_follow_location(true);

  httplib::Headers headers(request.headers.begin(), request.headers.end());
  httplib::Params params(request.params.begin(), request.params.end());
  const std::string target = httplib::append_query_params(parts.path, params);

  httplib::Result result;
  if (request.method == "GET") {
    result = client.Get(target, headers);
  } else if (request.method == "POST") {
    result = client.Post(target, headers, request.body, "application/json");
  } else {
    throw Error(ErrorKind::invalid_argument, "unsupported HTTP method " + request.method);
  }
  if (!result)
    throw Error(ErrorKind::external_service,
                describe(request) + " failed: " + httplib::to_string(result.error()));

  HttpResponse response;
  response.status = result->status;
  for (const auto& [name, value] : result->headers) response.headers[to_lower_ascii(name)] = value;
  response.body = result->body;
  return response;
}

std::string fixture_key(const HttpRequest& request) {
  auto params = request.params;
  std::sort(params.begin(), params.end());
  std::string canonical = request.method + "\n" + request.url + "\n";
  for (const auto& [k, v] : params) canonical += k + "=" + v + "&";
  canonical += "\n" + request.body;
  return sha256_hex(canonical);
}

std::string format_fixture(const HttpResponse& response) {
  std::string out = "STATUS " + std::to_string(response.status) + "\n";
  for (const auto& [name, value] : response.headers) out += name + ": " + value + "\n";
  out += "\n";
  out += response.body;
  return out;
}

HttpResponse parse_fixture(std::string_view text) {
  HttpResponse r;
  std::size_t pos = text.find('\n');
  if (pos == std::string_view::npos || text.substr(0, 7) != "STATUS ")
    throw Error(ErrorKind::validation, "fixture lacks a STATUS line");
  r.status = std::stoi(std::string(text.substr(7, pos - 7)));
  ++pos;
  while (true) {
    const std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) throw Error(ErrorKind::validation, "fixture lacks the header terminator");
    const auto line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty()) break;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) throw Error(ErrorKind::validation, "bad fixture header line");
    r.headers[to_lower_ascii(trim(line.substr(0, colon)))] = trim(line.substr(colon + 1));
  }
  r.body = std::string(text.substr(pos));
  return r;
}

FixtureTransport::FixtureTransport(std::filesystem::path dir) : dir_(std::move(dir)) {}

HttpResponse FixtureTransport::send(const HttpRequest& request) {
  const auto path = dir_ / (fixture_key(request) + ".http");
  if (!std::filesystem::exists(path))
    throw Error(ErrorKind::external_service, "no fixture for " + describe(request) + " (" + path.string() + ")");
  return parse_fixture(read_text_file(path));
}

RecordingTransport::RecordingTransport(Transport& inner, std::filesystem::path dir)
    : inner_(inner), dir_(std::move(dir)) {}

HttpResponse RecordingTransport::send(const HttpRequest& request) {
  auto response = inner_.send(request);
  // Only the headers replay cares about; dates and cookies would make fixtures churn.
  HttpResponse kept;
  kept.status = response.status;
  kept.body = response.body;
  for (const char* name : {"content-type", "retry-after"})
    if (auto it = response.headers.find(name); it != response.headers.end()) kept.headers.insert(*it);
  write_file_atomic(dir_ / (fixture_key(request) + ".http"), format_fixture(kept));
  return response;
}

double SystemClock::now() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

void SystemClock::sleep(double seconds) {
  if (seconds > 0) std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
}

void ManualClock::sleep(double seconds) {
  sleeps_.push_back(seconds);
  if (seconds > 0) now_ += seconds;
}

RateLimiter::RateLimiter(Clock& clock, double min_interval_seconds)
    : clock_(clock), min_interval_(min_interval_seconds) {
  if (min_interval_ < 0) throw Error(ErrorKind::invalid_argument, "rate limit interval must be >= 0");
}

void RateLimiter::acquire() {
  if (last_) {
    const double wait = *last_ + min_interval_ - clock_.now();
    if (wait > 0) clock_.sleep(wait);
  }
  last_ = clock_.now();
}

HttpResponse send_with_retry(Transport& transport, RateLimiter& limiter, Clock& clock, const RetryPolicy& policy,
                             const HttpRequest& request) {
  if (policy.max_attempts < 1) throw Error(ErrorKind::invalid_argument, "retry policy needs max_attempts >= 1");
  std::string last_failure;
  for (int attempt = 1;; ++attempt) {
    limiter.acquire();
    std::optional<double> retry_after;
    std::optional<HttpResponse> response;
    try {
      response = transport.send(request);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::external_service) throw;
      last_failure = e.what();
    }
    if (response) {
      if (response->status >= 200 && response->status < 300) return std::move(*response);
      last_failure = "HTTP " + std::to_string(response->status);
      if (response->status != 429 && response->status < 500)
        throw Error(ErrorKind::external_service, describe(request) + " returned " + last_failure);
      if (auto it = response->headers.find("retry-after"); it != response->headers.end()) {
        char* end = nullptr;
        const double v = std::strtod(it->second.c_str(), &end);
        if (end != it->second.c_str() && v >= 0) retry_after = v;
      }
    }
    if (attempt >= policy.max_attempts)
      throw Error(ErrorKind::external_service, describe(request) + " failed after " + std::to_string(attempt) +
                                                   " attempts: " + last_failure);
    clock.sleep(retry_after.value_or(policy.base_delay * std::pow(policy.factor, attempt - 1)));
  }
}

}  // namespace scitrace
