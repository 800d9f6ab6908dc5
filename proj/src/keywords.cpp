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

#include "scitrace/keywords.hpp"

#include <csignal>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <set>
#include <thread>

#include "scitrace_assets.hpp"

namespace scitrace {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }
// Bytes >= 0x80 belong to UTF-8 sequences and are kept as word characters.
bool is_word(char c) {
  auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u) != 0;
}

}  // namespace

// ---------------------------------------------------------------- normalization

std::optional<Keyword> try_normalize_keyword(std::string_view raw) {
  std::string lowered = to_lower_ascii(raw);
  std::size_t b = 0, e = lowered.size();
  while (b < e && (is_space(lowered[b]) || is_punct(lowered[b]))) ++b;
  while (e > b && (is_space(lowered[e - 1]) || is_punct(lowered[e - 1]))) --e;
  Keyword kw;
  std::string token;
  for (std::size_t i = b; i < e; ++i) {
    if (is_space(lowered[i])) {
      if (!token.empty()) kw.tokens.push_back(std::move(token));
      token.clear();
    } else {
      token.push_back(lowered[i]);
    }
  }
  if (!token.empty()) kw.tokens.push_back(std::move(token));
  if (kw.tokens.empty() || kw.tokens.size() > kMaxKeywordTokens) return std::nullopt;
  for (std::size_t i = 0; i < kw.tokens.size(); ++i) {
    if (i) kw.surface.push_back(' ');
    kw.surface += kw.tokens[i];
  }
  return kw;
}

Keyword normalize_keyword(std::string_view raw) {
  auto kw = try_normalize_keyword(raw);
  if (!kw) throw Error(ErrorKind::validation, "keyword is empty or too long after normalization: '" +
                                                  std::string(raw) + "'");
  return *kw;
}

// ---------------------------------------------------------------- sources

KeywordSource parse_keyword_source(std::string_view name) {
  if (name == "title") return KeywordSource::title;
  if (name == "abstract") return KeywordSource::abstract;
  if (name == "both") return KeywordSource::both;
  throw Error(ErrorKind::invalid_argument, "unknown keyword source '" + std::string(name) +
                                               "' (expected title, abstract or both)");
}

std::string_view to_string(KeywordSource source) {
  switch (source) {
    case KeywordSource::title: return "title";
    case KeywordSource::abstract: return "abstract";
    case KeywordSource::both: return "both";
  }
  return "title";
}

std::vector<Keyword> paper_keywords(const Paper& paper, KeywordSource source) {
  std::vector<Keyword> out;
  auto append = [&out](const std::vector<Keyword>& kws) {
    for (const auto& k : kws)
      if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
  };
  if (source != KeywordSource::abstract) append(paper.title_keywords);
  if (source != KeywordSource::title) append(paper.abstract_keywords);
  return out;
}

// ---------------------------------------------------------------- stopwords

StopwordList::StopwordList(std::vector<std::string> words) {
  for (auto& w : words) words_.insert(to_lower_ascii(trim(w)));
}

StopwordList StopwordList::parse(std::string_view text) {
  std::vector<std::string> words;
  for (const auto& line : split(text, '\n')) {
    auto w = trim(line);
    if (w.empty() || w.front() == '#') continue;
    words.push_back(std::move(w));
  }
  return StopwordList(std::move(words));
}

const StopwordList& StopwordList::builtin() {
  static const StopwordList list = parse(assets::kStopwords);
  return list;
}

// ---------------------------------------------------------------- fallback extractor

std::vector<Keyword> chunk_keywords(std::string_view text, const StopwordList& stopwords,
                                    std::size_t limit) {
  const std::string lowered = to_lower_ascii(text);

  // Tokenize into runs; punctuation (other than a hyphen or apostrophe joining
  // two word characters) terminates the current run.
  std::vector<std::vector<std::string>> runs(1);
  std::string token;
  auto flush_token = [&] {
    if (token.empty()) return;
    if (stopwords.contains(token)) {
      if (!runs.back().empty()) runs.emplace_back();
    } else {
      runs.back().push_back(token);
    }
    token.clear();
  };
  auto break_run = [&] {
    flush_token();
    if (!runs.back().empty()) runs.emplace_back();
  };
  for (std::size_t i = 0; i < lowered.size(); ++i) {
    const char c = lowered[i];
    if (is_word(c)) {
      token.push_back(c);
    } else if ((c == '-' || c == '\'') && !token.empty() && i + 1 < lowered.size() &&
               is_word(lowered[i + 1])) {
      token.push_back(c);
    } else if (is_space(c)) {
      flush_token();
    } else {
      break_run();
    }
  }
  flush_token();

  struct Candidate {
    std::string surface;
    std::size_t count = 0;
    std::size_t first = 0;
  };
  std::vector<Candidate> candidates;
  std::unordered_map<std::string, std::size_t> where;
  std::size_t position = 0;
  for (const auto& run : runs) {
    for (std::size_t start = 0; start < run.size(); start += kMaxKeywordTokens) {
      const std::size_t end = std::min(run.size(), start + kMaxKeywordTokens);
      std::string surface;
      for (std::size_t i = start; i < end; ++i) {
        if (i > start) surface.push_back(' ');
        surface += run[i];
      }
      auto [it, inserted] = where.emplace(surface, candidates.size());
      if (inserted) candidates.push_back({surface, 0, position});
      ++candidates[it->second].count;
      ++position;
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.first < b.first;
  });
  std::vector<Keyword> out;
  for (const auto& c : candidates) {
    if (out.size() >= limit) break;
    if (auto kw = try_normalize_keyword(c.surface)) out.push_back(std::move(*kw));
  }
  return out;
}

ExtractedKeywords extract_keywords_fallback(std::string_view title, std::string_view abstract,
                                            const StopwordList& stopwords,
                                            const FallbackLimits& limits) {
  if (trim(title).empty()) throw Error(ErrorKind::validation, "empty title");
  return {chunk_keywords(title, stopwords, limits.title),
          chunk_keywords(abstract, stopwords, limits.abstract)};
}

std::vector<ExtractedKeywords> FallbackExtractor::extract(std::span<const ExtractionInput> inputs) {
  std::vector<ExtractedKeywords> out;
  out.reserve(inputs.size());
  for (const auto& in : inputs)
    out.push_back(extract_keywords_fallback(in.title, in.abstract, stopwords_, limits_));
  return out;
}

// ---------------------------------------------------------------- command extractor

namespace {

void write_all(int fd, const std::string& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::write(fd, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      return;  // child closed its stdin; the exit status reports the failure
    }
    off += static_cast<std::size_t>(n);
  }
}

std::vector<Keyword> parse_keyword_array(const nlohmann::json& j, const char* key) {
  std::vector<Keyword> out;
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return out;
  if (!it->is_array())
    throw Error(ErrorKind::external_service, std::string("extractor output: ") + key + " is not an array");
  for (const auto& raw : *it) {
    if (!raw.is_string()) continue;
    auto kw = try_normalize_keyword(raw.get<std::string>());
    if (kw && std::find(out.begin(), out.end(), *kw) == out.end()) out.push_back(std::move(*kw));
  }
  return out;
}

}  // namespace

std::vector<ExtractedKeywords> CommandExtractor::extract(std::span<const ExtractionInput> inputs) {
  std::string payload;
  for (const auto& in : inputs) {
    nlohmann::ordered_json j;
    j["title"] = in.title;
    j["abstract"] = in.abstract;
    payload += j.dump();
    payload += '\n';
  }

  int to_child[2], from_child[2];
  if (::pipe(to_child) != 0) throw Error(ErrorKind::io, "pipe() failed");
  if (::pipe(from_child) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw Error(ErrorKind::io, "pipe() failed");
  }
  pid_t pid = ::fork();
  if (pid < 0) throw Error(ErrorKind::io, "fork() failed");
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::close(to_child[0]);
    ::close(to_child[1]);
    ::close(from_child[0]);
    ::close(from_child[1]);
    ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);

  std::thread writer([fd = to_child[1], &payload] {
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGPIPE);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);
    write_all(fd, payload);
    ::close(fd);
  });

  std::string output;
  char buf[4096];
  while (true) {
    ssize_t n = ::read(from_child[0], buf, sizeof buf);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    output.append(buf, static_cast<std::size_t>(n));
  }
  ::close(from_child[0]);
  writer.join();
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
    throw Error(ErrorKind::external_service,
                "keyword extractor command failed (status " + std::to_string(status) + "): " + command_);

  std::vector<ExtractedKeywords> out;
  for (const auto& line : split(output, '\n')) {
    if (trim(line).empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw Error(ErrorKind::external_service, "keyword extractor emitted a non-JSON line");
    out.push_back({parse_keyword_array(j, "title_keywords"), parse_keyword_array(j, "abstract_keywords")});
  }
  if (out.size() != inputs.size())
    throw Error(ErrorKind::external_service, "keyword extractor returned " + std::to_string(out.size()) +
                                                 " records for " + std::to_string(inputs.size()) + " inputs");
  return out;
}

// ---------------------------------------------------------------- vocabulary

Vocabulary::Vocabulary(std::vector<Entry> entries, std::size_t min_count)
    : entries_(std::move(entries)), min_count_(min_count) {
  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.keyword < b.keyword;
  });
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].frequency < min_count_)
      throw Error(ErrorKind::internal, "vocabulary entry below min_count: " + entries_[i].keyword);
    index_.emplace(entries_[i].keyword, i);
  }
}

bool Vocabulary::contains(std::string_view keyword) const { return index_of(keyword) >= 0; }

std::ptrdiff_t Vocabulary::index_of(std::string_view keyword) const {
  auto it = index_.find(std::string(keyword));
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

std::map<std::string, std::size_t> keyword_counts(std::span<const Paper* const> papers,
                                                  KeywordSource source) {
  std::map<std::string, std::size_t> counts;
  for (const Paper* p : papers) {
    std::set<std::string> seen;
    for (const auto& k : paper_keywords(*p, source))
      if (seen.insert(k.surface).second) ++counts[k.surface];
  }
  return counts;
}

Vocabulary build_vocabulary(std::span<const Paper* const> papers, KeywordSource source,
                            std::size_t min_count) {
  std::vector<Vocabulary::Entry> entries;
  for (auto& [kw, n] : keyword_counts(papers, source))
    if (n >= min_count) entries.push_back({kw, n});
  return Vocabulary(std::move(entries), min_count);
}

}  // namespace scitrace
