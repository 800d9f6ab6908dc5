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

#ifndef SCITRACE_COMMON_HPP
#define SCITRACE_COMMON_HPP

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace scitrace {

// Error categories map one-to-one onto CLI exit codes and C API status codes.
enum class ErrorKind {
  validation,
  missing_prerequisite,
  external_service,
  invalid_argument,
  io,
  internal,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

// Proleptic Gregorian calendar date, UTC.
struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  // Accepts "YYYY-MM-DD" optionally followed by a time part ("T..." or " ...").
  static std::optional<Date> try_parse(std::string_view text);
  static Date parse(std::string_view text);
  static Date from_days(std::int64_t days_since_epoch);

  std::int64_t days_since_epoch() const;
  std::string iso() const;
  bool valid() const;

  friend auto operator<=>(const Date&, const Date&) = default;
};

// Gap in years between two dates: whole calendar years and months are counted
// exactly, the residual day difference uses 365.25-day years. Anniversaries
// therefore give integral results.
double years_between(const Date& later, const Date& earlier);

// Seeded generator used by every stochastic stage. The engine is
// mt19937_64; all derived distributions are implemented here so that the
// streams are identical across standard library implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  double uniform();                          // [0, 1)
  std::uint64_t uniform_index(std::uint64_t n);  // [0, n)
  double gaussian();                         // N(0, 1), Box-Muller

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

// Derives an independent stream seed from a base seed and a stream tag.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

// Shortest-stable decimal rendering with the given count of significant digits.
std::string format_real(double value, int significant_digits = 9);

// Quotes a CSV field when it contains a comma, quote, or line break.
std::string csv_field(std::string_view text);

std::string to_lower_ascii(std::string_view text);
std::string trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char delimiter);

std::string read_text_file(const std::filesystem::path& path);
// Writes via a sibling temp file and rename so readers never see partial output.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace scitrace

#endif  // SCITRACE_COMMON_HPP
