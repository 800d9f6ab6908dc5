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


#include <set>

#include "doctest.h"
#include "scitrace/common.hpp"
#include "support.hpp"

using namespace scitrace;

TEST_CASE("dates parse, print and order") {
  auto d = Date::parse("2023-02-28T10:00:00Z");
  CHECK(d.iso() == "2023-02-28");
  CHECK(Date::parse("2024-02-29").valid());
  CHECK_FALSE(Date::try_parse("2023-02-29"));
  CHECK_FALSE(Date::try_parse("2023-2-01"));
  CHECK_FALSE(Date::try_parse("2023-02-01X"));
  CHECK_THROWS_AS(Date::parse("soon"), Error);
  CHECK(Date{1999, 12, 31} < Date{2000, 1, 1});
  for (std::int64_t n : {-800000, -1, 0, 1, 11016, 19000, 2932896})
    CHECK(Date::from_days(n).days_since_epoch() == n);
  CHECK(Date{1970, 1, 1}.days_since_epoch() == 0);
  CHECK(Date{2000, 3, 1}.days_since_epoch() == 11017);
}

TEST_CASE("years_between counts anniversaries exactly") {
  CHECK(years_between(Date{2020, 6, 1}, Date{2015, 6, 1}) == 5.0);
  CHECK(years_between(Date{2020, 6, 1}, Date{2020, 6, 1}) == 0.0);
  CHECK(years_between(Date{2021, 1, 1}, Date{2020, 7, 1}) == 0.5);
  CHECK(years_between(Date{2020, 6, 11}, Date{2020, 6, 1}) == doctest::Approx(10.0 / 365.25));
  CHECK(years_between(Date{2019, 1, 1}, Date{2021, 1, 1}) < 0);
}

TEST_CASE("rng streams are reproducible") {
  Rng a(99), b(99), c(100);
  for (int i = 0; i < 50; ++i) {
    auto x = a.next_u64();
    CHECK(x == b.next_u64());
    (void)c;
  }
  Rng u(5);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    auto k = u.uniform_index(7);
    CHECK(k < 7);
    seen.insert(k);
    double x = u.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  CHECK(seen.size() == 7);
  CHECK_THROWS_AS(u.uniform_index(0), Error);

  Rng g(11);
  double sum = 0, sq = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double x = g.gaussian();
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.03);
  CHECK(std::abs(sq / n - 1.0) < 0.05);

  std::vector<int> v{1, 2, 3, 4, 5, 6}, w = v;
  Rng s1(3), s2(3);
  s1.shuffle(v);
  s2.shuffle(w);
  CHECK(v == w);
  CHECK(std::multiset<int>(v.begin(), v.end()) == std::multiset<int>{1, 2, 3, 4, 5, 6});
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
}

TEST_CASE("sha256 matches published vectors") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("text helpers") {
  CHECK(format_real(0.5) == "0.5");
  CHECK(format_real(0.0) == "0");
  CHECK(format_real(1.0 / 3.0) == "0.333333333");
  CHECK(format_real(1e-20) == "1e-20");
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(trim("  x y \n") == "x y");
  CHECK(split("a,,b", ',') == std::vector<std::string>{"a", "", "b"});
  CHECK(to_lower_ascii("MiXeD") == "mixed");
}

TEST_CASE("atomic writes replace whole files") {
  testing::TempDir dir("common");
  auto p = dir / "nested/file.txt";
  write_file_atomic(p, "first");
  write_file_atomic(p, "second");
  CHECK(read_text_file(p) == "second");
  CHECK_FALSE(std::filesystem::exists(dir / "nested/file.txt.tmp"));
  CHECK_THROWS_AS(read_text_file(dir / "absent"), Error);
}
