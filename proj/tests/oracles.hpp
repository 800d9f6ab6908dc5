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


// Independent reference computations for the tests. Nothing here calls
// into the library; the point is to have a second route to every number.

#ifndef SCITRACE_TESTS_ORACLES_HPP
#define SCITRACE_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

namespace oracle {

struct Diversity {
  double simpson, shannon, gini;
};

// Straight from the definitions: proportions for Simpson and Shannon, the
// full double sum over raw contributions for Gini.
inline Diversity diversity(const std::vector<double>& c, double log_base = std::exp(1.0)) {
  double total = 0.0;
  for (double x : c) total += x;
  double sum_sq = 0.0, h = 0.0;
  for (double x : c) {
    const double p = x / total;
    sum_sq += p * p;
    if (p > 0) h -= p * std::log(p);
  }
  double pair_sum = 0.0;
  for (double a : c)
    for (double b : c) pair_sum += std::fabs(a - b);
  const double k = static_cast<double>(c.size());
  return {1.0 - sum_sq, h / std::log(log_base), pair_sum / (2.0 * k * total)};
}

struct Edge {
  int u, v;
  double w = 1.0;
};

// Q = 1/2m sum_ij (A_ij - k_i k_j / 2m) delta(c_i, c_j) over a dense matrix.
inline double modularity(int n, const std::vector<Edge>& edges, const std::vector<int>& part) {
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (const auto& e : edges) {
    a[e.u][e.v] += e.w;
    if (e.u != e.v) a[e.v][e.u] += e.w;
    else a[e.u][e.u] += e.w;  // a loop appears twice on the diagonal
  }
  std::vector<double> k(n, 0.0);
  double two_m = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      k[i] += a[i][j];
      two_m += a[i][j];
    }
  double q = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (part[i] == part[j]) q += a[i][j] - k[i] * k[j] / two_m;
  return q / two_m;
}

// Best modularity over every set partition of n nodes (restricted growth strings).
inline std::pair<double, std::vector<int>> best_partition(int n, const std::vector<Edge>& edges) {
  std::vector<int> rgs(n, 0), best;
  double best_q = -std::numeric_limits<double>::infinity();
  std::function<void(int, int)> rec = [&](int i, int max_label) {
    if (i == n) {
      const double q = modularity(n, edges, rgs);
      if (q > best_q + 1e-15) {
        best_q = q;
        best = rgs;
      }
      return;
    }
    for (int c = 0; c <= max_label + 1; ++c) {
      rgs[i] = c;
      rec(i + 1, std::max(max_label, c));
    }
  };
  rgs[0] = 0;
  rec(1, 0);
  return {best_q, best};
}

// True when two labelings induce the same grouping.
inline bool same_grouping(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if ((a[i] == a[j]) != (b[i] == b[j])) return false;
  return true;
}

// AUC by counting every positive/negative pair.
inline double auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double wins = 0.0;
  for (double p : pos)
    for (double q : neg) wins += p > q ? 1.0 : (p == q ? 0.5 : 0.0);
  return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

// Type-7 sample quantile, written out.
inline double quantile(std::vector<double> xs, double q) {
  std::sort(xs.begin(), xs.end());
  const double h = (static_cast<double>(xs.size()) - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = static_cast<std::size_t>(std::ceil(h));
  return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

}  // namespace oracle

#endif  // SCITRACE_TESTS_ORACLES_HPP
