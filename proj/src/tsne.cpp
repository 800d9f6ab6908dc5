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

#include "scitrace/tsne.hpp"

#include <cmath>
#include <limits>

#include "scitrace/common.hpp"

namespace scitrace {

namespace {

constexpr double kMinProbability = 1e-12;

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = (x.row(i) - x.row(j)).squaredNorm();
  return d;
}

// Conditional distribution p_{j|i} with entropy log(perplexity), found by
// bisection on the precision beta = 1 / (2 sigma^2).
void conditional_row(const Eigen::MatrixXd& dist, Eigen::Index i, double perplexity, Eigen::MatrixXd& p) {
  const Eigen::Index n = dist.rows();
  const double target = std::log(perplexity);
  double d_min = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < n; ++j)
    if (j != i) d_min = std::min(d_min, dist(i, j));

  double beta = 1.0, lo = 0.0, hi = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 200; ++iter) {
    double sum = 0.0, weighted = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) {
        p(i, j) = 0.0;
        continue;
      }
      const double shifted = dist(i, j) - d_min;
      const double v = std::exp(-beta * shifted);
      p(i, j) = v;
      sum += v;
      weighted += shifted * v;
    }
    const double entropy = std::log(sum) + beta * weighted / sum;
    const double diff = entropy - target;
    for (Eigen::Index j = 0; j < n; ++j) p(i, j) /= sum;
    if (std::abs(diff) < 1e-10) break;
    if (diff > 0) {
      lo = beta;
      beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
    } else {
      hi = beta;
      beta = 0.5 * (beta + lo);
    }
  }
}

double kl_divergence(const Eigen::MatrixXd& p, const Eigen::MatrixXd& y) {
  const Eigen::Index n = y.rows();
  Eigen::MatrixXd num(n, n);
  double z = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    num(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      num(i, j) = num(j, i) = 1.0 / (1.0 + (y.row(i) - y.row(j)).squaredNorm());
      z += 2.0 * num(i, j);
    }
  }
  double kl = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double pij = std::max(p(i, j), kMinProbability);
      const double qij = std::max(num(i, j) / z, kMinProbability);
      kl += pij * std::log(pij / qij);
    }
  return kl;
}

}  // namespace

Eigen::MatrixXd tsne_joint_probabilities(const Eigen::MatrixXd& points, double perplexity) {
  const Eigen::Index n = points.rows();
  const Eigen::MatrixXd dist = squared_distances(points);
  Eigen::MatrixXd cond(n, n);
  for (Eigen::Index i = 0; i < n; ++i) conditional_row(dist, i, perplexity, cond);
  Eigen::MatrixXd p = (cond + cond.transpose()) / (2.0 * static_cast<double>(n));
  return p;
}

TsneResult tsne_project(const Eigen::MatrixXd& points, const TsneConfig& config) {
  const Eigen::Index n = points.rows();
  if (n < 4) throw Error(ErrorKind::validation, "t-SNE needs at least 4 points, got " + std::to_string(n));
  if (!points.allFinite()) throw Error(ErrorKind::validation, "t-SNE input contains non-finite values");
  if (config.perplexity <= 0.0) throw Error(ErrorKind::invalid_argument, "perplexity must be positive");

  TsneResult result;
  result.perplexity_used = config.perplexity;
  if (config.perplexity >= static_cast<double>(n) / 3.0) {
    result.perplexity_used = static_cast<double>(n - 1) / 3.0;
    result.perplexity_lowered = true;
  }

  const Eigen::MatrixXd p = tsne_joint_probabilities(points, result.perplexity_used);

  Rng rng(config.seed);
  Eigen::MatrixXd y(n, 2);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < 2; ++k) y(i, k) = config.init_std * rng.gaussian();

  Eigen::MatrixXd velocity = Eigen::MatrixXd::Zero(n, 2);
  Eigen::MatrixXd gains = Eigen::MatrixXd::Ones(n, 2);
  Eigen::MatrixXd grad(n, 2);
  Eigen::MatrixXd num(n, n);

  for (std::size_t iter = 0; iter < config.iterations; ++iter) {
    const bool exaggerating = iter < config.exaggeration_iterations;
    const double exaggeration = exaggerating ? config.exaggeration : 1.0;
    const double momentum = exaggerating ? config.initial_momentum : config.final_momentum;

    double z = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      num(i, i) = 0.0;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        num(i, j) = num(j, i) = 1.0 / (1.0 + (y.row(i) - y.row(j)).squaredNorm());
        z += 2.0 * num(i, j);
      }
    }
    grad.setZero();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i == j) continue;
        const double q = std::max(num(i, j) / z, kMinProbability);
        const double coeff = 4.0 * (exaggeration * p(i, j) - q) * num(i, j);
        grad(i, 0) += coeff * (y(i, 0) - y(j, 0));
        grad(i, 1) += coeff * (y(i, 1) - y(j, 1));
      }
    }
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index k = 0; k < 2; ++k) {
        const bool same_sign = (grad(i, k) > 0) == (velocity(i, k) > 0);
        gains(i, k) = same_sign ? std::max(gains(i, k) * 0.8, 0.01) : gains(i, k) + 0.2;
        velocity(i, k) = momentum * velocity(i, k) - config.learning_rate * gains(i, k) * grad(i, k);
        y(i, k) += velocity(i, k);
      }
    y.rowwise() -= y.colwise().mean();

    if (iter + 1 == config.exaggeration_iterations) result.kl_after_exaggeration = kl_divergence(p, y);
  }
  result.kl_final = kl_divergence(p, y);
  if (config.iterations < config.exaggeration_iterations) result.kl_after_exaggeration = result.kl_final;
  if (!y.allFinite()) throw Error(ErrorKind::internal, "t-SNE diverged");
  result.embedding = std::move(y);
  return result;
}

}  // namespace scitrace
