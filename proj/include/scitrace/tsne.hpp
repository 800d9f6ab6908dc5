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

#ifndef SCITRACE_TSNE_HPP
#define SCITRACE_TSNE_HPP

#include <Eigen/Dense>

#include <cstdint>

namespace scitrace {

struct TsneConfig {
  double perplexity = 30.0;
  std::size_t iterations = 1000;
  std::uint64_t seed = 0;
  double learning_rate = 200.0;
  double exaggeration = 12.0;
  std::size_t exaggeration_iterations = 250;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  double init_std = 1e-4;
};

struct TsneResult {
  Eigen::MatrixXd embedding;           // N x 2
  double perplexity_used = 0.0;
  bool perplexity_lowered = false;
  double kl_after_exaggeration = 0.0;  // KL(P||Q) once early exaggeration ends
  double kl_final = 0.0;
};

/// Exact t-SNE over pairwise squared distances. Perplexity values >= N/3
/// are lowered to (N-1)/3. Throws Error(validation) for N < 4 or non-finite input.
TsneResult tsne_project(const Eigen::MatrixXd& points, const TsneConfig& config);

/// Symmetrized joint probabilities P (entries sum to 1) used by tsne_project.
Eigen::MatrixXd tsne_joint_probabilities(const Eigen::MatrixXd& points, double perplexity);

}  // namespace scitrace

#endif  // SCITRACE_TSNE_HPP
