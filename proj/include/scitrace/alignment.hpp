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
#ifndef SCITRACE_ALIGNMENT_HPP
#define SCITRACE_ALIGNMENT_HPP

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scitrace/embedding.hpp"

namespace scitrace {

/// Largest absolute row sum of RᵀR - I.
double orthogonality_error(const Eigen::MatrixXd& rotation);
/// Largest absolute row sum of a - b.
double max_norm_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Orthogonal Q minimizing ||source Q - target||_F for row-aligned matrices:
/// Q = U Vᵀ where U S Vᵀ is the SVD of sourceᵀ target.
Eigen::MatrixXd procrustes_rotation(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target);

struct SharedRows {
  std::vector<std::string> keywords;  // in the first matrix's row order
  std::vector<Eigen::Index> first;
  std::vector<Eigen::Index> second;
};

SharedRows shared_rows(const EmbeddingMatrix& a, const EmbeddingMatrix& b);
Eigen::MatrixXd select_rows(const Eigen::MatrixXd& m, std::span<const Eigen::Index> rows);

/// Rotation taking the first snapshot towards the second, fitted on their shared vocabulary.
/// Throws Error(validation) if fewer than d keywords are shared.
Eigen::MatrixXd procrustes_align(const EmbeddingMatrix& from, const EmbeddingMatrix& to);

struct EmbeddingSeries {
  std::vector<EmbeddingMatrix> matrices;   // chronological
  std::vector<Eigen::MatrixXd> rotations;  // rotations[t] maps snapshot t onto t+1
  bool aligned = false;
};

/// Rotates every snapshot into the frame of the last one:
/// E_t <- E_t R_t R_{t+1} ... R_{T-2}, applied to all rows of E_t.
EmbeddingSeries align_series(EmbeddingSeries series);

struct Neighbor {
  std::string keyword;
  double cosine = 0.0;
};

/// Top-k rows by cosine similarity to the query row, excluding the query and
/// zero rows; ties broken lexicographically.
std::vector<Neighbor> nearest_keywords(const EmbeddingMatrix& embedding, std::string_view keyword,
                                       std::size_t k);

struct TrajectoryPoint {
  std::string label;
  std::optional<Eigen::VectorXd> vector;
  std::optional<std::array<double, 2>> xy;
};

struct Trajectory {
  std::string keyword;
  std::vector<TrajectoryPoint> points;  // one per snapshot
};

/// Throws Error(validation) if the keyword appears in no snapshot.
Trajectory build_trajectory(std::string_view keyword, const EmbeddingSeries& aligned);

/// JSON array of {keyword, points: [{label, xy}]}; absent points carry a null xy.
std::string trajectories_to_json(std::span<const Trajectory> trajectories);

}  // namespace scitrace

#endif  // SCITRACE_ALIGNMENT_HPP
