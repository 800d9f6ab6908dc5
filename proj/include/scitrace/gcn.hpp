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
#ifndef SCITRACE_GCN_HPP
#define SCITRACE_GCN_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <vector>

#include "scitrace/embedding.hpp"
#include "scitrace/snapshot.hpp"

namespace scitrace {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct GcnDims {
  std::size_t input = 64;
  std::size_t hidden = 64;
  std::size_t output = 64;
};

/// Two-layer graph-convolutional encoder over a learnable per-node input table.
struct GcnParams {
  Eigen::MatrixXd input_embedding;  // nodes x input
  Eigen::MatrixXd w1;               // input x hidden
  Eigen::MatrixXd w2;               // hidden x output
  std::uint64_t seed = 0;

  /// Input table ~ N(0, input_std^2); weights Glorot-uniform.
  static GcnParams init(std::size_t nodes, const GcnDims& dims, std::uint64_t seed, double input_std = 0.1);
};

/// D^-1/2 (A + I) D^-1/2 over the binarized graph (edge weights ignored).
SparseMatrix normalized_adjacency(const CooccurrenceGraph& graph);

/// E = Â ReLU(Â X W1) W2. Throws Error(invalid_argument) on a dimension mismatch.
Eigen::MatrixXd gcn_forward(const GcnParams& params, const SparseMatrix& adjacency);
EmbeddingMatrix gcn_forward(const GcnParams& params, const CooccurrenceGraph& graph);

struct NodePair {
  std::uint32_t u;
  std::uint32_t v;
  friend bool operator==(const NodePair&, const NodePair&) = default;
};

/// Uniform sample without replacement of unordered non-adjacent pairs (u < v).
/// Throws Error(validation) when the graph has fewer than count non-edges.
std::vector<NodePair> negative_sample(const CooccurrenceGraph& graph, std::size_t count, std::uint64_t seed);

struct LinkBatch {
  std::vector<NodePair> pairs;
  std::vector<double> labels;  // 1 for edges, 0 for sampled non-edges
};

struct GcnGradients {
  Eigen::MatrixXd input_embedding;
  Eigen::MatrixXd w1;
  Eigen::MatrixXd w2;
};

/// Mean binary cross-entropy of sigmoid(e_u . e_v) over the batch. Fills
/// gradients with respect to every parameter tensor when grads is non-null.
double link_prediction_loss(const GcnParams& params, const SparseMatrix& adjacency, const LinkBatch& batch,
                            GcnGradients* grads = nullptr);

struct TrainingConfig {
  GcnDims dims;
  std::size_t epochs = 50;
  double learning_rate = 0.01;  // decays linearly towards 0 over the epochs
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double negative_ratio = 1.0;
  double input_std = 0.1;
};

struct TrainingResult {
  EmbeddingMatrix embedding;
  GcnParams params;
  std::vector<double> epoch_loss;  // loss of each epoch's batch before its update
  double initial_loss = 0.0;       // epoch-0 batch, initial parameters
  double final_loss = 0.0;         // epoch-0 batch, trained parameters
};

/// Full-batch link-prediction training with Adam; negatives re-sampled every
/// epoch. Deterministic given (graph, config, seed). Throws Error(validation)
/// for a graph without edges.
TrainingResult train_link_prediction(const CooccurrenceGraph& graph, const TrainingConfig& config,
                                     std::uint64_t seed);

/// Probability that a random positive pair scores above a random negative
/// pair under e_u . e_v (ties count half).
double link_auc(const Eigen::MatrixXd& embedding, const std::vector<NodePair>& positives,
                const std::vector<NodePair>& negatives);

}  // namespace scitrace

#endif  // SCITRACE_GCN_HPP
