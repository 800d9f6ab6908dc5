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

#include "scitrace/gcn.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "scitrace/common.hpp"

namespace scitrace {

namespace {

std::uint64_t pair_key(std::uint32_t u, std::uint32_t v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

Eigen::MatrixXd glorot(std::size_t rows, std::size_t cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = (2.0 * rng.uniform() - 1.0) * limit;
  return m;
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }
double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

struct AdamState {
  Eigen::MatrixXd m;
  Eigen::MatrixXd v;
  explicit AdamState(const Eigen::MatrixXd& like)
      : m(Eigen::MatrixXd::Zero(like.rows(), like.cols())), v(Eigen::MatrixXd::Zero(like.rows(), like.cols())) {}

  void step(Eigen::MatrixXd& param, const Eigen::MatrixXd& grad, const TrainingConfig& cfg, double lr,
            std::size_t t) {
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg.adam_epsilon);
  }
};

}  // namespace

GcnParams GcnParams::init(std::size_t nodes, const GcnDims& dims, std::uint64_t seed, double input_std) {
  if (nodes == 0 || dims.input == 0 || dims.hidden == 0 || dims.output == 0)
    throw Error(ErrorKind::invalid_argument, "GCN dimensions must be positive");
  Rng rng(seed);
  GcnParams p;
  p.seed = seed;
  p.input_embedding.resize(static_cast<Eigen::Index>(nodes), static_cast<Eigen::Index>(dims.input));
  for (Eigen::Index j = 0; j < p.input_embedding.cols(); ++j)
    for (Eigen::Index i = 0; i < p.input_embedding.rows(); ++i) p.input_embedding(i, j) = input_std * rng.gaussian();
  p.w1 = glorot(dims.input, dims.hidden, rng);
  p.w2 = glorot(dims.hidden, dims.output, rng);
  return p;
}

SparseMatrix normalized_adjacency(const CooccurrenceGraph& graph) {
  const auto n = static_cast<Eigen::Index>(graph.node_count());
  std::vector<double> degree(graph.node_count(), 1.0);  // self-loop
  for (const auto& e : graph.edges) {
    degree[e.u] += 1.0;
    degree[e.v] += 1.0;
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(graph.node_count() + 2 * graph.edge_count());
  for (std::size_t i = 0; i < graph.node_count(); ++i)
    triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0 / degree[i]);
  for (const auto& e : graph.edges) {
    const double w = 1.0 / std::sqrt(degree[e.u] * degree[e.v]);
    triplets.emplace_back(static_cast<int>(e.u), static_cast<int>(e.v), w);
    triplets.emplace_back(static_cast<int>(e.v), static_cast<int>(e.u), w);
  }
  SparseMatrix a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

namespace {

void check_dims(const GcnParams& p, const SparseMatrix& a) {
  if (a.rows() != p.input_embedding.rows() || a.cols() != a.rows())
    throw Error(ErrorKind::invalid_argument, "GCN input table has " + std::to_string(p.input_embedding.rows()) +
                                                 " rows but the graph has " + std::to_string(a.rows()) + " nodes");
  if (p.w1.rows() != p.input_embedding.cols() || p.w2.rows() != p.w1.cols())
    throw Error(ErrorKind::invalid_argument, "GCN weight shapes do not chain");
}

struct ForwardCache {
  Eigen::MatrixXd ax;  // Â X
  Eigen::MatrixXd h1;  // Â X W1
  Eigen::MatrixXd az;  // Â ReLU(h1)
  Eigen::MatrixXd out;
};

ForwardCache forward(const GcnParams& p, const SparseMatrix& a) {
  check_dims(p, a);
  ForwardCache c;
  c.ax = a * p.input_embedding;
  c.h1 = c.ax * p.w1;
  c.az = a * c.h1.cwiseMax(0.0);
  c.out = c.az * p.w2;
  return c;
}

}  // namespace

Eigen::MatrixXd gcn_forward(const GcnParams& params, const SparseMatrix& adjacency) {
  return forward(params, adjacency).out;
}

EmbeddingMatrix gcn_forward(const GcnParams& params, const CooccurrenceGraph& graph) {
  EmbeddingMatrix e;
  e.label = graph.label;
  e.vocab = graph.nodes;
  e.values = gcn_forward(params, normalized_adjacency(graph));
  return e;
}

std::vector<NodePair> negative_sample(const CooccurrenceGraph& graph, std::size_t count, std::uint64_t seed) {
  const std::uint64_t n = graph.node_count();
  const std::uint64_t all_pairs = n < 2 ? 0 : n * (n - 1) / 2;
  const std::uint64_t non_edges = all_pairs - std::min<std::uint64_t>(all_pairs, graph.edge_count());
  if (count > non_edges)
    throw Error(ErrorKind::validation, "graph too dense: requested " + std::to_string(count) +
                                           " negatives but only " + std::to_string(non_edges) + " non-edges exist");
  std::vector<NodePair> out;
  if (count == 0) return out;
  out.reserve(count);
  std::unordered_set<std::uint64_t> edges;
  edges.reserve(graph.edge_count() * 2);
  for (const auto& e : graph.edges) edges.insert(pair_key(e.u, e.v));
  Rng rng(seed);

  if (2 * count >= non_edges) {
    // Dense regime: enumerate every non-edge and take a partial shuffle.
    std::vector<NodePair> pool;
    pool.reserve(non_edges);
    for (std::uint32_t u = 0; u < n; ++u)
      for (std::uint32_t v = u + 1; v < n; ++v)
        if (!edges.count(pair_key(u, v))) pool.push_back({u, v});
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(pool.size() - i));
      std::swap(pool[i], pool[j]);
      out.push_back(pool[i]);
    }
    return out;
  }

  std::unordered_set<std::uint64_t> taken;
  taken.reserve(count * 2);
  while (out.size() < count) {
    auto u = static_cast<std::uint32_t>(rng.uniform_index(n));
    auto v = static_cast<std::uint32_t>(rng.uniform_index(n));
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    const auto key = pair_key(u, v);
    if (edges.count(key) || !taken.insert(key).second) continue;
    out.push_back({u, v});
  }
  return out;
}

double link_prediction_loss(const GcnParams& params, const SparseMatrix& adjacency, const LinkBatch& batch,
                            GcnGradients* grads) {
  if (batch.pairs.size() != batch.labels.size())
    throw Error(ErrorKind::invalid_argument, "link batch labels do not match pairs");
  if (batch.pairs.empty()) throw Error(ErrorKind::invalid_argument, "empty link batch");
  const ForwardCache c = forward(params, adjacency);
  const auto& e = c.out;
  const double scale = 1.0 / static_cast<double>(batch.pairs.size());

  double loss = 0.0;
  Eigen::MatrixXd d_out;
  if (grads) d_out = Eigen::MatrixXd::Zero(e.rows(), e.cols());
  for (std::size_t k = 0; k < batch.pairs.size(); ++k) {
    const auto [u, v] = batch.pairs[k];
    const double y = batch.labels[k];
    const double s = e.row(u).dot(e.row(v));
    loss += softplus(s) - y * s;
    if (grads) {
      const double g = (sigmoid(s) - y) * scale;
      d_out.row(u) += g * e.row(v);
      d_out.row(v) += g * e.row(u);
    }
  }
  loss *= scale;
  if (!grads) return loss;

  // Â is symmetric, so Âᵀ = Â in every backward product.
  grads->w2 = c.az.transpose() * d_out;
  const Eigen::MatrixXd d_z1 = adjacency * (d_out * params.w2.transpose());
  const Eigen::MatrixXd d_h1 = d_z1.cwiseProduct((c.h1.array() > 0.0).cast<double>().matrix());
  grads->w1 = c.ax.transpose() * d_h1;
  grads->input_embedding = adjacency * (d_h1 * params.w1.transpose());
  return loss;
}

TrainingResult train_link_prediction(const CooccurrenceGraph& graph, const TrainingConfig& config,
                                     std::uint64_t seed) {
  if (graph.edge_count() == 0)
    throw Error(ErrorKind::validation, "cannot train link prediction on a graph without edges" +
                                           (graph.label.empty() ? std::string() : " (" + graph.label + ")"));
  if (config.epochs == 0) throw Error(ErrorKind::invalid_argument, "epochs must be positive");

  const SparseMatrix adjacency = normalized_adjacency(graph);
  TrainingResult result;
  result.params = GcnParams::init(graph.node_count(), config.dims, derive_seed(seed, 0), config.input_std);

  std::vector<NodePair> positives;
  positives.reserve(graph.edge_count());
  for (const auto& e : graph.edges) positives.push_back({e.u, e.v});
  const std::uint64_t n = graph.node_count();
  const std::uint64_t non_edges = n * (n - 1) / 2 - graph.edge_count();
  const auto wanted = static_cast<std::size_t>(std::llround(config.negative_ratio * static_cast<double>(positives.size())));
  // A near-complete graph cannot supply a full 1:1 set; use every non-edge then.
  const std::size_t negatives = static_cast<std::size_t>(std::min<std::uint64_t>(wanted, non_edges));

  auto make_batch = [&](std::size_t epoch) {
    LinkBatch b;
    b.pairs = positives;
    b.labels.assign(positives.size(), 1.0);
    for (const auto& p : negative_sample(graph, negatives, derive_seed(seed, epoch + 1))) {
      b.pairs.push_back(p);
      b.labels.push_back(0.0);
    }
    return b;
  };

  AdamState s_x(result.params.input_embedding), s_w1(result.params.w1), s_w2(result.params.w2);
  const LinkBatch first = make_batch(0);
  GcnGradients grads;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const LinkBatch batch = epoch == 0 ? first : make_batch(epoch);
    const double loss = link_prediction_loss(result.params, adjacency, batch, &grads);
    result.epoch_loss.push_back(loss);
    const double lr = config.learning_rate *
                      (1.0 - static_cast<double>(epoch) / static_cast<double>(config.epochs));
    s_x.step(result.params.input_embedding, grads.input_embedding, config, lr, epoch + 1);
    s_w1.step(result.params.w1, grads.w1, config, lr, epoch + 1);
    s_w2.step(result.params.w2, grads.w2, config, lr, epoch + 1);
  }
  result.initial_loss = result.epoch_loss.front();
  result.final_loss = link_prediction_loss(result.params, adjacency, first);

  result.embedding.label = graph.label;
  result.embedding.vocab = graph.nodes;
  result.embedding.values = gcn_forward(result.params, adjacency);
  if (!result.embedding.values.allFinite())
    throw Error(ErrorKind::internal, "training produced non-finite embeddings for " + graph.label);
  return result;
}

double link_auc(const Eigen::MatrixXd& embedding, const std::vector<NodePair>& positives,
                const std::vector<NodePair>& negatives) {
  if (positives.empty() || negatives.empty()) throw Error(ErrorKind::invalid_argument, "AUC needs both classes");
  std::vector<double> pos, neg;
  for (const auto& p : positives) pos.push_back(embedding.row(p.u).dot(embedding.row(p.v)));
  for (const auto& p : negatives) neg.push_back(embedding.row(p.u).dot(embedding.row(p.v)));
  double wins = 0.0;
  for (double a : pos)
    for (double b : neg) wins += a > b ? 1.0 : (a == b ? 0.5 : 0.0);
  return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

}  // namespace scitrace
