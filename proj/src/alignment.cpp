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

#include "scitrace/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "json.hpp"
#include "scitrace/common.hpp"

namespace scitrace {

double orthogonality_error(const Eigen::MatrixXd& r) {
  const Eigen::MatrixXd d = r.transpose() * r - Eigen::MatrixXd::Identity(r.cols(), r.cols());
  return d.cwiseAbs().rowwise().sum().maxCoeff();
}

double max_norm_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().rowwise().sum().maxCoeff();
}

Eigen::MatrixXd procrustes_rotation(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target) {
  if (source.rows() != target.rows() || source.cols() != target.cols())
    throw Error(ErrorKind::invalid_argument, "Procrustes inputs must have identical shapes");
  const Eigen::MatrixXd cross = source.transpose() * target;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

SharedRows shared_rows(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
  std::unordered_map<std::string_view, Eigen::Index> in_b;
  for (std::size_t i = 0; i < b.vocab.size(); ++i) in_b.emplace(b.vocab[i], static_cast<Eigen::Index>(i));
  SharedRows s;
  for (std::size_t i = 0; i < a.vocab.size(); ++i) {
    auto it = in_b.find(a.vocab[i]);
    if (it == in_b.end()) continue;
    s.keywords.push_back(a.vocab[i]);
    s.first.push_back(static_cast<Eigen::Index>(i));
    s.second.push_back(it->second);
  }
  return s;
}

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& m, std::span<const Eigen::Index> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  return out;
}

Eigen::MatrixXd procrustes_align(const EmbeddingMatrix& from, const EmbeddingMatrix& to) {
  if (from.dim() != to.dim())
    throw Error(ErrorKind::invalid_argument, "embedding dimensions differ between " + from.label + " and " + to.label);
  const SharedRows s = shared_rows(from, to);
  if (s.keywords.size() < from.dim())
    throw Error(ErrorKind::validation, "snapshots " + from.label + " and " + to.label + " share " +
                                           std::to_string(s.keywords.size()) + " keywords, fewer than d = " +
                                           std::to_string(from.dim()));
  return procrustes_rotation(select_rows(from.values, s.first), select_rows(to.values, s.second));
}

EmbeddingSeries align_series(EmbeddingSeries series) {
  const std::size_t t_count = series.matrices.size();
  if (t_count < 2) throw Error(ErrorKind::validation, "alignment needs at least two snapshots");
  series.rotations.clear();
  for (std::size_t t = 0; t + 1 < t_count; ++t)
    series.rotations.push_back(procrustes_align(series.matrices[t], series.matrices[t + 1]));

  // Compose from the back so each earlier snapshot lands in the last frame.
  const auto d = static_cast<Eigen::Index>(series.matrices.back().dim());
  Eigen::MatrixXd to_reference = Eigen::MatrixXd::Identity(d, d);
  for (std::size_t t = t_count - 1; t-- > 0;) {
    to_reference = series.rotations[t] * to_reference;
    series.matrices[t].values = series.matrices[t].values * to_reference;
  }
  series.aligned = true;
  return series;
}

std::vector<Neighbor> nearest_keywords(const EmbeddingMatrix& e, std::string_view keyword, std::size_t k) {
  const auto q = e.index_of(keyword);
  if (q < 0) throw Error(ErrorKind::validation, "keyword '" + std::string(keyword) + "' not in " + e.label);
  const Eigen::VectorXd query = e.values.row(q);
  const double qn = query.norm();
  if (qn == 0.0) throw Error(ErrorKind::validation, "zero-norm embedding for '" + std::string(keyword) + "'");
  std::vector<Neighbor> all;
  for (Eigen::Index i = 0; i < e.values.rows(); ++i) {
    if (i == q) continue;
    const double n = e.values.row(i).norm();
    if (n == 0.0) continue;
    all.push_back({e.vocab[static_cast<std::size_t>(i)], e.values.row(i).dot(query) / (n * qn)});
  }
  auto better = [](const Neighbor& a, const Neighbor& b) {
    if (a.cosine != b.cosine) return a.cosine > b.cosine;
    return a.keyword < b.keyword;
  };
  const std::size_t keep = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(), better);
  all.resize(keep);
  return all;
}

Trajectory build_trajectory(std::string_view keyword, const EmbeddingSeries& aligned) {
  if (!aligned.aligned && aligned.matrices.size() > 1)
    throw Error(ErrorKind::invalid_argument, "trajectories need an aligned series");
  Trajectory t;
  t.keyword = std::string(keyword);
  bool any = false;
  for (const auto& m : aligned.matrices) {
    TrajectoryPoint p;
    p.label = m.label;
    if (auto i = m.index_of(keyword); i >= 0) {
      p.vector = m.values.row(i).transpose();
      any = true;
    }
    t.points.push_back(std::move(p));
  }
  if (!any) throw Error(ErrorKind::validation, "keyword '" + std::string(keyword) + "' appears in no snapshot");
  return t;
}

std::string trajectories_to_json(std::span<const Trajectory> trajectories) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& t : trajectories) {
    nlohmann::ordered_json jt;
    jt["keyword"] = t.keyword;
    jt["points"] = nlohmann::ordered_json::array();
    for (const auto& p : t.points) {
      nlohmann::ordered_json jp;
      jp["label"] = p.label;
      if (p.xy)
        jp["xy"] = {(*p.xy)[0], (*p.xy)[1]};
      else
        jp["xy"] = nullptr;
      jt["points"].push_back(std::move(jp));
    }
    arr.push_back(std::move(jt));
  }
  return arr.dump(2) + "\n";
}

}  // namespace scitrace
