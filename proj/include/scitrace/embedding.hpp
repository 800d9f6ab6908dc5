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
#ifndef SCITRACE_EMBEDDING_HPP
#define SCITRACE_EMBEDDING_HPP

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <vector>

namespace scitrace {

/// Keyword embeddings of one snapshot, one row per vocabulary entry.
struct EmbeddingMatrix {
  std::string label;
  std::vector<std::string> vocab;
  Eigen::MatrixXd values;  // vocab.size() x d

  std::size_t dim() const { return static_cast<std::size_t>(values.cols()); }
  std::ptrdiff_t index_of(std::string_view keyword) const;
};

/// Text format: first line "<rows> <d> <label>", then one line per keyword
/// "keyword<TAB>v1 v2 ... vd" with 9 significant digits.
std::string embedding_to_text(const EmbeddingMatrix& embedding);
EmbeddingMatrix parse_embedding(std::string_view text);

}  // namespace scitrace

#endif  // SCITRACE_EMBEDDING_HPP
