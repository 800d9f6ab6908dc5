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
#include "scitrace/embedding.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "scitrace/common.hpp"

namespace scitrace {

std::ptrdiff_t EmbeddingMatrix::index_of(std::string_view keyword) const {
  auto it = std::find(vocab.begin(), vocab.end(), keyword);
  return it == vocab.end() ? -1 : it - vocab.begin();
}

std::string embedding_to_text(const EmbeddingMatrix& e) {
  std::string out = std::to_string(e.values.rows()) + " " + std::to_string(e.values.cols()) + " " + e.label + "\n";
  for (Eigen::Index i = 0; i < e.values.rows(); ++i) {
    out += e.vocab[static_cast<std::size_t>(i)];
    out += '\t';
    for (Eigen::Index j = 0; j < e.values.cols(); ++j) {
      if (j) out += ' ';
      out += format_real(e.values(i, j), 9);
    }
    out += '\n';
  }
  return out;
}

EmbeddingMatrix parse_embedding(std::string_view text) {
  auto lines = split(text, '\n');
  if (lines.empty() || lines.front().empty()) throw Error(ErrorKind::validation, "embedding file has no header");
  std::istringstream header(lines.front());
  long rows = -1, cols = -1;
  header >> rows >> cols;
  if (!header || rows < 0 || cols <= 0) throw Error(ErrorKind::validation, "bad embedding header: " + lines.front());
  EmbeddingMatrix e;
  std::string label;
  std::getline(header, label);
  e.label = trim(label);
  e.values.resize(rows, cols);
  for (long i = 0; i < rows; ++i) {
    if (static_cast<std::size_t>(i + 1) >= lines.size())
      throw Error(ErrorKind::validation, "embedding file truncated");
    const auto& line = lines[static_cast<std::size_t>(i + 1)];
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw Error(ErrorKind::validation, "embedding row without a tab");
    e.vocab.push_back(line.substr(0, tab));
    const char* p = line.c_str() + tab + 1;
    for (long j = 0; j < cols; ++j) {
      char* end = nullptr;
      e.values(i, j) = std::strtod(p, &end);
      if (end == p) throw Error(ErrorKind::validation, "embedding row has too few values: " + e.vocab.back());
      p = end;
    }
  }
  return e;
}

}  // namespace scitrace
