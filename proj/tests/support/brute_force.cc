// Copyright 2026 The QRewrite Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "brute_force.h"

#include <algorithm>
#include <set>

namespace qrewrite::testing {

std::vector<OracleHit> brute_force_top_k(const std::vector<std::vector<float>>& vectors,
                                         const Eigen::VectorXd& query, double alpha, int k) {
  std::vector<OracleHit> all;
  all.reserve(vectors.size());
  for (std::size_t id = 0; id < vectors.size(); ++id) {
    double dot = 0.0;
    for (std::size_t j = 0; j < vectors[id].size(); ++j) {
      dot += query[static_cast<Eigen::Index>(j)] * static_cast<double>(vectors[id][j]);
    }
    all.push_back({static_cast<std::uint32_t>(id), alpha * dot});
  }
  std::sort(all.begin(), all.end(), [](const OracleHit& a, const OracleHit& b) {
    if (a.score > b.score) return true;
    if (a.score < b.score) return false;
    return a.id < b.id;
  });
  if (static_cast<std::size_t>(k) < all.size()) all.resize(static_cast<std::size_t>(k));
  return all;
}

std::vector<std::vector<float>> stored_vectors(const CandidateIndex& index) {
  std::vector<std::vector<float>> out;
  for (std::uint32_t id = 0; id < index.size(); ++id) {
    const auto v = index.vector(id);
    out.emplace_back(v.begin(), v.end());
  }
  return out;
}

double recall(const std::vector<SearchHit>& approx, const std::vector<SearchHit>& exact) {
  if (exact.empty()) return 1.0;
  std::set<std::uint32_t> want;
  for (const auto& h : exact) want.insert(h.id);
  std::size_t found = 0;
  for (const auto& h : approx) found += want.count(h.id);
  return static_cast<double>(found) / static_cast<double>(want.size());
}

}  // namespace qrewrite::testing
