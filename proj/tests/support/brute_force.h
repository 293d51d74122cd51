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

// Reference scorer for index tests: a full sort over every stored vector,
// written without any of the index's own search code.

#ifndef QREWRITE_TESTS_SUPPORT_BRUTE_FORCE_H_
#define QREWRITE_TESTS_SUPPORT_BRUTE_FORCE_H_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qrewrite/index.h"

namespace qrewrite::testing {

struct OracleHit {
  std::uint32_t id = 0;
  double score = 0.0;
};

// Scores every row of vectors (float storage, as the index keeps them)
// against query and returns the k best under (score desc, id asc).
std::vector<OracleHit> brute_force_top_k(const std::vector<std::vector<float>>& vectors,
                                         const Eigen::VectorXd& query, double alpha, int k);

// Copies the stored vectors out of an index through its public accessor.
std::vector<std::vector<float>> stored_vectors(const CandidateIndex& index);

// |A ∩ B| / |B| over ids.
double recall(const std::vector<SearchHit>& approx, const std::vector<SearchHit>& exact);

}  // namespace qrewrite::testing

#endif  // QREWRITE_TESTS_SUPPORT_BRUTE_FORCE_H_
