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

// Small builders shared by the unit and acceptance tests.

#ifndef QREWRITE_TESTS_SUPPORT_FIXTURES_H_
#define QREWRITE_TESTS_SUPPORT_FIXTURES_H_

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qrewrite/core.h"
#include "qrewrite/encoder.h"
#include "qrewrite/index.h"
#include "qrewrite/textproc.h"

namespace qrewrite::testing {

NluHypothesis hyp(std::string domain, std::string intent,
                  std::initializer_list<std::pair<std::string, std::string>> slots = {});

Utterance utt(std::string user, std::int64_t ts_ms, std::string text,
              std::optional<NluHypothesis> nlu = std::nullopt);

// Independent standard-normal rows.
Eigen::MatrixXd random_vectors(std::size_t n, int dim, std::uint64_t seed);

// Rows drawn around n_clusters random unit centers with per-coordinate
// noise of the given standard deviation.
Eigen::MatrixXd clustered_vectors(std::size_t n, int dim, int n_clusters, double spread,
                                  std::uint64_t seed);

// Entries named "item <id>" without hypotheses.
std::vector<CandidateEntry> plain_entries(std::size_t n);

// Sets both projection heads to the identity with zero bias.
void set_identity_heads(EncoderParams& params);

// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_text(const std::filesystem::path& path);

// Ten distinct rewrite pairs with hypotheses on the targets, plus forty
// further candidates, for memorization checks.
struct MemorizationSet {
  std::vector<RewritePair> pairs;
  std::vector<Candidate> candidates;  // 50, including every pair target
  std::vector<EvalCase> cases;        // one per pair
};
MemorizationSet memorization_set();

}  // namespace qrewrite::testing

#endif  // QREWRITE_TESTS_SUPPORT_FIXTURES_H_
