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

#ifndef QREWRITE_INDEX_H_
#define QREWRITE_INDEX_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qrewrite/core.h"
#include "qrewrite/encoder.h"
#include "qrewrite/objective.h"
#include "qrewrite/textproc.h"

namespace qrewrite {

struct CandidateEntry {
  std::uint32_t id = 0;
  std::string text;  // normalized
  std::optional<NluHypothesis> nlu;
  std::int64_t frequency = 1;

  friend bool operator==(const CandidateEntry&, const CandidateEntry&) = default;
};

// Inverted lists over k-means centroids of the stored vectors.
struct CoarsePartition {
  Eigen::MatrixXd centroids;  // n_list x dim
  std::vector<std::vector<std::uint32_t>> lists;

  int n_list() const { return static_cast<int>(lists.size()); }
  friend bool operator==(const CoarsePartition&, const CoarsePartition&);
};

// Sum of squared distances to the assigned centroid after each assignment
// step: entry 0 uses the initial centroids, entry i the i-th update.
struct PartitionStats {
  std::vector<double> objective;
};

struct SearchHit {
  std::uint32_t id = 0;
  double score = 0.0;

  friend bool operator==(const SearchHit&, const SearchHit&) = default;
};

// Ranking rule shared by every search path: higher score first, then lower id.
inline bool ranks_before(const SearchHit& a, const SearchHit& b) {
  return a.score != b.score ? a.score > b.score : a.id < b.id;
}

struct PartitionParams {
  int n_list = 0;  // 0 picks ceil(sqrt(N))
  int kmeans_iters = 25;
  std::uint64_t seed = 1;
};

// Immutable store of rewrite candidates with their target-side vectors.
// A stored vector is normalize(head_target(Emb(text))) in 32-bit floats, so
// alpha * <normalize(head_source(Emb(query))), vector> reproduces the
// scaled cosine exactly up to float rounding.
class CandidateIndex {
 public:
  // Deduplicates by normalized text (summing frequencies) and encodes every
  // entry. Throws ValidationError for an empty candidate list.
  static CandidateIndex build(std::span<const Candidate> candidates,
                              const EncoderParams& params, const Vocabulary& vocab,
                              const SimilarityConfig& sim);

  // Wraps precomputed vectors (rows are normalized on the way in). Entry ids
  // must equal their row numbers.
  static CandidateIndex from_vectors(std::vector<CandidateEntry> entries,
                                     const Eigen::MatrixXd& vectors, double alpha);

  std::size_t size() const { return entries_.size(); }
  int dim() const { return dim_; }
  double alpha() const { return alpha_; }
  const CandidateEntry& entry(std::uint32_t id) const { return entries_.at(id); }
  const std::vector<CandidateEntry>& entries() const { return entries_; }
  std::span<const float> vector(std::uint32_t id) const;

  // alpha * <query, vector(id)>, accumulated in double.
  double score(const Eigen::VectorXd& query, std::uint32_t id) const;

  // Top k by exhaustive scan; k beyond the index size returns everything.
  std::vector<SearchHit> search_exact(const Eigen::VectorXd& query, int k) const;

  // Scans only the lists of the n_probe centroids nearest to the query.
  // Scores are exact; only the scanned set is approximate.
  std::vector<SearchHit> search_approx(const Eigen::VectorXd& query, int k, int n_probe) const;

  // Lloyd's k-means with seeded init from distinct entries; empty clusters
  // are reseeded from the point farthest from its centroid.
  PartitionStats build_partition(const PartitionParams& p);
  const std::optional<CoarsePartition>& partition() const { return partition_; }
  void clear_partition() { partition_.reset(); }

  // "qridx1" binary format, little-endian, checksummed.
  void save(const std::filesystem::path& path) const;
  static CandidateIndex load(const std::filesystem::path& path);

  // Throws DimensionError when the encoder output width differs.
  void check_dimension(int d_out) const;

  friend bool operator==(const CandidateIndex&, const CandidateIndex&);

 private:
  void check_query(const Eigen::VectorXd& query) const;

  std::vector<CandidateEntry> entries_;
  std::vector<float> vectors_;  // row-major, size() x dim_
  int dim_ = 0;
  double alpha_ = 16.0;
  std::optional<CoarsePartition> partition_;
};

// Default probe count for a partition: max(1, n_list / 8).
int default_n_probe(int n_list);

// normalize(head_source(Emb(text))): the query side of the scaled cosine.
Eigen::VectorXd query_vector(const EncoderParams& params, const Vocabulary& vocab,
                             std::string_view text, const SimilarityConfig& sim);

// Query vectors for many texts in one batched forward pass (rows).
Eigen::MatrixXd query_vectors(const EncoderParams& params, const Vocabulary& vocab,
                              std::span<const std::string> texts, const SimilarityConfig& sim);

}  // namespace qrewrite

#endif  // QREWRITE_INDEX_H_
