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

#ifndef QREWRITE_OBJECTIVE_H_
#define QREWRITE_OBJECTIVE_H_

#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qrewrite/core.h"
#include "qrewrite/encoder.h"
#include "qrewrite/textproc.h"

namespace qrewrite {

struct SimilarityConfig {
  double alpha = 16.0;
  double epsilon = 1e-8;  // lower clamp on projected norms

  void validate() const;
};

enum class Modality { kText, kHypothesis };

// Aligned (source_i, target_i) positives; every other target in the batch
// serves as a negative for source_i.
struct Batch {
  std::vector<TokenSequence> sources;
  std::vector<TokenSequence> targets;
  Modality source_modality = Modality::kText;
  Modality target_modality = Modality::kText;

  std::size_t size() const { return sources.size(); }

  // Throws ValidationError for empty or misaligned batches.
  void validate() const;
};

Batch make_batch(std::span<const std::string> sources,
                 std::span<const std::string> targets, const Vocabulary& vocab,
                 int max_len);

// Row-vector affine map x * w + b.
Eigen::VectorXd apply_linear(const LinearParams& head, const Eigen::VectorXd& x);

// alpha * cos(head_source(u), head_target(v)); both norms are clamped below
// at epsilon, so the result always lies in [-alpha, alpha].
double scaled_cosine(const EmbeddingVector& u, const EmbeddingVector& v,
                     const EncoderParams& params, const SimilarityConfig& sim);

// Rows of head(x) scaled to unit norm (norms clamped at epsilon).
Eigen::MatrixXd project_normalized(const LinearParams& head,
                                   const Eigen::MatrixXd& embeddings,
                                   double epsilon);

// Numerically stable row-wise softmax.
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits);

// logits(i, j) = scaled_cosine(source_i, target_j) for embedding rows.
Eigen::MatrixXd similarity_logits(const Eigen::MatrixXd& source_embeddings,
                                  const Eigen::MatrixXd& target_embeddings,
                                  const EncoderParams& params,
                                  const SimilarityConfig& sim);

// Row i is p(target_j | source_i) over the batch targets. Inference mode.
Eigen::MatrixXd in_batch_probs(const Batch& batch, const EncoderParams& params,
                               const SimilarityConfig& sim);

// Cross-entropy of the in-batch softmax and its exact gradients with
// respect to the two embedding matrices and the projection heads.
struct ContrastiveGradients {
  double loss = 0.0;
  Eigen::MatrixXd d_source;  // batch x d_out
  Eigen::MatrixXd d_target;  // batch x d_out
  LinearParams d_head_source;
  LinearParams d_head_target;
};

ContrastiveGradients contrastive_from_embeddings(
    const Eigen::MatrixXd& source_embeddings,
    const Eigen::MatrixXd& target_embeddings, const EncoderParams& params,
    const SimilarityConfig& sim);

struct ContrastiveLoss {
  double loss = 0.0;
  Eigen::MatrixXd d_source;
  Eigen::MatrixXd d_target;
};

// -(1/N) sum_i log p(target_i | source_i), inference mode, with gradients
// with respect to the encoder outputs.
ContrastiveLoss contrastive_loss(const Batch& batch, const EncoderParams& params,
                                 const SimilarityConfig& sim);

// Consecutive (u_t, u_{t+1}) turns of a session.
std::vector<std::pair<Utterance, Utterance>> next_turn_pairs(const Session& s);

// Next-query prediction loss; the batch holds (u_t, u_{t+1}) pairs.
double session_lm_loss(const Batch& pairs, const EncoderParams& params,
                       const SimilarityConfig& sim);

// L_uu + L_hu + L_uh + L_hh, where e.g. hu scores h_{t+1} given u_t. All
// four batches must have the same size.
double joint_loss(const Batch& uu, const Batch& hu, const Batch& uh, const Batch& hh,
                  const EncoderParams& params, const SimilarityConfig& sim);

// One scoring task over pre-grouped sequence sets: sources come from
// sets[source_set], targets from sets[target_set].
struct TaskSpec {
  int source_set = 0;
  int target_set = 0;
};

// Encodes each set once (dropout applied when training), sums the
// contrastive losses of all tasks and accumulates the gradient of that sum
// into grads when grads is non-null. Returns the summed loss.
double multi_task_loss(std::span<const std::vector<TokenSequence>> sets,
                       std::span<const TaskSpec> tasks, const EncoderParams& params,
                       const SimilarityConfig& sim, bool training, Rng* rng,
                       EncoderParams* grads);

}  // namespace qrewrite

#endif  // QREWRITE_OBJECTIVE_H_
