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

#include "qrewrite/objective.h"

#include <cmath>
#include <string>

#include "qrewrite/errors.h"

namespace qrewrite {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd apply_linear_rows(const LinearParams& head, const MatrixXd& x) {
  MatrixXd y = x * head.w;
  y.rowwise() += head.b.transpose();
  return y;
}

// Returns rows scaled to unit length and the clamped norms used.
MatrixXd normalize_rows(const MatrixXd& a, double epsilon, VectorXd& norms) {
  norms = a.rowwise().norm().cwiseMax(epsilon);
  return norms.cwiseInverse().asDiagonal() * a;
}

// Gradient of rows a_i / max(|a_i|, eps) given the gradient w.r.t. the
// normalized rows.
MatrixXd normalize_rows_backward(const MatrixXd& unit, const VectorXd& norms,
                                 const MatrixXd& a, double epsilon, const MatrixXd& d_unit) {
  MatrixXd da(d_unit.rows(), d_unit.cols());
  for (Index i = 0; i < unit.rows(); ++i) {
    if (a.row(i).norm() > epsilon) {
      const double proj = unit.row(i).dot(d_unit.row(i));
      da.row(i) = (d_unit.row(i) - proj * unit.row(i)) / norms(i);
    } else {
      da.row(i) = d_unit.row(i) / epsilon;
    }
  }
  return da;
}

}  // namespace

void SimilarityConfig::validate() const {
  if (!(alpha > 0.0)) throw ValidationError("similarity alpha must be positive");
  if (!(epsilon > 0.0)) throw ValidationError("similarity epsilon must be positive");
}

void Batch::validate() const {
  if (sources.empty()) throw ValidationError("batch is empty");
  if (sources.size() != targets.size()) {
    throw ValidationError("batch has " + std::to_string(sources.size()) + " sources but " +
                          std::to_string(targets.size()) + " targets");
  }
}

Batch make_batch(std::span<const std::string> sources, std::span<const std::string> targets,
                 const Vocabulary& vocab, int max_len) {
  Batch b;
  for (const auto& s : sources) b.sources.push_back(tokenize(s, vocab, max_len));
  for (const auto& t : targets) b.targets.push_back(tokenize(t, vocab, max_len));
  b.validate();
  return b;
}

VectorXd apply_linear(const LinearParams& head, const VectorXd& x) {
  return (x.transpose() * head.w).transpose() + head.b;
}

double scaled_cosine(const EmbeddingVector& u, const EmbeddingVector& v,
                     const EncoderParams& params, const SimilarityConfig& sim) {
  const VectorXd a = apply_linear(params.head_source, u);
  const VectorXd b = apply_linear(params.head_target, v);
  const double denom = std::max(a.norm(), sim.epsilon) * std::max(b.norm(), sim.epsilon);
  const double cos = std::clamp(a.dot(b) / denom, -1.0, 1.0);
  return sim.alpha * cos;
}

MatrixXd project_normalized(const LinearParams& head, const MatrixXd& embeddings,
                            double epsilon) {
  VectorXd norms;
  return normalize_rows(apply_linear_rows(head, embeddings), epsilon, norms);
}

MatrixXd softmax_rows(const MatrixXd& logits) {
  MatrixXd p(logits.rows(), logits.cols());
  for (Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    p.row(i) = (logits.row(i).array() - m).exp().matrix();
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

MatrixXd similarity_logits(const MatrixXd& source_embeddings, const MatrixXd& target_embeddings,
                           const EncoderParams& params, const SimilarityConfig& sim) {
  const MatrixXd a = project_normalized(params.head_source, source_embeddings, sim.epsilon);
  const MatrixXd b = project_normalized(params.head_target, target_embeddings, sim.epsilon);
  return sim.alpha * (a * b.transpose());
}

MatrixXd in_batch_probs(const Batch& batch, const EncoderParams& params,
                        const SimilarityConfig& sim) {
  batch.validate();
  const auto src = encode_batch(params, batch.sources, false, nullptr);
  const auto tgt = encode_batch(params, batch.targets, false, nullptr);
  return softmax_rows(similarity_logits(src.embeddings(), tgt.embeddings(), params, sim));
}

ContrastiveGradients contrastive_from_embeddings(const MatrixXd& source_embeddings,
                                                 const MatrixXd& target_embeddings,
                                                 const EncoderParams& params,
                                                 const SimilarityConfig& sim) {
  sim.validate();
  const Index n = source_embeddings.rows();
  if (n == 0 || target_embeddings.rows() != n) {
    throw ValidationError("contrastive loss needs equal, non-zero numbers of sources and targets");
  }

  const MatrixXd a = apply_linear_rows(params.head_source, source_embeddings);
  const MatrixXd b = apply_linear_rows(params.head_target, target_embeddings);
  VectorXd a_norm, b_norm;
  const MatrixXd a_unit = normalize_rows(a, sim.epsilon, a_norm);
  const MatrixXd b_unit = normalize_rows(b, sim.epsilon, b_norm);
  const MatrixXd logits = sim.alpha * (a_unit * b_unit.transpose());

  ContrastiveGradients out;
  MatrixXd d_logits(n, n);
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double m = logits.row(i).maxCoeff();
    const VectorXd e = (logits.row(i).array() - m).exp().matrix().transpose();
    const double z = e.sum();
    total += logits(i, i) - (m + std::log(z));
    d_logits.row(i) = (e / z).transpose();
    d_logits(i, i) -= 1.0;
  }
  out.loss = -total / static_cast<double>(n) + 0.0;
  d_logits /= static_cast<double>(n);

  const MatrixXd d_a_unit = sim.alpha * (d_logits * b_unit);
  const MatrixXd d_b_unit = sim.alpha * (d_logits.transpose() * a_unit);
  const MatrixXd d_a = normalize_rows_backward(a_unit, a_norm, a, sim.epsilon, d_a_unit);
  const MatrixXd d_b = normalize_rows_backward(b_unit, b_norm, b, sim.epsilon, d_b_unit);

  out.d_head_source.w = source_embeddings.transpose() * d_a;
  out.d_head_source.b = d_a.colwise().sum().transpose();
  out.d_head_target.w = target_embeddings.transpose() * d_b;
  out.d_head_target.b = d_b.colwise().sum().transpose();
  out.d_source = d_a * params.head_source.w.transpose();
  out.d_target = d_b * params.head_target.w.transpose();
  return out;
}

ContrastiveLoss contrastive_loss(const Batch& batch, const EncoderParams& params,
                                 const SimilarityConfig& sim) {
  batch.validate();
  const auto src = encode_batch(params, batch.sources, false, nullptr);
  const auto tgt = encode_batch(params, batch.targets, false, nullptr);
  ContrastiveGradients g =
      contrastive_from_embeddings(src.embeddings(), tgt.embeddings(), params, sim);
  return ContrastiveLoss{g.loss, std::move(g.d_source), std::move(g.d_target)};
}

std::vector<std::pair<Utterance, Utterance>> next_turn_pairs(const Session& s) {
  std::vector<std::pair<Utterance, Utterance>> pairs;
  const auto& turns = s.turns();
  for (std::size_t t = 0; t + 1 < turns.size(); ++t) pairs.emplace_back(turns[t], turns[t + 1]);
  return pairs;
}

double session_lm_loss(const Batch& pairs, const EncoderParams& params,
                       const SimilarityConfig& sim) {
  return contrastive_loss(pairs, params, sim).loss;
}

double joint_loss(const Batch& uu, const Batch& hu, const Batch& uh, const Batch& hh,
                  const EncoderParams& params, const SimilarityConfig& sim) {
  for (const Batch* b : {&uu, &hu, &uh, &hh}) b->validate();
  if (hu.size() != uu.size() || uh.size() != uu.size() || hh.size() != uu.size()) {
    throw ValidationError("joint pretraining batches must be aligned (equal sizes)");
  }
  return contrastive_loss(uu, params, sim).loss + contrastive_loss(hu, params, sim).loss +
         contrastive_loss(uh, params, sim).loss + contrastive_loss(hh, params, sim).loss;
}

double multi_task_loss(std::span<const std::vector<TokenSequence>> sets,
                       std::span<const TaskSpec> tasks, const EncoderParams& params,
                       const SimilarityConfig& sim, bool training, Rng* rng,
                       EncoderParams* grads) {
  if (tasks.empty()) throw ValidationError("no training tasks given");
  if (grads != nullptr && !(grads->config == params.config)) {
    *grads = EncoderParams::zeros(params.config);
  }
  std::vector<EncoderForward> forwards;
  forwards.reserve(sets.size());
  for (const auto& set : sets) forwards.push_back(encode_batch(params, set, training, rng));

  std::vector<MatrixXd> upstream(sets.size());
  for (std::size_t k = 0; k < sets.size(); ++k) {
    upstream[k] = MatrixXd::Zero(forwards[k].embeddings().rows(), params.config.d_out);
  }

  double total = 0.0;
  for (const TaskSpec& task : tasks) {
    const auto s = static_cast<std::size_t>(task.source_set);
    const auto t = static_cast<std::size_t>(task.target_set);
    if (s >= sets.size() || t >= sets.size()) throw ValidationError("task refers to a missing set");
    ContrastiveGradients g = contrastive_from_embeddings(
        forwards[s].embeddings(), forwards[t].embeddings(), params, sim);
    total += g.loss;
    if (grads == nullptr) continue;
    upstream[s] += g.d_source;
    upstream[t] += g.d_target;
    grads->head_source.w += g.d_head_source.w;
    grads->head_source.b += g.d_head_source.b;
    grads->head_target.w += g.d_head_target.w;
    grads->head_target.b += g.d_head_target.b;
  }
  if (grads != nullptr) {
    for (std::size_t k = 0; k < sets.size(); ++k) backward(params, forwards[k], upstream[k], *grads);
  }
  return total;
}

}  // namespace qrewrite
