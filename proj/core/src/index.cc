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

#include "qrewrite/index.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "qrewrite/errors.h"

namespace qrewrite {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr std::size_t kEncodeChunk = 256;

// Keeps the k best hits seen so far under ranks_before.
std::vector<SearchHit> top_k(std::vector<SearchHit> hits, int k) {
  const std::size_t keep = std::min<std::size_t>(hits.size(), static_cast<std::size_t>(k));
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end(),
                    ranks_before);
  hits.resize(keep);
  return hits;
}

MatrixXd encode_rows(const EncoderParams& params, const Vocabulary& vocab,
                     std::span<const std::string> texts, const LinearParams& head,
                     double epsilon) {
  check_vocab_compatible(params.config, vocab);
  MatrixXd out(static_cast<Eigen::Index>(texts.size()), params.config.d_out);
  for (std::size_t start = 0; start < texts.size(); start += kEncodeChunk) {
    const std::size_t end = std::min(texts.size(), start + kEncodeChunk);
    std::vector<TokenSequence> seqs;
    seqs.reserve(end - start);
    for (std::size_t i = start; i < end; ++i) {
      seqs.push_back(tokenize(texts[i], vocab, params.config.max_len));
    }
    const EncoderForward fw = encode_batch(params, seqs, false, nullptr);
    out.middleRows(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(end - start)) =
        project_normalized(head, fw.embeddings(), epsilon);
  }
  return out;
}

}  // namespace

int default_n_probe(int n_list) { return std::max(1, n_list / 8); }

CandidateIndex CandidateIndex::build(std::span<const Candidate> candidates,
                                     const EncoderParams& params, const Vocabulary& vocab,
                                     const SimilarityConfig& sim) {
  sim.validate();
  if (candidates.empty()) throw ValidationError("cannot build an index from zero candidates");

  std::vector<CandidateEntry> entries;
  std::unordered_map<std::string, std::size_t> by_text;
  for (const Candidate& c : candidates) {
    if (c.frequency < 1) throw ValidationError("candidate frequency must be >= 1: " + c.text);
    std::string text = normalize_text(c.text);
    if (text.empty()) throw ValidationError("candidate text is blank");
    if (c.nlu) validate_hypothesis(*c.nlu);
    auto [it, inserted] = by_text.try_emplace(text, entries.size());
    if (inserted) {
      CandidateEntry e;
      e.id = static_cast<std::uint32_t>(entries.size());
      e.text = std::move(text);
      e.nlu = c.nlu;
      e.frequency = c.frequency;
      entries.push_back(std::move(e));
    } else {
      CandidateEntry& e = entries[it->second];
      e.frequency += c.frequency;
      if (!e.nlu) e.nlu = c.nlu;
    }
  }

  std::vector<std::string> texts;
  texts.reserve(entries.size());
  for (const auto& e : entries) texts.push_back(e.text);
  const MatrixXd vectors = encode_rows(params, vocab, texts, params.head_target, sim.epsilon);
  return from_vectors(std::move(entries), vectors, sim.alpha);
}

CandidateIndex CandidateIndex::from_vectors(std::vector<CandidateEntry> entries,
                                            const MatrixXd& vectors, double alpha) {
  if (entries.empty()) throw ValidationError("cannot build an index from zero candidates");
  if (vectors.rows() != static_cast<Eigen::Index>(entries.size()) || vectors.cols() < 1) {
    throw DimensionError("index vectors must have one row per entry");
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ValidationError("alpha must be positive");
  if (!vectors.allFinite()) throw NumericError("index vectors contain non-finite values");
  CandidateIndex idx;
  idx.dim_ = static_cast<int>(vectors.cols());
  idx.alpha_ = alpha;
  idx.vectors_.resize(entries.size() * static_cast<std::size_t>(idx.dim_));
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].id != i) throw ValidationError("index entry ids must equal their positions");
    const auto row = vectors.row(static_cast<Eigen::Index>(i));
    const double norm = std::max(row.norm(), 1e-12);
    for (int j = 0; j < idx.dim_; ++j) {
      idx.vectors_[i * static_cast<std::size_t>(idx.dim_) + static_cast<std::size_t>(j)] =
          static_cast<float>(row(j) / norm);
    }
  }
  idx.entries_ = std::move(entries);
  return idx;
}

std::span<const float> CandidateIndex::vector(std::uint32_t id) const {
  if (id >= entries_.size()) throw ValidationError("candidate id out of range");
  return std::span<const float>(vectors_).subspan(static_cast<std::size_t>(id) * dim_,
                                                  static_cast<std::size_t>(dim_));
}

void CandidateIndex::check_query(const VectorXd& query) const {
  if (query.size() != dim_) {
    throw DimensionError("query has dimension " + std::to_string(query.size()) +
                         " but the index stores " + std::to_string(dim_));
  }
}

double CandidateIndex::score(const VectorXd& query, std::uint32_t id) const {
  const float* v = vectors_.data() + static_cast<std::size_t>(id) * dim_;
  double dot = 0.0;
  for (int j = 0; j < dim_; ++j) dot += query[j] * static_cast<double>(v[j]);
  return alpha_ * dot;
}

std::vector<SearchHit> CandidateIndex::search_exact(const VectorXd& query, int k) const {
  check_query(query);
  if (k < 1) throw ValidationError("k must be >= 1");
  std::vector<SearchHit> hits(entries_.size());
  for (std::uint32_t id = 0; id < entries_.size(); ++id) hits[id] = {id, score(query, id)};
  return top_k(std::move(hits), k);
}

std::vector<SearchHit> CandidateIndex::search_approx(const VectorXd& query, int k,
                                                     int n_probe) const {
  check_query(query);
  if (k < 1) throw ValidationError("k must be >= 1");
  if (!partition_) {
    throw ValidationError("approximate search needs a coarse partition; build one first");
  }
  const CoarsePartition& part = *partition_;
  if (n_probe < 1 || n_probe > part.n_list()) {
    throw ValidationError("n_probe must lie in [1, " + std::to_string(part.n_list()) + "]");
  }
  std::vector<std::pair<double, int>> dist(static_cast<std::size_t>(part.n_list()));
  for (int c = 0; c < part.n_list(); ++c) {
    dist[static_cast<std::size_t>(c)] = {(part.centroids.row(c).transpose() - query).squaredNorm(), c};
  }
  std::partial_sort(dist.begin(), dist.begin() + n_probe, dist.end());

  std::vector<SearchHit> hits;
  for (int p = 0; p < n_probe; ++p) {
    for (std::uint32_t id : part.lists[static_cast<std::size_t>(dist[static_cast<std::size_t>(p)].second)]) {
      hits.push_back({id, score(query, id)});
    }
  }
  return top_k(std::move(hits), k);
}

void CandidateIndex::check_dimension(int d_out) const {
  if (d_out != dim_) {
    throw DimensionError("index vectors have dimension " + std::to_string(dim_) +
                         " but the encoder produces " + std::to_string(d_out));
  }
}

MatrixXd query_vectors(const EncoderParams& params, const Vocabulary& vocab,
                       std::span<const std::string> texts, const SimilarityConfig& sim) {
  sim.validate();
  return encode_rows(params, vocab, texts, params.head_source, sim.epsilon);
}

VectorXd query_vector(const EncoderParams& params, const Vocabulary& vocab,
                      std::string_view text, const SimilarityConfig& sim) {
  const std::string one(text);
  return query_vectors(params, vocab, std::span<const std::string>(&one, 1), sim).row(0).transpose();
}

}  // namespace qrewrite
