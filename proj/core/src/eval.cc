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

#include "qrewrite/eval.h"

#include <algorithm>
#include <fstream>
#include <string>

#include <fmt/format.h>

#include "qrewrite/errors.h"

namespace qrewrite {

namespace {

constexpr std::size_t kQueryChunk = 256;

}  // namespace

double MetricsReport::p_at(int n) const {
  for (std::size_t i = 0; i < kPrecisionCutoffs.size(); ++i) {
    if (kPrecisionCutoffs[i] == n) return precision_at[i];
  }
  throw ValidationError("no precision recorded at cutoff " + std::to_string(n));
}

std::optional<int> judge(std::span<const std::optional<NluHypothesis>> retrieved,
                         const NluHypothesis& gold) {
  const std::string key = hypothesis_key(gold);
  for (std::size_t i = 0; i < retrieved.size(); ++i) {
    if (retrieved[i] && hypothesis_key(*retrieved[i]) == key) return static_cast<int>(i) + 1;
  }
  return std::nullopt;
}

std::optional<int> judge(const CandidateIndex& index, std::span<const SearchHit> hits,
                         const NluHypothesis& gold) {
  std::vector<std::optional<NluHypothesis>> retrieved;
  retrieved.reserve(hits.size());
  for (const SearchHit& h : hits) retrieved.push_back(index.entry(h.id).nlu);
  return judge(retrieved, gold);
}

MetricsReport summarize_ranks(std::span<const std::optional<int>> first_ranks) {
  MetricsReport m;
  m.n_cases = first_ranks.size();
  if (first_ranks.empty()) return m;
  std::size_t matched = 0;
  double rank_sum = 0.0;
  for (const auto& r : first_ranks) {
    if (!r) continue;
    if (*r < 1) throw ValidationError("ranks are 1-based");
    ++matched;
    rank_sum += *r;
    m.mrr += 1.0 / *r;
    for (std::size_t i = 0; i < kPrecisionCutoffs.size(); ++i) {
      if (*r <= kPrecisionCutoffs[i]) m.precision_at[i] += 1.0;
    }
  }
  const double n = static_cast<double>(first_ranks.size());
  for (double& p : m.precision_at) p /= n;
  m.mrr /= n;
  m.coverage = static_cast<double>(matched) / n;
  m.mean_first_rank = matched > 0 ? rank_sum / static_cast<double>(matched) : 0.0;
  return m;
}

EvalResult evaluate(std::span<const EvalCase> cases, const CandidateIndex& index,
                    const EncoderParams& params, const Vocabulary& vocab,
                    const SimilarityConfig& sim, const EvalOptions& opts) {
  if (opts.k < 1) throw ValidationError("evaluation depth k must be >= 1");
  index.check_dimension(params.config.d_out);
  for (const EvalCase& c : cases) c.validate();

  EvalResult out;
  out.first_ranks.reserve(cases.size());
  for (std::size_t start = 0; start < cases.size(); start += kQueryChunk) {
    const std::size_t end = std::min(cases.size(), start + kQueryChunk);
    std::vector<std::string> texts;
    for (std::size_t i = start; i < end; ++i) texts.push_back(cases[i].query.text);
    const Eigen::MatrixXd q = query_vectors(params, vocab, texts, sim);
    for (std::size_t i = start; i < end; ++i) {
      const Eigen::VectorXd row = q.row(static_cast<Eigen::Index>(i - start)).transpose();
      const auto hits = opts.n_probe > 0 ? index.search_approx(row, opts.k, opts.n_probe)
                                         : index.search_exact(row, opts.k);
      out.first_ranks.push_back(judge(index, hits, *cases[i].gold.nlu));
    }
  }
  out.metrics = summarize_ranks(out.first_ranks);
  return out;
}

std::string metrics_json(const MetricsReport& m) {
  std::string s = "{";
  for (std::size_t i = 0; i < kPrecisionCutoffs.size(); ++i) {
    s += fmt::format("\"p@{}\": {:.6f}, ", kPrecisionCutoffs[i], m.precision_at[i]);
  }
  s += fmt::format("\"mrr\": {:.6f}, \"mean_first_rank\": {:.6f}, \"coverage\": {:.6f}, "
                   "\"n_cases\": {}}}\n",
                   m.mrr, m.mean_first_rank, m.coverage, m.n_cases);
  return s;
}

void write_metrics(const std::filesystem::path& path, const MetricsReport& m) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << metrics_json(m);
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace qrewrite
