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

#ifndef QREWRITE_EVAL_H_
#define QREWRITE_EVAL_H_

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "qrewrite/core.h"
#include "qrewrite/encoder.h"
#include "qrewrite/index.h"
#include "qrewrite/objective.h"
#include "qrewrite/textproc.h"

namespace qrewrite {

inline constexpr std::array<int, 4> kPrecisionCutoffs = {1, 5, 10, 20};
inline constexpr int kDefaultEvalDepth = 20;

struct MetricsReport {
  std::array<double, kPrecisionCutoffs.size()> precision_at{};  // aligned with kPrecisionCutoffs
  double mrr = 0.0;
  // Mean 1-based rank of the first match over cases that have one; 0 when
  // no case matched.
  double mean_first_rank = 0.0;
  double coverage = 0.0;  // share of cases with a match in the top k
  std::size_t n_cases = 0;

  // Throws ValidationError for a cutoff outside kPrecisionCutoffs.
  double p_at(int n) const;
};

// 1-based rank of the first retrieved hypothesis matching gold, if any.
// Entries without a hypothesis never match.
std::optional<int> judge(std::span<const std::optional<NluHypothesis>> retrieved,
                         const NluHypothesis& gold);

// Same, for hits returned by an index search.
std::optional<int> judge(const CandidateIndex& index, std::span<const SearchHit> hits,
                         const NluHypothesis& gold);

// Aggregates first-match ranks. p@n is the share of cases whose first
// match is at rank <= n, and a case counts zero toward MRR when unmatched.
MetricsReport summarize_ranks(std::span<const std::optional<int>> first_ranks);

struct EvalOptions {
  int k = kDefaultEvalDepth;
  // 0 runs exact search; otherwise approximate search with this many probes.
  int n_probe = 0;
};

struct EvalResult {
  MetricsReport metrics;
  std::vector<std::optional<int>> first_ranks;  // aligned with the cases
};

EvalResult evaluate(std::span<const EvalCase> cases, const CandidateIndex& index,
                    const EncoderParams& params, const Vocabulary& vocab,
                    const SimilarityConfig& sim, const EvalOptions& opts = {});

// {"p@1", "p@5", "p@10", "p@20", "mrr", "mean_first_rank", "coverage",
// "n_cases"} with six-decimal floats.
std::string metrics_json(const MetricsReport& m);
void write_metrics(const std::filesystem::path& path, const MetricsReport& m);

}  // namespace qrewrite

#endif  // QREWRITE_EVAL_H_
