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

#include <random>

#include <gtest/gtest.h>

#include "fixtures.h"
#include "qrewrite/errors.h"
#include "qrewrite/eval.h"

namespace qrewrite {
namespace {

using testing::hyp;
using testing::utt;

TEST(Judge, ReturnsFirstMatchingRank) {
  const NluHypothesis gold = hyp("Music", "PlayMusicIntent", {{"ArtistName", "the beatles"}});
  const std::vector<std::optional<NluHypothesis>> retrieved = {
      hyp("Music", "PlayMusicIntent", {{"ArtistName", "beatles"}}), std::nullopt,
      hyp("music", "playmusicintent", {{"artistname", "The Beatles"}}), gold};
  EXPECT_EQ(judge(retrieved, gold), 3);
  EXPECT_EQ(judge(std::span(retrieved).first(2), gold), std::nullopt);
  EXPECT_EQ(judge(std::vector<std::optional<NluHypothesis>>{}, gold), std::nullopt);
}

TEST(SummarizeRanks, HandComputedThreeCaseFixture) {
  const std::vector<std::optional<int>> ranks = {1, 3, std::nullopt};
  const MetricsReport m = summarize_ranks(ranks);
  EXPECT_EQ(m.n_cases, 3u);
  EXPECT_DOUBLE_EQ(m.p_at(1), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.p_at(5), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.p_at(10), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.p_at(20), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.mrr, (1.0 + 1.0 / 3.0) / 3.0);
  EXPECT_DOUBLE_EQ(m.mean_first_rank, 2.0);
  EXPECT_DOUBLE_EQ(m.coverage, 2.0 / 3.0);
}

TEST(SummarizeRanks, SecondFixtureWithDeepMatches) {
  const std::vector<std::optional<int>> ranks = {7, 20, 2};
  const MetricsReport m = summarize_ranks(ranks);
  EXPECT_DOUBLE_EQ(m.p_at(1), 0.0);
  EXPECT_DOUBLE_EQ(m.p_at(5), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.p_at(10), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.p_at(20), 1.0);
  EXPECT_DOUBLE_EQ(m.mrr, (1.0 / 7 + 1.0 / 20 + 0.5) / 3.0);
  EXPECT_DOUBLE_EQ(m.mean_first_rank, 29.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.coverage, 1.0);
  EXPECT_THROW(m.p_at(3), ValidationError);
}

TEST(SummarizeRanks, EmptyAndUnmatchedAreZero) {
  const MetricsReport empty = summarize_ranks({});
  EXPECT_EQ(empty.n_cases, 0u);
  EXPECT_EQ(empty.mrr, 0.0);
  const std::vector<std::optional<int>> none = {std::nullopt, std::nullopt};
  const MetricsReport m = summarize_ranks(none);
  EXPECT_EQ(m.mrr, 0.0);
  EXPECT_EQ(m.mean_first_rank, 0.0);
  EXPECT_EQ(m.coverage, 0.0);
}

TEST(SummarizeRanks, MetricsAreMonotoneOnRandomRankLists) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> rank(0, 25);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::optional<int>> ranks;
    for (int i = 0; i < 17; ++i) {
      const int r = rank(rng);
      ranks.push_back(r == 0 || r > 20 ? std::nullopt : std::optional<int>(r));
    }
    const MetricsReport m = summarize_ranks(ranks);
    EXPECT_LE(m.p_at(1), m.p_at(5));
    EXPECT_LE(m.p_at(5), m.p_at(10));
    EXPECT_LE(m.p_at(10), m.p_at(20));
    EXPECT_GE(m.mrr, 0.0);
    EXPECT_LE(m.mrr, 1.0);
    EXPECT_LE(m.mrr, m.p_at(20));
  }
}

TEST(MetricsJson, SixDecimalFieldsInFixedOrder) {
  const std::vector<std::optional<int>> ranks = {1, 3, std::nullopt};
  EXPECT_EQ(metrics_json(summarize_ranks(ranks)),
            "{\"p@1\": 0.333333, \"p@5\": 0.666667, \"p@10\": 0.666667, \"p@20\": 0.666667, "
            "\"mrr\": 0.444444, \"mean_first_rank\": 2.000000, \"coverage\": 0.666667, "
            "\"n_cases\": 3}\n");
}

TEST(Evaluate, ExactRewriteQueriesRankFirstWithIdentityHeads) {
  const std::vector<Candidate> cands = {
      {"play jazz", hyp("Music", "PlayMusicIntent", {{"Genre", "jazz"}}), 1},
      {"weather in boston", hyp("Weather", "GetWeatherIntent", {{"City", "boston"}}), 1},
      {"stop", hyp("Global", "StopIntent"), 1}};
  std::vector<std::string> texts;
  for (const auto& c : cands) texts.push_back(c.text);
  const Vocabulary vocab = Vocabulary::build(texts);
  EncoderConfig cfg;
  cfg.vocab_size = static_cast<int>(vocab.size());
  cfg.d_emb = 8;
  cfg.d_hid = 4;
  cfg.n_heads = 2;
  cfg.d_head = 4;
  cfg.d_out = 6;
  EncoderParams params = init_params(cfg);
  testing::set_identity_heads(params);
  const SimilarityConfig sim;
  CandidateIndex idx = CandidateIndex::build(cands, params, vocab, sim);
  std::vector<EvalCase> cases;
  for (const auto& c : cands) cases.push_back({utt("u", 0, c.text), utt("u", 1, c.text, c.nlu)});
  const EvalResult r = evaluate(cases, idx, params, vocab, sim);
  EXPECT_EQ(r.metrics.p_at(1), 1.0);
  EXPECT_EQ(r.metrics.mrr, 1.0);
  idx.build_partition({1, 3, 1});
  EXPECT_EQ(evaluate(cases, idx, params, vocab, sim, EvalOptions{20, 1}).first_ranks, r.first_ranks);

  std::vector<EvalCase> unlabeled = {{utt("u", 0, "stop"), utt("u", 1, "stop")}};
  EXPECT_THROW(evaluate(unlabeled, idx, params, vocab, sim), ValidationError);
}

}  // namespace
}  // namespace qrewrite
