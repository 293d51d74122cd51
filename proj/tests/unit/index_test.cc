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

#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "brute_force.h"
#include "fixtures.h"
#include "qrewrite/errors.h"
#include "qrewrite/index.h"

namespace qrewrite {
namespace {

using testing::hyp;
using testing::TempDir;

CandidateIndex random_index(std::size_t n, int dim, std::uint64_t seed) {
  return CandidateIndex::from_vectors(testing::plain_entries(n), testing::random_vectors(n, dim, seed), 16.0);
}

Eigen::VectorXd unit_query(int dim, std::uint64_t seed) {
  Eigen::VectorXd q = testing::random_vectors(1, dim, seed).row(0).transpose();
  return q.normalized();
}

struct TextWorld {
  std::vector<Candidate> candidates = {
      {"play jazz", hyp("Music", "PlayMusicIntent", {{"Genre", "jazz"}}), 1},
      {"Play  Jazz", hyp("Music", "PlayMusicIntent", {{"Genre", "jazz"}}), 1},
      {"weather in boston", hyp("Weather", "GetWeatherIntent", {{"City", "boston"}}), 3},
      {"stop", hyp("Global", "StopIntent"), 1},
      {"play the beatles", hyp("Music", "PlayMusicIntent", {{"ArtistName", "the beatles"}}), 2}};
  Vocabulary vocab;
  EncoderParams params;

  TextWorld() : vocab(Vocabulary::build(texts())) {
    EncoderConfig cfg;
    cfg.vocab_size = static_cast<int>(vocab.size());
    cfg.d_emb = 8;
    cfg.d_hid = 4;
    cfg.n_heads = 2;
    cfg.d_head = 4;
    cfg.d_out = 6;
    params = init_params(cfg);
  }

  std::vector<std::string> texts() const {
    std::vector<std::string> out;
    for (const auto& c : candidates) out.push_back(c.text);
    out.push_back("play bee tolls");
    return out;
  }
};

TEST(BuildIndex, DeduplicatesByNormalizedTextSummingFrequency) {
  TextWorld w;
  const CandidateIndex idx = CandidateIndex::build(w.candidates, w.params, w.vocab, SimilarityConfig{});
  ASSERT_EQ(idx.size(), 4u);
  EXPECT_EQ(idx.entry(0).text, "play jazz");
  EXPECT_EQ(idx.entry(0).frequency, 2);
  EXPECT_EQ(idx.entry(1).frequency, 3);
  EXPECT_EQ(idx.dim(), 6);
  EXPECT_EQ(idx.alpha(), 16.0);
}

TEST(BuildIndex, EmptyCandidateListIsRejected) {
  TextWorld w;
  EXPECT_THROW(CandidateIndex::build({}, w.params, w.vocab, SimilarityConfig{}), ValidationError);
}

TEST(BuildIndex, StoredVectorsAreUnitNorm) {
  TextWorld w;
  const CandidateIndex idx = CandidateIndex::build(w.candidates, w.params, w.vocab, SimilarityConfig{});
  for (std::uint32_t id = 0; id < idx.size(); ++id) {
    double sq = 0.0;
    for (float x : idx.vector(id)) sq += static_cast<double>(x) * x;
    EXPECT_NEAR(std::sqrt(sq), 1.0, 1e-6);
  }
}

TEST(BuildIndex, StoredScoresEqualScaledCosine) {
  TextWorld w;
  const SimilarityConfig sim;
  const CandidateIndex idx = CandidateIndex::build(w.candidates, w.params, w.vocab, sim);
  const auto texts = w.texts();
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const std::string& q = texts[rng() % texts.size()];
    const std::uint32_t id = static_cast<std::uint32_t>(rng() % idx.size());
    const double direct =
        scaled_cosine(encode(w.params, tokenize(q, w.vocab, w.params.config.max_len)),
                      encode(w.params, tokenize(idx.entry(id).text, w.vocab, w.params.config.max_len)),
                      w.params, sim);
    EXPECT_NEAR(idx.score(query_vector(w.params, w.vocab, q, sim), id), direct, 1e-5);
  }
}

TEST(SearchExact, SelfMatchScoresAlphaWithIdentityHeads) {
  TextWorld w;
  testing::set_identity_heads(w.params);
  const SimilarityConfig sim;
  const CandidateIndex idx = CandidateIndex::build(w.candidates, w.params, w.vocab, sim);
  const auto hits = idx.search_exact(query_vector(w.params, w.vocab, "weather in boston", sim), 3);
  ASSERT_EQ(hits.size(), 3u);
  EXPECT_EQ(idx.entry(hits[0].id).text, "weather in boston");
  EXPECT_NEAR(hits[0].score, 16.0, 1e-5);
}

TEST(SearchExact, TiesGoToTheLowerId) {
  Eigen::MatrixXd v(3, 2);
  v << 1, 0, 0, 1, 0, 1;
  const CandidateIndex idx = CandidateIndex::from_vectors(testing::plain_entries(3), v, 16.0);
  Eigen::VectorXd q(2);
  q << 0, 1;
  const auto hits = idx.search_exact(q, 1);
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0].id, 1u);
  EXPECT_EQ(idx.search_exact(q, 2)[1].id, 2u);
}

TEST(SearchExact, LargeKReturnsEverythingAndBadInputsThrow) {
  const CandidateIndex idx = random_index(7, 4, 1);
  EXPECT_EQ(idx.search_exact(unit_query(4, 2), 100).size(), 7u);
  EXPECT_THROW(idx.search_exact(unit_query(4, 2), 0), ValidationError);
  EXPECT_THROW(idx.search_exact(unit_query(5, 2), 3), DimensionError);
}

TEST(SearchExact, AgreesWithBruteForceOracle) {
  const CandidateIndex idx = random_index(1000, 16, 3);
  const auto stored = testing::stored_vectors(idx);
  for (std::uint64_t s = 0; s < 200; ++s) {
    const Eigen::VectorXd q = unit_query(16, 100 + s);
    const auto got = idx.search_exact(q, 20);
    const auto want = testing::brute_force_top_k(stored, q, 16.0, 20);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      ASSERT_EQ(got[i].id, want[i].id) << "query " << s << " rank " << i;
      ASSERT_EQ(got[i].score, want[i].score);
    }
  }
}

TEST(SearchApprox, NeedsAPartitionAndAValidProbeCount) {
  CandidateIndex idx = random_index(50, 4, 1);
  EXPECT_THROW(idx.search_approx(unit_query(4, 1), 5, 1), ValidationError);
  idx.build_partition({5, 10, 1});
  EXPECT_THROW(idx.search_approx(unit_query(4, 1), 5, 0), ValidationError);
  EXPECT_THROW(idx.search_approx(unit_query(4, 1), 5, 6), ValidationError);
  EXPECT_NO_THROW(idx.search_approx(unit_query(4, 1), 5, 5));
}

TEST(SearchApprox, FullProbeAndSingleListEqualExact) {
  for (int n_list : {1, 7}) {
    CandidateIndex idx = random_index(300, 8, 4);
    idx.build_partition({n_list, 10, 2});
    for (std::uint64_t s = 0; s < 50; ++s) {
      const Eigen::VectorXd q = unit_query(8, 500 + s);
      EXPECT_EQ(idx.search_approx(q, 10, n_list), idx.search_exact(q, 10)) << "n_list " << n_list;
    }
  }
}

TEST(SearchApprox, HighRecallOnClusteredData) {
  CandidateIndex idx = CandidateIndex::from_vectors(
      testing::plain_entries(3000), testing::clustered_vectors(3000, 16, 30, 0.15, 5), 16.0);
  idx.build_partition({32, 25, 1});
  double total = 0.0;
  const Eigen::MatrixXd queries = testing::clustered_vectors(100, 16, 30, 0.15, 5 ^ 77);
  for (Eigen::Index i = 0; i < queries.rows(); ++i) {
    const Eigen::VectorXd q = queries.row(i).normalized().transpose();
    total += testing::recall(idx.search_approx(q, 10, 4), idx.search_exact(q, 10));
  }
  EXPECT_GE(total / 100.0, 0.9);
}

TEST(BuildPartition, SeparatedClustersArePartitionedCleanly) {
  const int n = 200;
  Eigen::MatrixXd v(n, 3);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> noise(0.0, 0.05);
  for (int i = 0; i < n; ++i) {
    const double sign = i < n / 2 ? 1.0 : -1.0;
    v.row(i) << sign + noise(rng), 0.2 + noise(rng), noise(rng);
  }
  CandidateIndex idx = CandidateIndex::from_vectors(testing::plain_entries(n), v, 16.0);
  idx.build_partition({2, 10, 3});
  const auto& lists = idx.partition()->lists;
  ASSERT_EQ(lists.size(), 2u);
  for (const auto& list : lists) {
    ASSERT_FALSE(list.empty());
    const bool first_half = list.front() < n / 2;
    for (std::uint32_t id : list) EXPECT_EQ(id < static_cast<std::uint32_t>(n / 2), first_half);
  }
}

TEST(BuildPartition, DeterministicMonotoneAndCovering) {
  CandidateIndex a = random_index(500, 6, 9);
  CandidateIndex b = random_index(500, 6, 9);
  const PartitionStats sa = a.build_partition({20, 15, 4});
  const PartitionStats sb = b.build_partition({20, 15, 4});
  EXPECT_TRUE(*a.partition() == *b.partition());
  ASSERT_EQ(sa.objective.size(), 16u);
  EXPECT_EQ(sa.objective, sb.objective);
  for (std::size_t i = 1; i < sa.objective.size(); ++i) {
    EXPECT_LE(sa.objective[i], sa.objective[i - 1] * (1 + 1e-12));
  }
  std::vector<int> seen(500, 0);
  for (const auto& list : a.partition()->lists) {
    for (std::uint32_t id : list) ++seen[id];
  }
  for (int c : seen) EXPECT_EQ(c, 1);
}

TEST(BuildPartition, DefaultListCountAndLimits) {
  CandidateIndex idx = random_index(50, 4, 1);
  idx.build_partition({});
  EXPECT_EQ(idx.partition()->n_list(), 8);  // ceil(sqrt(50))
  EXPECT_EQ(default_n_probe(8), 1);
  EXPECT_EQ(default_n_probe(64), 8);
  EXPECT_THROW(idx.build_partition({51, 5, 1}), ValidationError);
}

TEST(BuildPartition, DuplicatePointsStillFillEveryList) {
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(10, 2);
  v.col(0).setOnes();
  v(9, 0) = -1.0;
  CandidateIndex idx = CandidateIndex::from_vectors(testing::plain_entries(10), v, 16.0);
  idx.build_partition({3, 5, 1});
  std::size_t total = 0;
  for (const auto& list : idx.partition()->lists) total += list.size();
  EXPECT_EQ(total, 10u);
}

TEST(IndexFile, RoundTripIsBitwise) {
  TempDir dir;
  TextWorld w;
  CandidateIndex idx = CandidateIndex::build(w.candidates, w.params, w.vocab, SimilarityConfig{});
  idx.save(dir / "plain.idx");
  EXPECT_TRUE(CandidateIndex::load(dir / "plain.idx") == idx);
  idx.build_partition({2, 5, 1});
  idx.save(dir / "ivf.idx");
  const CandidateIndex back = CandidateIndex::load(dir / "ivf.idx");
  EXPECT_TRUE(back == idx);
  ASSERT_TRUE(back.partition().has_value());
}

TEST(IndexFile, CorruptionVersionAndDimensionErrors) {
  TempDir dir;
  const CandidateIndex idx = random_index(20, 4, 1);
  idx.save(dir / "a.idx");
  std::string bytes = testing::read_text(dir / "a.idx");
  std::ofstream(dir / "cut.idx", std::ios::binary) << bytes.substr(0, bytes.size() - 9);
  EXPECT_THROW(CandidateIndex::load(dir / "cut.idx"), CorruptFileError);
  std::string v2 = bytes;
  v2[5] = '2';
  std::ofstream(dir / "v2.idx", std::ios::binary) << v2;
  EXPECT_THROW(CandidateIndex::load(dir / "v2.idx"), VersionError);
  std::ofstream(dir / "junk.idx", std::ios::binary) << "hello world, not an index";
  EXPECT_THROW(CandidateIndex::load(dir / "junk.idx"), CorruptFileError);
  EXPECT_THROW(CandidateIndex::load(dir / "absent.idx"), IoError);
  EXPECT_THROW(idx.check_dimension(5), DimensionError);
  EXPECT_NO_THROW(idx.check_dimension(4));
}

}  // namespace
}  // namespace qrewrite
