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

// Microbenchmarks for the retrieval and training hot paths.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "qrewrite/encoder.h"
#include "qrewrite/gradcheck.h"
#include "qrewrite/index.h"
#include "qrewrite/objective.h"
#include "qrewrite/trainer.h"

namespace {

using qrewrite::CandidateEntry;
using qrewrite::CandidateIndex;

constexpr int kDim = 128;

CandidateIndex random_index(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd vectors(static_cast<Eigen::Index>(n), kDim);
  for (Eigen::Index i = 0; i < vectors.size(); ++i) vectors.data()[i] = gauss(rng);
  std::vector<CandidateEntry> entries;
  for (std::size_t i = 0; i < n; ++i) {
    entries.push_back({static_cast<std::uint32_t>(i), "item " + std::to_string(i), std::nullopt, 1});
  }
  return CandidateIndex::from_vectors(std::move(entries), vectors, 16.0);
}

Eigen::VectorXd random_query(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd q(kDim);
  for (Eigen::Index i = 0; i < kDim; ++i) q[i] = gauss(rng);
  return q.normalized();
}

void BM_SearchExact(benchmark::State& state) {
  const CandidateIndex index = random_index(static_cast<std::size_t>(state.range(0)), 1);
  const Eigen::VectorXd q = random_query(2);
  for (auto _ : state) benchmark::DoNotOptimize(index.search_exact(q, 20));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SearchExact)->Arg(2'000)->Arg(20'000);

void BM_SearchApprox(benchmark::State& state) {
  CandidateIndex index = random_index(20'000, 1);
  qrewrite::PartitionParams params;
  params.n_list = 64;
  index.build_partition(params);
  const Eigen::VectorXd q = random_query(2);
  const int n_probe = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(index.search_approx(q, 20, n_probe));
}
BENCHMARK(BM_SearchApprox)->Arg(1)->Arg(8)->Arg(64);

void BM_BuildPartition(benchmark::State& state) {
  const CandidateIndex base = random_index(5'000, 1);
  qrewrite::PartitionParams params;
  params.n_list = 64;
  for (auto _ : state) {
    CandidateIndex index = base;
    benchmark::DoNotOptimize(index.build_partition(params));
  }
}
BENCHMARK(BM_BuildPartition)->Unit(benchmark::kMillisecond);

qrewrite::EncoderConfig default_config() {
  qrewrite::EncoderConfig cfg;
  cfg.vocab_size = 1000;
  cfg.max_len = 8;
  return cfg;
}

void BM_EncodeBatch(benchmark::State& state) {
  const qrewrite::EncoderConfig cfg = default_config();
  const qrewrite::EncoderParams params = qrewrite::init_params(cfg);
  qrewrite::Rng rng(3);
  const auto seqs = qrewrite::random_sequences(cfg, static_cast<std::size_t>(state.range(0)), rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(qrewrite::encode_batch(params, seqs, false, nullptr).embeddings());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EncodeBatch)->Arg(1)->Arg(32)->Unit(benchmark::kMicrosecond);

// One optimizer step of pair training: forward, loss, backward, Adam.
void BM_TrainStep(benchmark::State& state) {
  const qrewrite::EncoderConfig cfg = default_config();
  qrewrite::EncoderParams params = qrewrite::init_params(cfg);
  qrewrite::Rng rng(4);
  const std::size_t batch = static_cast<std::size_t>(state.range(0));
  const std::vector<std::vector<qrewrite::TokenSequence>> sets = {
      qrewrite::random_sequences(cfg, batch, rng), qrewrite::random_sequences(cfg, batch, rng)};
  const std::vector<qrewrite::TaskSpec> tasks = {{0, 1}};
  qrewrite::EncoderParams grads = qrewrite::EncoderParams::zeros(cfg);
  qrewrite::AdamState adam = qrewrite::AdamState::zeros_like(params);
  const qrewrite::TrainConfig train_cfg;
  const qrewrite::SimilarityConfig sim;
  for (auto _ : state) {
    grads.set_zero();
    benchmark::DoNotOptimize(qrewrite::multi_task_loss(sets, tasks, params, sim, true, &rng, &grads));
    qrewrite::adam_step(params, grads, adam, train_cfg);
  }
}
BENCHMARK(BM_TrainStep)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
