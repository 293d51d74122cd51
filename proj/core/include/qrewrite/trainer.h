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

#ifndef QREWRITE_TRAINER_H_
#define QREWRITE_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qrewrite/core.h"
#include "qrewrite/encoder.h"
#include "qrewrite/eval.h"
#include "qrewrite/objective.h"
#include "qrewrite/textproc.h"

namespace qrewrite {

enum class TrainMode { kBaseline, kPretrainText, kPretrainTextNlu, kFinetune };

std::string_view to_string(TrainMode mode);
// Accepts "baseline", "pretrain_text", "pretrain_text_nlu" and "finetune".
TrainMode parse_train_mode(std::string_view name);

struct TrainConfig {
  int batch_size = 32;
  int max_epochs = 20;
  int patience = 3;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 1;
  TrainMode mode = TrainMode::kBaseline;
  double finetune_ratio = 1.0;  // share of the training split actually used
  // Share of examples held out for early stopping; 0 trains on everything
  // and runs every epoch.
  double val_fraction = 0.05;

  void validate() const;
};

struct AdamState {
  EncoderParams m;
  EncoderParams v;
  std::int64_t step = 0;

  static AdamState zeros_like(const EncoderParams& params);
};

// One Adam update. Throws NumericError, leaving params and state untouched,
// when any gradient is not finite.
void adam_step(EncoderParams& params, const EncoderParams& grads, AdamState& state,
               const TrainConfig& cfg);

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  std::optional<double> val_loss;
  bool improved = false;
};

struct TrainReport {
  TrainMode mode = TrainMode::kBaseline;
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  bool stopped_early = false;
  std::size_t n_train = 0;
  std::size_t n_val = 0;
};

// One JSON object per epoch.
void write_train_report(const std::filesystem::path& path, const TrainReport& report);

struct TrainCorpus {
  std::span<const RewritePair> pairs;    // baseline and finetune
  std::span<const Session> sessions;     // pretraining modes
  const EncoderParams* init = nullptr;   // required for finetune
};

struct TrainResult {
  EncoderParams params;
  TrainReport report;
};

// encoder_cfg.vocab_size may be 0, in which case it is taken from vocab.
TrainResult train(const TrainCorpus& corpus, const Vocabulary& vocab,
                  const EncoderConfig& encoder_cfg, const TrainConfig& train_cfg,
                  const SimilarityConfig& sim = {});

// Deterministic held-out membership from a seeded hash of the source text.
bool in_validation_split(std::string_view source_text, double fraction, std::uint64_t seed);

// Exactly floor(ratio * n) distinct indices in increasing order.
std::vector<std::size_t> sample_fraction(std::size_t n, double ratio, std::uint64_t seed);

// Every string the vocabulary should cover: utterance texts, serialized
// hypotheses, candidate texts and hypotheses, and pair texts.
std::vector<std::string> vocabulary_corpus(std::span<const Utterance> utterances,
                                           std::span<const Candidate> candidates,
                                           std::span<const RewritePair> pairs);

struct SweepConfig {
  std::vector<double> ratios = {0.2, 0.4, 0.6, 0.8, 1.0};
  TrainConfig baseline;
  TrainConfig finetune;
  EvalOptions eval;
};

struct SweepRow {
  double ratio = 0.0;
  TrainMode variant = TrainMode::kBaseline;
  MetricsReport metrics;
  TrainReport report;
};

struct SweepReport {
  std::vector<SweepRow> rows;  // baseline then finetune for each ratio
};

struct SweepInputs {
  std::span<const RewritePair> pairs;
  std::span<const EvalCase> eval_cases;
  std::span<const Candidate> candidates;
  const EncoderParams* pretrained = nullptr;
};

SweepReport run_ratio_sweep(const SweepInputs& inputs, const Vocabulary& vocab,
                            const EncoderConfig& encoder_cfg, const SweepConfig& cfg,
                            const SimilarityConfig& sim = {});

// One JSON object per row.
void write_sweep_report(const std::filesystem::path& path, const SweepReport& report);

}  // namespace qrewrite

#endif  // QREWRITE_TRAINER_H_
