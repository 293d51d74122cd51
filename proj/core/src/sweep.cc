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

#include "json.hpp"

#include "qrewrite/errors.h"
#include "qrewrite/index.h"
#include "qrewrite/trainer.h"

namespace qrewrite {

SweepReport run_ratio_sweep(const SweepInputs& inputs, const Vocabulary& vocab,
                            const EncoderConfig& encoder_cfg, const SweepConfig& cfg,
                            const SimilarityConfig& sim) {
  if (cfg.ratios.empty()) throw ValidationError("sweep needs at least one ratio");
  for (double r : cfg.ratios) {
    if (!(r > 0.0 && r <= 1.0)) throw ValidationError("sweep ratios must lie in (0, 1]");
  }
  if (inputs.pretrained == nullptr) {
    throw ValidationError("sweep needs a pretrained checkpoint for the finetune variant");
  }
  if (inputs.eval_cases.empty()) throw ValidationError("sweep needs evaluation cases");

  SweepReport report;
  for (double ratio : cfg.ratios) {
    for (TrainMode variant : {TrainMode::kBaseline, TrainMode::kFinetune}) {
      TrainConfig tc = variant == TrainMode::kBaseline ? cfg.baseline : cfg.finetune;
      tc.mode = variant;
      tc.finetune_ratio = ratio;
      TrainCorpus corpus;
      corpus.pairs = inputs.pairs;
      corpus.init = variant == TrainMode::kFinetune ? inputs.pretrained : nullptr;
      TrainResult trained = train(corpus, vocab, encoder_cfg, tc, sim);
      const CandidateIndex index = CandidateIndex::build(inputs.candidates, trained.params, vocab, sim);
      SweepRow row;
      row.ratio = ratio;
      row.variant = variant;
      row.metrics = evaluate(inputs.eval_cases, index, trained.params, vocab, sim, cfg.eval).metrics;
      row.report = std::move(trained.report);
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

void write_sweep_report(const std::filesystem::path& path, const SweepReport& report) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (const SweepRow& row : report.rows) {
    nlohmann::ordered_json j;
    j["ratio"] = row.ratio;
    j["variant"] = to_string(row.variant);
    j["n_train"] = row.report.n_train;
    j["epochs_run"] = row.report.epochs.size();
    j["best_epoch"] = row.report.best_epoch;
    for (std::size_t i = 0; i < kPrecisionCutoffs.size(); ++i) {
      j["p@" + std::to_string(kPrecisionCutoffs[i])] = row.metrics.precision_at[i];
    }
    j["mrr"] = row.metrics.mrr;
    j["mean_first_rank"] = row.metrics.mean_first_rank;
    j["coverage"] = row.metrics.coverage;
    j["n_cases"] = row.metrics.n_cases;
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace qrewrite
