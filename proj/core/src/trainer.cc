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

#include "qrewrite/trainer.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_set>

#include <fmt/format.h>
#include "json.hpp"

#include "binary_io.h"
#include "qrewrite/errors.h"

namespace qrewrite {

namespace {

// One training example: a token sequence per set, plus the keys used for the
// validation split and for keeping duplicate targets out of a batch.
struct Example {
  std::vector<TokenSequence> seqs;
  std::string split_key;
  std::string target_key;
};

struct TaskLayout {
  std::size_t n_sets = 2;
  std::vector<TaskSpec> tasks = {{0, 1}};
};

// Sets 0..3 hold u_t, h_t, u_{t+1}, h_{t+1}; the four tasks predict either
// next-turn view from either current-turn view.
TaskLayout joint_layout() { return TaskLayout{4, {{0, 2}, {0, 3}, {1, 2}, {1, 3}}}; }

std::vector<Example> build_examples(const TrainCorpus& corpus, const Vocabulary& vocab,
                                    TrainMode mode, int max_len) {
  std::vector<Example> out;
  auto text_seq = [&](const Utterance& u) { return tokenize(u.text, vocab, max_len); };
  auto hyp_seq = [&](const Utterance& u) {
    return tokenize(serialize_hypothesis(*u.nlu), vocab, max_len);
  };

  switch (mode) {
    case TrainMode::kBaseline:
    case TrainMode::kFinetune:
      for (const RewritePair& p : corpus.pairs) {
        out.push_back({{text_seq(p.source), text_seq(p.target)},
                       normalize_text(p.source.text),
                       normalize_text(p.target.text)});
      }
      break;
    case TrainMode::kPretrainText:
      for (const Session& s : corpus.sessions) {
        for (const auto& [cur, next] : next_turn_pairs(s)) {
          out.push_back({{text_seq(cur), text_seq(next)}, normalize_text(cur.text),
                         normalize_text(next.text)});
        }
      }
      break;
    case TrainMode::kPretrainTextNlu:
      for (const Session& s : corpus.sessions) {
        if (!s.fully_annotated()) {
          throw ValidationError("joint text+hypothesis pretraining needs every turn annotated; "
                                "session of user '" + s.user_id() + "' lacks hypotheses");
        }
        for (const auto& [cur, next] : next_turn_pairs(s)) {
          out.push_back({{text_seq(cur), hyp_seq(cur), text_seq(next), hyp_seq(next)},
                         normalize_text(cur.text),
                         normalize_text(next.text)});
        }
      }
      break;
  }
  return out;
}

// Shuffled batches that postpone an example whose target already appears in
// the batch being filled. Postponed examples lead the next batch, so every
// example is used exactly once per epoch.
std::vector<std::vector<std::size_t>> make_batches(const std::vector<Example>& examples,
                                                   std::span<const std::size_t> members,
                                                   int batch_size, Rng& rng) {
  std::vector<std::size_t> order(members.begin(), members.end());
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> batches;
  std::deque<std::size_t> pending;
  std::size_t next = 0;
  while (!pending.empty() || next < order.size()) {
    std::vector<std::size_t> batch;
    std::unordered_set<std::string_view> keys;
    std::deque<std::size_t> deferred;
    while (static_cast<int>(batch.size()) < batch_size && (!pending.empty() || next < order.size())) {
      std::size_t idx;
      if (!pending.empty()) {
        idx = pending.front();
        pending.pop_front();
      } else {
        idx = order[next++];
      }
      if (keys.insert(examples[idx].target_key).second) {
        batch.push_back(idx);
      } else {
        deferred.push_back(idx);
      }
    }
    pending.insert(pending.begin(), deferred.begin(), deferred.end());
    batches.push_back(std::move(batch));
  }
  return batches;
}

std::vector<std::vector<TokenSequence>> gather(const std::vector<Example>& examples,
                                               std::span<const std::size_t> batch,
                                               std::size_t n_sets) {
  std::vector<std::vector<TokenSequence>> sets(n_sets);
  for (std::size_t idx : batch) {
    for (std::size_t k = 0; k < n_sets; ++k) sets[k].push_back(examples[idx].seqs[k]);
  }
  return sets;
}

// Fixed-order validation batches; a trailing singleton joins the previous
// batch because a one-row batch has zero loss by construction.
std::vector<std::vector<std::size_t>> validation_batches(std::span<const std::size_t> members,
                                                         int batch_size) {
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < members.size(); start += static_cast<std::size_t>(batch_size)) {
    const std::size_t end = std::min(members.size(), start + static_cast<std::size_t>(batch_size));
    batches.emplace_back(members.begin() + static_cast<std::ptrdiff_t>(start),
                         members.begin() + static_cast<std::ptrdiff_t>(end));
  }
  if (batches.size() >= 2 && batches.back().size() == 1) {
    batches[batches.size() - 2].push_back(batches.back().front());
    batches.pop_back();
  }
  return batches;
}

double weighted_mean(double sum, std::size_t count) {
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

}  // namespace

std::string_view to_string(TrainMode mode) {
  switch (mode) {
    case TrainMode::kBaseline: return "baseline";
    case TrainMode::kPretrainText: return "pretrain_text";
    case TrainMode::kPretrainTextNlu: return "pretrain_text_nlu";
    case TrainMode::kFinetune: return "finetune";
  }
  return "unknown";
}

TrainMode parse_train_mode(std::string_view name) {
  for (TrainMode m : {TrainMode::kBaseline, TrainMode::kPretrainText, TrainMode::kPretrainTextNlu,
                      TrainMode::kFinetune}) {
    if (to_string(m) == name) return m;
  }
  throw ValidationError("unknown training mode '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
  if (max_epochs < 1) throw ValidationError("max_epochs must be >= 1");
  if (patience < 1) throw ValidationError("patience must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ValidationError("learning_rate must be > 0");
  }
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw ValidationError("Adam betas must lie in [0, 1)");
  }
  if (!(adam_eps > 0.0)) throw ValidationError("adam_eps must be > 0");
  if (!(finetune_ratio > 0.0 && finetune_ratio <= 1.0)) {
    throw ValidationError("finetune_ratio must lie in (0, 1]");
  }
  if (!(val_fraction >= 0.0 && val_fraction < 1.0)) {
    throw ValidationError("val_fraction must lie in [0, 1)");
  }
}

bool in_validation_split(std::string_view source_text, double fraction, std::uint64_t seed) {
  if (fraction <= 0.0) return false;
  std::string salted = fmt::format("{}\n", seed);
  salted += normalize_text(source_text);
  // FNV-1a alone leaves the high bits poorly mixed for strings that differ
  // only near the end, so finish with the splitmix64 avalanche.
  std::uint64_t h = internal::fnv1a64(salted);
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
  h ^= h >> 31;
  // Top 53 bits as a uniform value in [0, 1).
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
  return u < fraction;
}

std::vector<std::size_t> sample_fraction(std::size_t n, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio <= 1.0)) throw ValidationError("ratio must lie in (0, 1]");
  // The small slack keeps products such as 0.29 * 100 from rounding down.
  const auto keep = std::min(
      n, static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 1e-9)));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed ^ 0x5eed5a3b1e5ULL);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(keep);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<std::string> vocabulary_corpus(std::span<const Utterance> utterances,
                                           std::span<const Candidate> candidates,
                                           std::span<const RewritePair> pairs) {
  std::vector<std::string> out;
  for (const Utterance& u : utterances) {
    out.push_back(u.text);
    if (u.nlu) out.push_back(serialize_hypothesis(*u.nlu));
  }
  for (const Candidate& c : candidates) {
    out.push_back(c.text);
    if (c.nlu) out.push_back(serialize_hypothesis(*c.nlu));
  }
  for (const RewritePair& p : pairs) {
    out.push_back(p.source.text);
    out.push_back(p.target.text);
  }
  return out;
}

TrainResult train(const TrainCorpus& corpus, const Vocabulary& vocab,
                  const EncoderConfig& encoder_cfg, const TrainConfig& cfg,
                  const SimilarityConfig& sim) {
  cfg.validate();
  sim.validate();

  const bool pair_mode = cfg.mode == TrainMode::kBaseline || cfg.mode == TrainMode::kFinetune;
  if (pair_mode && corpus.pairs.empty()) {
    throw ValidationError(fmt::format("{} training needs at least one rewrite pair",
                                      to_string(cfg.mode)));
  }
  if (!pair_mode && corpus.sessions.empty()) {
    throw ValidationError(fmt::format("{} needs at least one session", to_string(cfg.mode)));
  }

  EncoderParams params;
  if (cfg.mode == TrainMode::kFinetune) {
    if (corpus.init == nullptr) {
      throw ValidationError("finetune mode needs an initial checkpoint");
    }
    params = *corpus.init;
  } else {
    EncoderConfig ec = encoder_cfg;
    if (ec.vocab_size == 0) ec.vocab_size = static_cast<int>(vocab.size());
    params = init_params(ec);
  }
  check_vocab_compatible(params.config, vocab);

  const std::vector<Example> examples = build_examples(corpus, vocab, cfg.mode, params.config.max_len);
  if (examples.empty()) {
    throw ValidationError("training corpus yields no examples (sessions need at least two turns)");
  }
  const TaskLayout layout =
      cfg.mode == TrainMode::kPretrainTextNlu ? joint_layout() : TaskLayout{};

  std::vector<std::size_t> train_pool;
  std::vector<std::size_t> val_set;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    (in_validation_split(examples[i].split_key, cfg.val_fraction, cfg.seed) ? val_set : train_pool)
        .push_back(i);
  }
  std::vector<std::size_t> train_set;
  for (std::size_t j : sample_fraction(train_pool.size(), cfg.finetune_ratio, cfg.seed)) {
    train_set.push_back(train_pool[j]);
  }
  if (train_set.empty()) throw ValidationError("training split is empty after sampling");

  TrainResult result{params, {}};
  TrainReport& report = result.report;
  report.mode = cfg.mode;
  report.n_train = train_set.size();
  report.n_val = val_set.size();

  const auto val_batches = validation_batches(val_set, cfg.batch_size);
  Rng rng(cfg.seed);
  AdamState adam = AdamState::zeros_like(params);
  EncoderParams grads = EncoderParams::zeros(params.config);
  double best_val = std::numeric_limits<double>::infinity();
  int since_best = 0;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    double loss_sum = 0.0;
    for (const auto& batch : make_batches(examples, train_set, cfg.batch_size, rng)) {
      grads.set_zero();
      const auto sets = gather(examples, batch, layout.n_sets);
      const double loss = multi_task_loss(sets, layout.tasks, params, sim, true, &rng, &grads);
      if (!std::isfinite(loss)) throw NumericError(fmt::format("non-finite loss in epoch {}", epoch));
      adam_step(params, grads, adam, cfg);
      loss_sum += loss * static_cast<double>(batch.size());
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = weighted_mean(loss_sum, train_set.size());
    if (!val_batches.empty()) {
      double val_sum = 0.0;
      for (const auto& batch : val_batches) {
        const auto sets = gather(examples, batch, layout.n_sets);
        val_sum += multi_task_loss(sets, layout.tasks, params, sim, false, nullptr, nullptr) *
                   static_cast<double>(batch.size());
      }
      rec.val_loss = weighted_mean(val_sum, val_set.size());
      rec.improved = *rec.val_loss < best_val;
    } else {
      rec.improved = true;  // without held-out data the latest epoch is kept
    }
    report.epochs.push_back(rec);

    if (rec.improved) {
      if (rec.val_loss) best_val = *rec.val_loss;
      since_best = 0;
      report.best_epoch = epoch;
      result.params = params;
    } else if (++since_best >= cfg.patience) {
      report.stopped_early = epoch < cfg.max_epochs;
      break;
    }
  }
  return result;
}

void write_train_report(const std::filesystem::path& path, const TrainReport& report) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (const EpochRecord& e : report.epochs) {
    nlohmann::ordered_json j;
    j["mode"] = to_string(report.mode);
    j["epoch"] = e.epoch;
    j["train_loss"] = e.train_loss;
    j["val_loss"] = e.val_loss ? nlohmann::ordered_json(*e.val_loss) : nlohmann::ordered_json();
    j["improved"] = e.improved;
    j["best_epoch"] = report.best_epoch;
    j["n_train"] = report.n_train;
    j["n_val"] = report.n_val;
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace qrewrite
