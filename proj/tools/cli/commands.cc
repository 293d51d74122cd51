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

#include "commands.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "qrewrite/data.h"
#include "qrewrite/encoder.h"
#include "qrewrite/errors.h"
#include "qrewrite/eval.h"
#include "qrewrite/generator.h"
#include "qrewrite/gradcheck.h"
#include "qrewrite/index.h"
#include "qrewrite/textproc.h"
#include "qrewrite/trainer.h"
#include "run_config.h"

namespace qrewrite::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kSessionsFile = "sessions.jsonl";
constexpr const char* kGoldPairsFile = "gold_pairs.tsv";
constexpr const char* kMinedPairsFile = "mined_pairs.tsv";
constexpr const char* kCandidatesFile = "candidates.jsonl";
constexpr const char* kEvalCasesFile = "eval_cases.jsonl";
constexpr const char* kVocabFile = "vocab.txt";
constexpr const char* kCheckpointFile = "encoder.ckpt";
constexpr const char* kTrainReportFile = "train_report.jsonl";
constexpr const char* kIndexFile = "index.qridx";
constexpr const char* kMetricsFile = "metrics.json";
constexpr const char* kSweepFile = "sweep.jsonl";
constexpr const char* kConfigEcho = "config.ini";

// Everything the parser collects before the configuration is assembled.
struct Invocation {
  std::string config_path;
  std::vector<std::string> sets;
  std::vector<std::string> flag_overrides;
  bool force = false;
  std::string mode = "text";
  std::string text;
  int n_configs = 3;
  double tolerance = GradcheckOptions{}.tolerance;
};

// ---------------------------------------------------------------------------
// Path resolution. Every command resolves its inputs up front so a missing
// artifact fails before any work is done.

fs::path require_input(const fs::path& path, std::string_view what, std::string_view hint) {
  if (!fs::is_regular_file(path)) {
    throw IoError(fmt::format("missing {}: {} ({})", what, path.string(), hint));
  }
  return path;
}

fs::path data_input(const RunConfig& cfg, const std::string& explicit_path, const char* file_name,
                    std::string_view what) {
  if (!explicit_path.empty()) return require_input(explicit_path, what, "check the path");
  if (cfg.paths.data_dir.empty()) {
    throw ValidationError(fmt::format("no {} given: pass --data DIR (the output of 'qrewrite datagen')", what));
  }
  return require_input(fs::path(cfg.paths.data_dir) / file_name, what,
                       "run 'qrewrite datagen' to create it");
}

fs::path checkpoint_input(const std::string& path, std::string_view flag) {
  if (path.empty()) throw ValidationError(fmt::format("{} is required", flag));
  return require_input(path, "checkpoint", "train one with pretrain, train-baseline or finetune");
}

// The vocabulary next to a checkpoint wins over the data directory's copy.
fs::path vocab_input(const RunConfig& cfg, const std::string& checkpoint) {
  if (!cfg.paths.vocab.empty()) return require_input(cfg.paths.vocab, "vocabulary", "check the path");
  if (!checkpoint.empty()) {
    const fs::path sibling = fs::path(checkpoint).parent_path() / kVocabFile;
    if (fs::is_regular_file(sibling)) return sibling;
  }
  if (cfg.paths.data_dir.empty()) {
    throw ValidationError("no vocabulary found: pass --vocab FILE or --data DIR");
  }
  return require_input(fs::path(cfg.paths.data_dir) / kVocabFile, "vocabulary",
                       "run 'qrewrite datagen' to create it");
}

fs::path output_dir(const RunConfig& cfg) {
  if (cfg.paths.out_dir.empty()) throw ValidationError("no output directory: pass --out DIR");
  fs::path dir(cfg.paths.out_dir);
  if (fs::exists(dir) && !fs::is_directory(dir)) {
    throw ValidationError(fmt::format("output path {} exists and is not a directory", dir.string()));
  }
  return dir;
}

void create_output_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
}

void echo_config(const RunConfig& cfg, const fs::path& dir, std::string_view command) {
  const fs::path path = dir / kConfigEcho;
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  file << cfg.to_ini(command);
  file.flush();
  if (!file) throw IoError("failed writing " + path.string());
}

std::vector<RewritePair> load_pairs(const fs::path& path) {
  return to_rewrite_pairs(read_pairs(path).records);
}

SimilarityConfig similarity_for(const RunConfig& cfg, const CandidateIndex& index) {
  SimilarityConfig sim = cfg.similarity;
  sim.alpha = index.alpha();
  return sim;
}

void print_epochs(std::ostream& out, const TrainReport& report) {
  for (const EpochRecord& e : report.epochs) {
    out << fmt::format("epoch {:>3}  train_loss={:.6f}  val_loss={}{}\n", e.epoch, e.train_loss,
                       e.val_loss ? fmt::format("{:.6f}", *e.val_loss) : std::string("n/a"),
                       e.improved ? "  *" : "");
  }
  out << fmt::format("{}: {} training / {} validation examples, best epoch {}{}\n",
                     to_string(report.mode), report.n_train, report.n_val, report.best_epoch,
                     report.stopped_early ? " (stopped early)" : "");
}

void write_training_outputs(const RunConfig& cfg, std::string_view command, const fs::path& dir,
                            const TrainResult& result, const Vocabulary& vocab, std::ostream& out) {
  create_output_dir(dir);
  save_checkpoint(result.params, dir / kCheckpointFile);
  vocab.save(dir / kVocabFile);
  write_train_report(dir / kTrainReportFile, result.report);
  echo_config(cfg, dir, command);
  print_epochs(out, result.report);
  out << fmt::format("wrote {}\n", (dir / kCheckpointFile).string());
}

// ---------------------------------------------------------------------------
// Commands.

int cmd_datagen(RunConfig cfg, const Invocation& inv, std::ostream& out) {
  const fs::path dir = output_dir(cfg);
  if (fs::exists(dir) && !fs::is_empty(dir) && !inv.force) {
    throw ValidationError(fmt::format("output directory {} is not empty; pass --force to overwrite",
                                      dir.string()));
  }
  const GeneratedCorpus corpus = generate_corpus(cfg.generator);
  const std::vector<Session> segmented = segment_sessions(corpus.utterances);
  const std::vector<Session> kept = filter_sessions(segmented);
  const std::vector<MinedPair> mined = mine_pairs(kept, cfg.mining_threshold);
  const Vocabulary vocab = Vocabulary::build(
      vocabulary_corpus(corpus.utterances, corpus.candidates, corpus.gold_pairs), cfg.vocab_min_count);

  create_output_dir(dir);
  write_utterances(dir / kSessionsFile, corpus.utterances);
  write_pairs(dir / kGoldPairsFile, to_text_pairs(corpus.gold_pairs));
  write_pairs(dir / kMinedPairsFile, to_text_pairs(mined));
  write_candidates(dir / kCandidatesFile, corpus.candidates);
  write_eval_cases(dir / kEvalCasesFile, corpus.eval_cases);
  vocab.save(dir / kVocabFile);
  echo_config(cfg, dir, "datagen");

  out << fmt::format(
      "sessions={} kept_sessions={} utterances={} gold_pairs={} mined_pairs={} candidates={} "
      "eval_cases={} vocab={}\n",
      segmented.size(), kept.size(), corpus.utterances.size(), corpus.gold_pairs.size(), mined.size(),
      corpus.candidates.size(), corpus.eval_cases.size(), vocab.size());
  return kExitOk;
}

int cmd_pretrain(RunConfig cfg, const Invocation& inv, std::ostream& out) {
  const fs::path sessions_path = data_input(cfg, "", kSessionsFile, "session log");
  const fs::path vocab_path = vocab_input(cfg, "");
  const fs::path dir = output_dir(cfg);
  cfg.train.mode = inv.mode == "text_nlu" ? TrainMode::kPretrainTextNlu : TrainMode::kPretrainText;

  const Vocabulary vocab = Vocabulary::load(vocab_path);
  const std::vector<Session> sessions =
      filter_sessions(segment_sessions(read_utterances(sessions_path).records));
  TrainCorpus corpus;
  corpus.sessions = sessions;
  const TrainResult result = train(corpus, vocab, cfg.encoder, cfg.train, cfg.similarity);
  write_training_outputs(cfg, "pretrain", dir, result, vocab, out);
  return kExitOk;
}

int cmd_train_baseline(RunConfig cfg, const Invocation&, std::ostream& out) {
  const fs::path pairs_path = data_input(cfg, cfg.paths.pairs, kGoldPairsFile, "rewrite pairs");
  const fs::path vocab_path = vocab_input(cfg, "");
  const fs::path dir = output_dir(cfg);
  cfg.train.mode = TrainMode::kBaseline;

  const Vocabulary vocab = Vocabulary::load(vocab_path);
  const std::vector<RewritePair> pairs = load_pairs(pairs_path);
  TrainCorpus corpus;
  corpus.pairs = pairs;
  const TrainResult result = train(corpus, vocab, cfg.encoder, cfg.train, cfg.similarity);
  write_training_outputs(cfg, "train-baseline", dir, result, vocab, out);
  return kExitOk;
}

int cmd_finetune(RunConfig cfg, const Invocation&, std::ostream& out) {
  const fs::path init_path = checkpoint_input(cfg.paths.init_checkpoint, "--init-checkpoint");
  const fs::path pairs_path = data_input(cfg, cfg.paths.pairs, kGoldPairsFile, "rewrite pairs");
  const fs::path vocab_path = vocab_input(cfg, cfg.paths.init_checkpoint);
  const fs::path dir = output_dir(cfg);
  cfg.train.mode = TrainMode::kFinetune;

  const Vocabulary vocab = Vocabulary::load(vocab_path);
  const EncoderParams init = load_checkpoint(init_path);
  check_vocab_compatible(init.config, vocab);
  const std::vector<RewritePair> pairs = load_pairs(pairs_path);
  TrainCorpus corpus;
  corpus.pairs = pairs;
  corpus.init = &init;
  const TrainResult result = train(corpus, vocab, init.config, cfg.train, cfg.similarity);
  write_training_outputs(cfg, "finetune", dir, result, vocab, out);
  return kExitOk;
}

int cmd_build_index(RunConfig cfg, const Invocation&, std::ostream& out) {
  const fs::path ckpt_path = checkpoint_input(cfg.paths.checkpoint, "--checkpoint");
  const fs::path cand_path = data_input(cfg, cfg.paths.candidates, kCandidatesFile, "candidate list");
  const fs::path vocab_path = vocab_input(cfg, cfg.paths.checkpoint);
  const fs::path dir = output_dir(cfg);

  const EncoderParams params = load_checkpoint(ckpt_path);
  const Vocabulary vocab = Vocabulary::load(vocab_path);
  check_vocab_compatible(params.config, vocab);
  const std::vector<Candidate> candidates = read_candidates(cand_path).records;
  CandidateIndex index = CandidateIndex::build(candidates, params, vocab, cfg.similarity);
  int n_list = 0;
  if (cfg.build_partition) {
    index.build_partition(cfg.partition);
    n_list = index.partition()->n_list();
  }
  create_output_dir(dir);
  index.save(dir / kIndexFile);
  echo_config(cfg, dir, "build-index");
  out << fmt::format("indexed {} candidates ({} lines), dim {}, n_list {}\nwrote {}\n", index.size(),
                     candidates.size(), index.dim(), n_list, (dir / kIndexFile).string());
  return kExitOk;
}

struct Retriever {
  EncoderParams params;
  Vocabulary vocab;
  CandidateIndex index;
};

Retriever load_retriever(const RunConfig& cfg) {
  const fs::path ckpt_path = checkpoint_input(cfg.paths.checkpoint, "--checkpoint");
  if (cfg.paths.index.empty()) throw ValidationError("--index is required");
  const fs::path index_path = require_input(cfg.paths.index, "index", "create it with build-index");
  const fs::path vocab_path = vocab_input(cfg, cfg.paths.checkpoint);
  Retriever r{load_checkpoint(ckpt_path), Vocabulary::load(vocab_path), CandidateIndex::load(index_path)};
  check_vocab_compatible(r.params.config, r.vocab);
  r.index.check_dimension(r.params.config.d_out);
  return r;
}

int cmd_query(RunConfig cfg, const Invocation& inv, std::ostream& out) {
  const Retriever r = load_retriever(cfg);
  const Eigen::VectorXd q = query_vector(r.params, r.vocab, inv.text, similarity_for(cfg, r.index));
  const std::vector<SearchHit> hits = cfg.eval.n_probe == 0
                                          ? r.index.search_exact(q, cfg.eval.k)
                                          : r.index.search_approx(q, cfg.eval.k, cfg.eval.n_probe);
  int rank = 0;
  for (const SearchHit& h : hits) {
    const CandidateEntry& e = r.index.entry(h.id);
    out << fmt::format("{}\t{:.6f}\t{}\t{}\n", ++rank, h.score, e.text,
                       e.nlu ? serialize_hypothesis(*e.nlu) : std::string("-"));
  }
  return kExitOk;
}

int cmd_evaluate(RunConfig cfg, const Invocation&, std::ostream& out) {
  const fs::path cases_path = data_input(cfg, cfg.paths.cases, kEvalCasesFile, "evaluation cases");
  const fs::path dir = output_dir(cfg);
  const Retriever r = load_retriever(cfg);
  const std::vector<EvalCase> cases = read_eval_cases(cases_path).records;
  const EvalResult result =
      evaluate(cases, r.index, r.params, r.vocab, similarity_for(cfg, r.index), cfg.eval);
  create_output_dir(dir);
  write_metrics(dir / kMetricsFile, result.metrics);
  echo_config(cfg, dir, "evaluate");
  out << metrics_json(result.metrics);
  return kExitOk;
}

int cmd_sweep(RunConfig cfg, const Invocation&, std::ostream& out) {
  const fs::path init_path = checkpoint_input(cfg.paths.init_checkpoint, "--init-checkpoint");
  const fs::path pairs_path = data_input(cfg, cfg.paths.pairs, kGoldPairsFile, "rewrite pairs");
  const fs::path cand_path = data_input(cfg, cfg.paths.candidates, kCandidatesFile, "candidate list");
  const fs::path cases_path = data_input(cfg, cfg.paths.cases, kEvalCasesFile, "evaluation cases");
  const fs::path vocab_path = vocab_input(cfg, cfg.paths.init_checkpoint);
  const fs::path dir = output_dir(cfg);

  const EncoderParams pretrained = load_checkpoint(init_path);
  const Vocabulary vocab = Vocabulary::load(vocab_path);
  check_vocab_compatible(pretrained.config, vocab);
  const std::vector<RewritePair> pairs = load_pairs(pairs_path);
  const std::vector<Candidate> candidates = read_candidates(cand_path).records;
  const std::vector<EvalCase> cases = read_eval_cases(cases_path).records;

  SweepConfig sweep;
  sweep.ratios = cfg.sweep_ratios;
  sweep.baseline = cfg.train;
  sweep.baseline.max_epochs = cfg.sweep_baseline_epochs;
  sweep.finetune = cfg.train;
  sweep.finetune.max_epochs = cfg.sweep_finetune_epochs;
  sweep.eval = cfg.eval;
  SweepInputs inputs;
  inputs.pairs = pairs;
  inputs.eval_cases = cases;
  inputs.candidates = candidates;
  inputs.pretrained = &pretrained;
  const SweepReport report = run_ratio_sweep(inputs, vocab, pretrained.config, sweep, cfg.similarity);

  create_output_dir(dir);
  write_sweep_report(dir / kSweepFile, report);
  echo_config(cfg, dir, "sweep");
  out << fmt::format("{:>6}  {:<9}  {:>7}  {:>6}  {:>6}  {:>6}  {:>6}\n", "ratio", "variant", "n_train",
                     "p@1", "p@5", "p@20", "mrr");
  for (const SweepRow& row : report.rows) {
    out << fmt::format("{:>6.2f}  {:<9}  {:>7}  {:>6.4f}  {:>6.4f}  {:>6.4f}  {:>6.4f}\n", row.ratio,
                       to_string(row.variant), row.report.n_train, row.metrics.p_at(1),
                       row.metrics.p_at(5), row.metrics.p_at(20), row.metrics.mrr);
  }
  out << fmt::format("wrote {}\n", (dir / kSweepFile).string());
  return kExitOk;
}

int cmd_gradcheck(RunConfig cfg, const Invocation& inv, std::ostream& out) {
  if (inv.n_configs < 1) throw ValidationError("--configs must be >= 1");
  GradcheckOptions opts;
  opts.tolerance = inv.tolerance;
  bool all_passed = true;
  for (int i = 0; i < inv.n_configs; ++i) {
    const std::uint64_t seed = cfg.train.seed + static_cast<std::uint64_t>(i);
    const EncoderConfig ec = random_tiny_config(seed);
    for (const bool joint : {false, true}) {
      ContrastiveCheck check;
      check.config = ec;
      check.joint = joint;
      check.dropout = joint;
      check.seed = seed;
      const GradcheckResult r = gradcheck_contrastive(check, opts);
      const bool ok = r.passed(opts);
      all_passed = all_passed && ok;
      out << fmt::format(
          "config {} (vocab={} d_emb={} d_hid={} heads={}x{} d_out={} len={}) {}: "
          "max_rel_error={:.3e} over {} params at {}[{}] {}\n",
          i, ec.vocab_size, ec.d_emb, ec.d_hid, ec.n_heads, ec.d_head, ec.d_out, ec.max_len,
          joint ? "joint+dropout" : "pair", r.max_rel_error, r.n_checked, r.worst_tensor,
          r.worst_index, ok ? "PASS" : "FAIL");
    }
  }
  return all_passed ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------
// Parser wiring.

using Command = std::function<int(RunConfig, const Invocation&, std::ostream&)>;

// A flag that is sugar for "--set key=value".
void add_override_flag(CLI::App* sub, Invocation& inv, const std::string& flag, const std::string& key,
                       const std::string& help) {
  sub->add_option_function<std::string>(
      flag, [&inv, key](const std::string& v) { inv.flag_overrides.push_back(key + "=" + v); }, help);
}

RunConfig assemble_config(const Invocation& inv) {
  RunConfig cfg;
  if (!inv.config_path.empty()) cfg.load_file(inv.config_path);
  for (const std::string& s : inv.sets) cfg.apply_override(s);
  for (const std::string& s : inv.flag_overrides) cfg.apply_override(s);
  if (const auto seed = seed_from_environment()) cfg.apply_seed(*seed);
  cfg.validate();
  return cfg;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Neural retrieval query rewriting: data generation, training, indexing and evaluation",
               "qrewrite"};
  app.require_subcommand(1);
  app.fallthrough();
  Invocation inv;
  app.add_option("--config", inv.config_path, "INI configuration file");
  app.add_option("--set", inv.sets, "Override a config value (section.key=value); repeatable");

  std::vector<std::pair<CLI::App*, Command>> commands;
  auto add = [&](const std::string& name, const std::string& help, Command fn) {
    CLI::App* sub = app.add_subcommand(name, help);
    commands.emplace_back(sub, std::move(fn));
    return sub;
  };

  CLI::App* datagen = add("datagen", "Generate a synthetic session corpus", cmd_datagen);
  add_override_flag(datagen, inv, "--out", "paths.out_dir", "Output directory");
  datagen->add_flag("--force", inv.force, "Overwrite a non-empty output directory");

  CLI::App* pretrain = add("pretrain", "Pretrain on next-turn prediction", cmd_pretrain);
  add_override_flag(pretrain, inv, "--data", "paths.data_dir", "Corpus directory");
  add_override_flag(pretrain, inv, "--out", "paths.out_dir", "Output directory");
  add_override_flag(pretrain, inv, "--epochs", "train.max_epochs", "Maximum epochs");
  pretrain->add_option("--mode", inv.mode, "text or text_nlu")
      ->check(CLI::IsMember({"text", "text_nlu"}));

  CLI::App* baseline = add("train-baseline", "Train from scratch on rewrite pairs", cmd_train_baseline);
  add_override_flag(baseline, inv, "--data", "paths.data_dir", "Corpus directory");
  add_override_flag(baseline, inv, "--pairs", "paths.pairs", "Pair file (default DATA/gold_pairs.tsv)");
  add_override_flag(baseline, inv, "--out", "paths.out_dir", "Output directory");
  add_override_flag(baseline, inv, "--ratio", "train.finetune_ratio", "Fraction of training pairs");
  add_override_flag(baseline, inv, "--epochs", "train.max_epochs", "Maximum epochs");

  CLI::App* finetune = add("finetune", "Fine-tune a checkpoint on rewrite pairs", cmd_finetune);
  add_override_flag(finetune, inv, "--init-checkpoint", "paths.init_checkpoint", "Starting checkpoint");
  add_override_flag(finetune, inv, "--data", "paths.data_dir", "Corpus directory");
  add_override_flag(finetune, inv, "--pairs", "paths.pairs", "Pair file (default DATA/gold_pairs.tsv)");
  add_override_flag(finetune, inv, "--out", "paths.out_dir", "Output directory");
  add_override_flag(finetune, inv, "--ratio", "train.finetune_ratio", "Fraction of training pairs");
  add_override_flag(finetune, inv, "--epochs", "train.max_epochs", "Maximum epochs");

  CLI::App* build = add("build-index", "Encode candidates into a searchable index", cmd_build_index);
  add_override_flag(build, inv, "--checkpoint", "paths.checkpoint", "Encoder checkpoint");
  add_override_flag(build, inv, "--data", "paths.data_dir", "Corpus directory");
  add_override_flag(build, inv, "--candidates", "paths.candidates", "Candidate file");
  add_override_flag(build, inv, "--out", "paths.out_dir", "Output directory");
  add_override_flag(build, inv, "--n-list", "index.n_list", "Coarse partitions (0: sqrt N)");

  CLI::App* query = add("query", "Print the top rewrites for one query", cmd_query);
  add_override_flag(query, inv, "--checkpoint", "paths.checkpoint", "Encoder checkpoint");
  add_override_flag(query, inv, "--index", "paths.index", "Index file");
  add_override_flag(query, inv, "--vocab", "paths.vocab", "Vocabulary file");
  add_override_flag(query, inv, "-k", "eval.k", "Number of rewrites");
  add_override_flag(query, inv, "--n-probe", "eval.n_probe", "Partitions to scan (0: exact)");
  query->add_option("--text", inv.text, "Query text")->required();

  CLI::App* eval = add("evaluate", "Score an index against evaluation cases", cmd_evaluate);
  add_override_flag(eval, inv, "--checkpoint", "paths.checkpoint", "Encoder checkpoint");
  add_override_flag(eval, inv, "--index", "paths.index", "Index file");
  add_override_flag(eval, inv, "--data", "paths.data_dir", "Corpus directory");
  add_override_flag(eval, inv, "--cases", "paths.cases", "Evaluation case file");
  add_override_flag(eval, inv, "--out", "paths.out_dir", "Output directory");
  add_override_flag(eval, inv, "-k", "eval.k", "Retrieval depth");
  add_override_flag(eval, inv, "--n-probe", "eval.n_probe", "Partitions to scan (0: exact)");

  CLI::App* sweep = add("sweep", "Baseline vs fine-tuned metrics over training ratios", cmd_sweep);
  add_override_flag(sweep, inv, "--init-checkpoint", "paths.init_checkpoint", "Pretrained checkpoint");
  add_override_flag(sweep, inv, "--data", "paths.data_dir", "Corpus directory");
  add_override_flag(sweep, inv, "--out", "paths.out_dir", "Output directory");
  add_override_flag(sweep, inv, "--ratios", "sweep.ratios", "Comma-separated ratios");

  CLI::App* grad = add("gradcheck", "Finite-difference check of the encoder gradients", cmd_gradcheck);
  grad->add_option("--configs", inv.n_configs, "Number of random configurations");
  grad->add_option("--tolerance", inv.tolerance, "Maximum relative error");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    RunConfig cfg = assemble_config(inv);
    for (const auto& [sub, fn] : commands) {
      if (sub->parsed()) return fn(std::move(cfg), inv, out);
    }
    return kExitValidation;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace qrewrite::cli
