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

#include "run_config.h"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <type_traits>
#include <utility>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "qrewrite/errors.h"

namespace qrewrite::cli {
namespace {

namespace pt = boost::property_tree;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view text, std::string_view want) {
  throw ValidationError(fmt::format("config key {}: expected {}, got '{}'", key, want, text));
}

template <typename T>
T parse_number(std::string_view key, std::string_view text, std::string_view want) {
  text = trim(text);
  T value{};
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
    bad_value(key, text, want);
  }
  return value;
}

template <typename T>
T parse_value(std::string_view key, std::string_view text);

template <>
int parse_value<int>(std::string_view key, std::string_view text) {
  return parse_number<int>(key, text, "an integer");
}
template <>
std::int64_t parse_value<std::int64_t>(std::string_view key, std::string_view text) {
  return parse_number<std::int64_t>(key, text, "an integer");
}
template <>
std::uint64_t parse_value<std::uint64_t>(std::string_view key, std::string_view text) {
  return parse_number<std::uint64_t>(key, text, "a non-negative integer");
}
template <>
double parse_value<double>(std::string_view key, std::string_view text) {
  return parse_number<double>(key, text, "a number");
}
template <>
bool parse_value<bool>(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  bad_value(key, text, "true or false");
}
template <>
std::string parse_value<std::string>(std::string_view, std::string_view text) {
  return std::string(trim(text));
}
template <>
std::vector<double> parse_value<std::vector<double>>(std::string_view key, std::string_view text) {
  std::vector<double> out;
  text = trim(text);
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    out.push_back(parse_value<double>(key, text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string format_value(bool v) { return v ? "true" : "false"; }
std::string format_value(const std::string& v) { return v; }
std::string format_value(const std::vector<double>& v) { return fmt::format("{}", fmt::join(v, ",")); }
template <typename T>
  requires std::is_arithmetic_v<T>
std::string format_value(T v) {
  return fmt::format("{}", v);
}

struct Entry {
  std::string key;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

// Access is a generic lambda returning a reference to the field, so one
// accessor serves both the const getter and the setter.
template <typename Access>
Entry entry(std::string key, Access access) {
  using T = std::remove_cvref_t<decltype(access(std::declval<RunConfig&>()))>;
  return Entry{key,
               [key, access](RunConfig& c, std::string_view v) { access(c) = parse_value<T>(key, v); },
               [access](const RunConfig& c) { return format_value(access(c)); }};
}

#define QR_ENTRY(key, field) entry(key, [](auto& c) -> auto& { return c.field; })

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      QR_ENTRY("generator.seed", generator.seed),
      QR_ENTRY("generator.n_users", generator.n_users),
      QR_ENTRY("generator.n_sessions", generator.n_sessions),
      QR_ENTRY("generator.n_eval_cases", generator.n_eval_cases),
      QR_ENTRY("generator.p_fail", generator.p_fail),
      QR_ENTRY("generator.p_abandon", generator.p_abandon),
      QR_ENTRY("generator.max_rephrases", generator.max_rephrases),
      QR_ENTRY("generator.max_turns", generator.max_turns),
      QR_ENTRY("generator.start_ts_ms", generator.start_ts_ms),
      QR_ENTRY("generator.char_confusion_prob", generator.noise.char_confusion_prob),
      QR_ENTRY("generator.word_drop_prob", generator.noise.word_drop_prob),
      QR_ENTRY("generator.word_swap_prob", generator.noise.word_swap_prob),
      QR_ENTRY("generator.misparse_prob", generator.noise.misparse_prob),
      QR_ENTRY("mining.threshold", mining_threshold),
      QR_ENTRY("vocab.min_count", vocab_min_count),
      QR_ENTRY("encoder.d_emb", encoder.d_emb),
      QR_ENTRY("encoder.d_hid", encoder.d_hid),
      QR_ENTRY("encoder.n_heads", encoder.n_heads),
      QR_ENTRY("encoder.d_head", encoder.d_head),
      QR_ENTRY("encoder.d_out", encoder.d_out),
      QR_ENTRY("encoder.max_len", encoder.max_len),
      QR_ENTRY("encoder.dropout_rate", encoder.dropout_rate),
      QR_ENTRY("encoder.seed", encoder.seed),
      QR_ENTRY("similarity.alpha", similarity.alpha),
      QR_ENTRY("similarity.epsilon", similarity.epsilon),
      QR_ENTRY("train.batch_size", train.batch_size),
      QR_ENTRY("train.max_epochs", train.max_epochs),
      QR_ENTRY("train.patience", train.patience),
      QR_ENTRY("train.learning_rate", train.learning_rate),
      QR_ENTRY("train.adam_beta1", train.adam_beta1),
      QR_ENTRY("train.adam_beta2", train.adam_beta2),
      QR_ENTRY("train.adam_eps", train.adam_eps),
      QR_ENTRY("train.seed", train.seed),
      QR_ENTRY("train.finetune_ratio", train.finetune_ratio),
      QR_ENTRY("train.val_fraction", train.val_fraction),
      QR_ENTRY("index.partition", build_partition),
      QR_ENTRY("index.n_list", partition.n_list),
      QR_ENTRY("index.kmeans_iters", partition.kmeans_iters),
      QR_ENTRY("index.seed", partition.seed),
      QR_ENTRY("eval.k", eval.k),
      QR_ENTRY("eval.n_probe", eval.n_probe),
      QR_ENTRY("sweep.ratios", sweep_ratios),
      QR_ENTRY("sweep.baseline_epochs", sweep_baseline_epochs),
      QR_ENTRY("sweep.finetune_epochs", sweep_finetune_epochs),
      QR_ENTRY("paths.data_dir", paths.data_dir),
      QR_ENTRY("paths.out_dir", paths.out_dir),
      QR_ENTRY("paths.checkpoint", paths.checkpoint),
      QR_ENTRY("paths.init_checkpoint", paths.init_checkpoint),
      QR_ENTRY("paths.index", paths.index),
      QR_ENTRY("paths.vocab", paths.vocab),
      QR_ENTRY("paths.pairs", paths.pairs),
      QR_ENTRY("paths.candidates", paths.candidates),
      QR_ENTRY("paths.cases", paths.cases),
  };
  return table;
}

#undef QR_ENTRY

const Entry& find_entry(std::string_view key) {
  const auto& table = entries();
  auto it = std::find_if(table.begin(), table.end(), [&](const Entry& e) { return e.key == key; });
  if (it == table.end()) throw ValidationError(fmt::format("unknown config key '{}'", key));
  return *it;
}

}  // namespace

std::vector<std::string> RunConfig::keys() {
  std::vector<std::string> out;
  for (const Entry& e : entries()) out.push_back(e.key);
  return out;
}

void RunConfig::set(std::string_view key, std::string_view value) { find_entry(key).set(*this, value); }

std::string RunConfig::get(std::string_view key) const { return find_entry(key).get(*this); }

void RunConfig::apply_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ValidationError(fmt::format("override '{}' is not of the form section.key=value", assignment));
  }
  set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

void RunConfig::load_file(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw IoError(fmt::format("config file not found: {}", path.string()));
  }
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(path.string(), e.line(), e.message());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw ValidationError(fmt::format("{}: key '{}' is outside any section", path.string(), section));
    }
    for (const auto& [name, value] : body) {
      try {
        set(section + "." + name, value.data());
      } catch (const ValidationError& e) {
        throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
      }
    }
  }
}

void RunConfig::apply_seed(std::uint64_t seed) {
  generator.seed = seed;
  encoder.seed = seed;
  train.seed = seed;
  partition.seed = seed;
}

void RunConfig::validate() const {
  generator.validate();
  EncoderConfig enc = encoder;
  if (enc.vocab_size == 0) enc.vocab_size = 2;  // the real size comes from the vocabulary
  enc.validate();
  similarity.validate();
  train.validate();
  if (!(mining_threshold >= 0.0 && mining_threshold <= 1.0)) {
    throw ValidationError("mining.threshold must lie in [0, 1]");
  }
  if (vocab_min_count < 1) throw ValidationError("vocab.min_count must be >= 1");
  if (partition.n_list < 0) throw ValidationError("index.n_list must be >= 0");
  if (partition.kmeans_iters < 1) throw ValidationError("index.kmeans_iters must be >= 1");
  if (eval.k < 1) throw ValidationError("eval.k must be >= 1");
  if (eval.n_probe < 0) throw ValidationError("eval.n_probe must be >= 0");
  if (sweep_ratios.empty()) throw ValidationError("sweep.ratios must not be empty");
  for (double r : sweep_ratios) {
    if (!(r > 0.0 && r <= 1.0)) throw ValidationError("sweep.ratios entries must lie in (0, 1]");
  }
  if (sweep_baseline_epochs < 1 || sweep_finetune_epochs < 1) {
    throw ValidationError("sweep epoch counts must be >= 1");
  }
}

std::string RunConfig::to_ini(std::string_view command) const {
  pt::ptree tree;
  for (const Entry& e : entries()) tree.put(pt::ptree::path_type(e.key, '.'), e.get(*this));
  std::ostringstream out;
  out << "; effective configuration of 'qrewrite " << command << "'\n";
  pt::write_ini(out, tree);
  return out.str();
}

std::optional<std::uint64_t> seed_from_environment() {
  const char* raw = std::getenv("QREWRITE_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  return parse_value<std::uint64_t>("QREWRITE_SEED", raw);
}

}  // namespace qrewrite::cli
