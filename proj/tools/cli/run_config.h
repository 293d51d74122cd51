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

#ifndef QREWRITE_TOOLS_CLI_RUN_CONFIG_H_
#define QREWRITE_TOOLS_CLI_RUN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qrewrite/data.h"
#include "qrewrite/encoder.h"
#include "qrewrite/eval.h"
#include "qrewrite/generator.h"
#include "qrewrite/index.h"
#include "qrewrite/objective.h"
#include "qrewrite/trainer.h"

namespace qrewrite::cli {

// File locations. An empty string means "not given"; commands fill in
// defaults relative to data_dir or the checkpoint before any work starts.
struct PathConfig {
  std::string data_dir;
  std::string out_dir;
  std::string checkpoint;
  std::string init_checkpoint;
  std::string index;
  std::string vocab;
  std::string pairs;
  std::string candidates;
  std::string cases;
};

// Every tunable of every command, addressable as "section.key". Values come
// from built-in defaults, then an INI file, then overrides, then
// QREWRITE_SEED.
struct RunConfig {
  GeneratorConfig generator = GeneratorConfig::desk_default();
  double mining_threshold = kDefaultMiningThreshold;
  int vocab_min_count = 1;
  EncoderConfig encoder;
  SimilarityConfig similarity;
  TrainConfig train;
  bool build_partition = true;
  PartitionParams partition;
  EvalOptions eval;
  std::vector<double> sweep_ratios = {0.2, 0.4, 0.6, 0.8, 1.0};
  int sweep_baseline_epochs = 20;
  int sweep_finetune_epochs = 2;
  PathConfig paths;

  // All keys in file order.
  static std::vector<std::string> keys();

  // Throws ValidationError for an unknown key or an unparsable value.
  void set(std::string_view key, std::string_view value);
  std::string get(std::string_view key) const;

  // "section.key=value".
  void apply_override(std::string_view assignment);

  // Reads an INI file. Unknown sections or keys are fatal.
  void load_file(const std::filesystem::path& path);

  // Replaces the generator, encoder, training and partition seeds.
  void apply_seed(std::uint64_t seed);

  // Throws ValidationError when any component config is invalid.
  void validate() const;

  // The effective configuration as an INI document.
  std::string to_ini(std::string_view command) const;
};

// Parses QREWRITE_SEED when set; throws ValidationError when malformed.
std::optional<std::uint64_t> seed_from_environment();

}  // namespace qrewrite::cli

#endif  // QREWRITE_TOOLS_CLI_RUN_CONFIG_H_
