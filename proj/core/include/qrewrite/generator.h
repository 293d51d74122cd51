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

#ifndef QREWRITE_GENERATOR_H_
#define QREWRITE_GENERATOR_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qrewrite/core.h"

namespace qrewrite {

struct Song {
  std::string title;
  std::string artist;
};

// Entities that fill template slots.
struct Catalog {
  std::vector<Song> songs;
  std::vector<std::string> artists;
  std::vector<std::string> stations;
  std::vector<std::string> cities;
  std::vector<std::string> devices;
  std::vector<std::string> durations;
  std::vector<std::string> items;

  bool empty() const;
};

// A carrier phrase with {slottype} placeholders, e.g.
// "play {songname} by {artistname}". Placeholders name catalog entity kinds:
// songname, artistname, stationname, cityname, devicename, duration, itemname.
struct QueryTemplate {
  std::string domain;
  std::string intent;
  std::string pattern;
};

// Emulated recognition errors.
struct NoiseModel {
  // Substring confusions applied inside slot words ("ee" -> "ea").
  std::vector<std::pair<std::string, std::string>> confusions;
  double char_confusion_prob = 0.6;  // per slot word
  double word_drop_prob = 0.15;      // per query
  double word_swap_prob = 0.15;      // per query
  double misparse_prob = 0.3;        // NLU falls back to a generic intent
};

struct GeneratorConfig {
  std::uint64_t seed = 7;
  int n_users = 300;
  int n_sessions = 5000;
  int n_eval_cases = 600;
  double p_fail = 0.4;      // session opens with a defective query, then recovers
  double p_abandon = 0.05;  // session opens defective and ends in Stop/Cancel
  int max_rephrases = 3;
  int max_turns = 5;
  std::int64_t start_ts_ms = 1'600'000'000'000;
  Catalog catalog;
  std::vector<QueryTemplate> templates;
  NoiseModel noise;

  // Built-in catalog, templates and noise table (~2.2k clean queries).
  static GeneratorConfig desk_default();

  // Throws ValidationError for probabilities outside [0, 1], an empty
  // catalog or template set, or non-positive counts.
  void validate() const;
};

struct GeneratedCorpus {
  std::vector<Utterance> utterances;    // the session log, ordered by time
  std::vector<RewritePair> gold_pairs;  // defective opening -> clean query
  std::vector<Candidate> candidates;    // every clean query the templates produce
  std::vector<EvalCase> eval_cases;     // from sessions after the log period
  int n_sessions = 0;
  int n_failing_sessions = 0;
  int n_abandoned_sessions = 0;
};

// Seeded and deterministic: the same config yields the same corpus.
GeneratedCorpus generate_corpus(const GeneratorConfig& cfg);

// All distinct clean queries with their hypotheses, in template order.
std::vector<Candidate> enumerate_clean_queries(const GeneratorConfig& cfg);

// Deterministic misrecognition of one word; variant selects among the
// applicable confusions. Always returns a different string.
std::string confuse_word(const std::string& word,
                         const std::vector<std::pair<std::string, std::string>>& confusions,
                         unsigned variant);

}  // namespace qrewrite

#endif  // QREWRITE_GENERATOR_H_
