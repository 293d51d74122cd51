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

#ifndef QREWRITE_DATA_H_
#define QREWRITE_DATA_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qrewrite/core.h"

namespace qrewrite {

// ---------------------------------------------------------------------------
// Sessions and rephrase mining.

// Groups utterances per user, orders them by timestamp (stable for ties)
// and starts a new session whenever a gap exceeds kMaxSessionGapMs. Output
// is ordered by user id, then chronologically.
std::vector<Session> segment_sessions(std::vector<Utterance> utterances);

// True for the intents that mark an abandoned interaction.
bool is_abandon_intent(std::string_view intent);

// Keeps sessions with at least two turns whose final turn does not carry a
// CancelIntent or StopIntent hypothesis.
std::vector<Session> filter_sessions(std::vector<Session> sessions);

// |A ∩ B| / |A ∪ B| over the sets of normalized whitespace tokens.
double token_jaccard(std::string_view a, std::string_view b);

inline constexpr double kDefaultMiningThreshold = 0.4;

struct MinedPair {
  RewritePair pair;
  double score = 0.0;

  friend bool operator==(const MinedPair&, const MinedPair&) = default;
};

// Scores every consecutive turn pair with differing normalized text and
// keeps those at or above threshold, oriented earlier -> later. The result
// is sorted by (user, source time, source text, target text), so it does not
// depend on session order.
std::vector<MinedPair> mine_pairs(std::span<const Session> sessions, double threshold);

// ---------------------------------------------------------------------------
// File formats.

struct ReadOptions {
  // Strict readers throw ParseError on the first malformed line; lenient
  // ones skip it and record an issue.
  bool strict = true;
};

struct LineIssue {
  std::size_t line = 0;
  std::string message;
};

template <typename T>
struct Loaded {
  std::vector<T> records;
  std::vector<LineIssue> skipped;
};

// Text pair as stored in a pairs file.
struct TextPair {
  std::string source;
  std::string target;
  std::optional<double> score;

  friend bool operator==(const TextPair&, const TextPair&) = default;
};

// sessions.jsonl: one utterance per line,
// {"user", "ts_ms", "text", "nlu": {"domain", "intent", "slots": [{"type", "value"}]}}.
void write_utterances(const std::filesystem::path& path, std::span<const Utterance> utterances);
Loaded<Utterance> read_utterances(const std::filesystem::path& path, ReadOptions opts = {});

// pairs.tsv: source<TAB>target[<TAB>score], score with 9 significant digits.
void write_pairs(const std::filesystem::path& path, std::span<const TextPair> pairs);
Loaded<TextPair> read_pairs(const std::filesystem::path& path, ReadOptions opts = {});

// candidates.jsonl: {"text", "nlu", "frequency"}; nlu and frequency optional.
void write_candidates(const std::filesystem::path& path, std::span<const Candidate> candidates);
Loaded<Candidate> read_candidates(const std::filesystem::path& path, ReadOptions opts = {});

// eval_cases.jsonl: {"query": <utterance>, "gold": <utterance>}.
void write_eval_cases(const std::filesystem::path& path, std::span<const EvalCase> cases);
Loaded<EvalCase> read_eval_cases(const std::filesystem::path& path, ReadOptions opts = {});

std::vector<TextPair> to_text_pairs(std::span<const RewritePair> pairs);
std::vector<TextPair> to_text_pairs(std::span<const MinedPair> pairs);

// Pairs whose texts normalize to the same string are rejected with
// ValidationError.
std::vector<RewritePair> to_rewrite_pairs(std::span<const TextPair> pairs);

}  // namespace qrewrite

#endif  // QREWRITE_DATA_H_
