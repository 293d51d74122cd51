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

#ifndef QREWRITE_CORE_H_
#define QREWRITE_CORE_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qrewrite {

// Largest allowed gap between consecutive turns of one session.
inline constexpr std::int64_t kMaxSessionGapMs = 45'000;

struct Slot {
  std::string type;
  std::string value;

  friend auto operator<=>(const Slot&, const Slot&) = default;
};

// Structured interpretation of a query: domain, intent and slots.
struct NluHypothesis {
  std::string domain;
  std::string intent;
  std::vector<Slot> slots;

  friend bool operator==(const NluHypothesis&, const NluHypothesis&) = default;
};

struct Utterance {
  std::string user_id;
  std::int64_t ts_ms = 0;
  std::string text;
  std::optional<NluHypothesis> nlu;

  friend bool operator==(const Utterance&, const Utterance&) = default;
};

// Lowercases ASCII, collapses whitespace runs to one space and strips both
// ends. All-whitespace input yields "".
std::string normalize_text(std::string_view raw);

// Throws ValidationError when domain, intent or any slot type is empty.
void validate_hypothesis(const NluHypothesis& h);

// Normalizes every field and sorts slots by (type, value). Idempotent.
NluHypothesis canonical_hypothesis(const NluHypothesis& h);

// Unambiguous string form of the canonical hypothesis. Two hypotheses are
// considered equal iff their keys are equal.
std::string hypothesis_key(const NluHypothesis& h);

bool hypotheses_match(const NluHypothesis& a, const NluHypothesis& b);

// Throws ValidationError for a negative timestamp, blank text or an invalid
// hypothesis.
void validate_utterance(const Utterance& u);

// One user's turns, time ordered, with no gap above kMaxSessionGapMs.
class Session {
 public:
  // Validates every invariant; throws ValidationError on violation.
  static Session create(std::vector<Utterance> turns);

  const std::string& user_id() const { return turns_.front().user_id; }
  const std::vector<Utterance>& turns() const { return turns_; }
  std::size_t size() const { return turns_.size(); }
  const Utterance& front() const { return turns_.front(); }
  const Utterance& back() const { return turns_.back(); }

  // True when every turn carries an NLU hypothesis.
  bool fully_annotated() const;

  friend bool operator==(const Session&, const Session&) = default;

 private:
  explicit Session(std::vector<Utterance> turns) : turns_(std::move(turns)) {}
  std::vector<Utterance> turns_;
};

// A defective query and its reformulation.
struct RewritePair {
  Utterance source;
  Utterance target;

  // Throws ValidationError when the normalized texts coincide.
  static RewritePair create(Utterance source, Utterance target);

  friend bool operator==(const RewritePair&, const RewritePair&) = default;
};

// An indexable rewrite candidate as it appears in candidate files.
struct Candidate {
  std::string text;
  std::optional<NluHypothesis> nlu;
  std::int64_t frequency = 1;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

// A defective query and the reformulation whose hypothesis counts as
// correct.
struct EvalCase {
  Utterance query;
  Utterance gold;

  // Throws ValidationError when the gold turn has no hypothesis.
  void validate() const;

  friend bool operator==(const EvalCase&, const EvalCase&) = default;
};

}  // namespace qrewrite

#endif  // QREWRITE_CORE_H_
