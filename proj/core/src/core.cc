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

#include "qrewrite/core.h"

#include <algorithm>
#include <cctype>
#include <utility>

#include "qrewrite/errors.h"

namespace qrewrite {

std::string normalize_text(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char c : raw) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isspace(uc)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(uc)));
  }
  return out;
}

void validate_hypothesis(const NluHypothesis& h) {
  if (normalize_text(h.domain).empty()) {
    throw ValidationError("NLU hypothesis has an empty domain");
  }
  if (normalize_text(h.intent).empty()) {
    throw ValidationError("NLU hypothesis has an empty intent");
  }
  for (const Slot& slot : h.slots) {
    if (normalize_text(slot.type).empty()) {
      throw ValidationError("NLU hypothesis has a slot with an empty type");
    }
  }
}

NluHypothesis canonical_hypothesis(const NluHypothesis& h) {
  validate_hypothesis(h);
  NluHypothesis out;
  out.domain = normalize_text(h.domain);
  out.intent = normalize_text(h.intent);
  out.slots.reserve(h.slots.size());
  for (const Slot& slot : h.slots) {
    out.slots.push_back({normalize_text(slot.type), normalize_text(slot.value)});
  }
  std::sort(out.slots.begin(), out.slots.end());
  return out;
}

namespace {

void append_field(std::string& key, const std::string& field) {
  key += std::to_string(field.size());
  key += ':';
  key += field;
}

}  // namespace

std::string hypothesis_key(const NluHypothesis& h) {
  // Length-prefixed fields, so no choice of slot text can collide.
  const NluHypothesis c = canonical_hypothesis(h);
  std::string key;
  append_field(key, c.domain);
  append_field(key, c.intent);
  for (const Slot& slot : c.slots) {
    append_field(key, slot.type);
    append_field(key, slot.value);
  }
  return key;
}

bool hypotheses_match(const NluHypothesis& a, const NluHypothesis& b) {
  return hypothesis_key(a) == hypothesis_key(b);
}

void validate_utterance(const Utterance& u) {
  if (u.ts_ms < 0) {
    throw ValidationError("utterance has a negative timestamp");
  }
  if (normalize_text(u.text).empty()) {
    throw ValidationError("utterance text is empty after normalization");
  }
  if (u.nlu) validate_hypothesis(*u.nlu);
}

Session Session::create(std::vector<Utterance> turns) {
  if (turns.empty()) {
    throw ValidationError("a session needs at least one turn");
  }
  for (std::size_t i = 0; i < turns.size(); ++i) {
    validate_utterance(turns[i]);
    if (i == 0) continue;
    if (turns[i].user_id != turns[0].user_id) {
      throw ValidationError("session mixes user ids '" + turns[0].user_id +
                            "' and '" + turns[i].user_id + "'");
    }
    const std::int64_t gap = turns[i].ts_ms - turns[i - 1].ts_ms;
    if (gap < 0) {
      throw ValidationError("session turns are not sorted by timestamp");
    }
    if (gap > kMaxSessionGapMs) {
      throw ValidationError("session gap of " + std::to_string(gap) +
                            " ms exceeds the 45 s limit");
    }
  }
  return Session(std::move(turns));
}

bool Session::fully_annotated() const {
  return std::all_of(turns_.begin(), turns_.end(),
                     [](const Utterance& u) { return u.nlu.has_value(); });
}

RewritePair RewritePair::create(Utterance source, Utterance target) {
  validate_utterance(source);
  validate_utterance(target);
  if (normalize_text(source.text) == normalize_text(target.text)) {
    throw ValidationError("rewrite pair source and target are identical: '" +
                          normalize_text(source.text) + "'");
  }
  return RewritePair{std::move(source), std::move(target)};
}

void EvalCase::validate() const {
  validate_utterance(query);
  validate_utterance(gold);
  if (!gold.nlu) throw ValidationError("evaluation case gold turn has no NLU hypothesis");
}

}  // namespace qrewrite
