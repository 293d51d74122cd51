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

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "qrewrite/data.h"
#include "qrewrite/errors.h"

namespace qrewrite {
namespace {

std::set<std::string> token_set(std::string_view text) {
  std::set<std::string> out;
  const std::string norm = normalize_text(text);
  std::size_t start = 0;
  while (start < norm.size()) {
    std::size_t end = norm.find(' ', start);
    if (end == std::string::npos) end = norm.size();
    out.insert(norm.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

}  // namespace

std::vector<Session> segment_sessions(std::vector<Utterance> utterances) {
  std::map<std::string, std::vector<Utterance>> by_user;
  for (Utterance& u : utterances) by_user[u.user_id].push_back(std::move(u));

  std::vector<Session> sessions;
  for (auto& [user, turns] : by_user) {
    std::stable_sort(turns.begin(), turns.end(),
                     [](const Utterance& a, const Utterance& b) { return a.ts_ms < b.ts_ms; });
    std::vector<Utterance> current;
    for (Utterance& u : turns) {
      if (!current.empty() && u.ts_ms - current.back().ts_ms > kMaxSessionGapMs) {
        sessions.push_back(Session::create(std::move(current)));
        current.clear();
      }
      current.push_back(std::move(u));
    }
    if (!current.empty()) sessions.push_back(Session::create(std::move(current)));
  }
  return sessions;
}

bool is_abandon_intent(std::string_view intent) {
  const std::string norm = normalize_text(intent);
  return norm == "cancelintent" || norm == "stopintent";
}

std::vector<Session> filter_sessions(std::vector<Session> sessions) {
  std::vector<Session> kept;
  for (Session& s : sessions) {
    if (s.size() < 2) continue;
    const auto& last = s.back().nlu;
    if (last && is_abandon_intent(last->intent)) continue;
    kept.push_back(std::move(s));
  }
  return kept;
}

double token_jaccard(std::string_view a, std::string_view b) {
  const auto sa = token_set(a);
  const auto sb = token_set(b);
  if (sa.empty() && sb.empty()) return 1.0;
  std::size_t common = 0;
  for (const auto& t : sa) common += sb.count(t);
  const std::size_t uni = sa.size() + sb.size() - common;
  return static_cast<double>(common) / static_cast<double>(uni);
}

std::vector<MinedPair> mine_pairs(std::span<const Session> sessions, double threshold) {
  std::vector<MinedPair> out;
  for (const Session& s : sessions) {
    const auto& turns = s.turns();
    for (std::size_t t = 0; t + 1 < turns.size(); ++t) {
      if (normalize_text(turns[t].text) == normalize_text(turns[t + 1].text)) continue;
      const double score = token_jaccard(turns[t].text, turns[t + 1].text);
      if (score < threshold) continue;
      out.push_back(MinedPair{RewritePair::create(turns[t], turns[t + 1]), score});
    }
  }
  std::sort(out.begin(), out.end(), [](const MinedPair& a, const MinedPair& b) {
    return std::tie(a.pair.source.user_id, a.pair.source.ts_ms, a.pair.source.text,
                    a.pair.target.text) < std::tie(b.pair.source.user_id, b.pair.source.ts_ms,
                                                   b.pair.source.text, b.pair.target.text);
  });
  return out;
}

}  // namespace qrewrite
