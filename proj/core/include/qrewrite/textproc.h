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

#ifndef QREWRITE_TEXTPROC_H_
#define QREWRITE_TEXTPROC_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qrewrite/core.h"

namespace qrewrite {

using TokenId = std::int32_t;

inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kUnkId = 1;
inline constexpr int kDefaultMaxLen = 25;

// Word-level vocabulary. Ids 0 and 1 are reserved for padding and unknown
// tokens; the rest are assigned by descending count, then ascending token.
class Vocabulary {
 public:
  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kUnkToken = "<unk>";

  // Counts whitespace tokens of the normalized corpus lines. Throws
  // ValidationError for an empty corpus or min_count < 1.
  static Vocabulary build(std::span<const std::string> corpus,
                          int min_count = 1);

  // "qrv1 <size>" header, then one "token<TAB>id" line per entry.
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

  TokenId id(std::string_view token) const;
  const std::string& token(TokenId id) const;
  bool contains(std::string_view token) const;
  std::size_t size() const { return id_to_token_.size(); }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.id_to_token_ == b.id_to_token_;
  }

 private:
  Vocabulary();
  void add(std::string token);

  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, TokenId> token_to_id_;
};

// Token ids padded to a fixed width. Positions at or beyond length hold
// kPadId.
struct TokenSequence {
  std::vector<TokenId> ids;
  int length = 0;

  int max_len() const { return static_cast<int>(ids.size()); }
  std::span<const TokenId> tokens() const {
    return std::span<const TokenId>(ids).first(length);
  }

  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

// Splits the normalized text on spaces, maps out-of-vocabulary words to
// kUnkId, keeps the first max_len tokens and pads the rest. Throws
// ValidationError for blank text or max_len < 1.
TokenSequence tokenize(std::string_view text, const Vocabulary& vocab,
                       int max_len = kDefaultMaxLen);

// Flattens a hypothesis into words: domain, intent, then each slot's type
// followed by its value, in canonical slot order.
std::string serialize_hypothesis(const NluHypothesis& h);

}  // namespace qrewrite

#endif  // QREWRITE_TEXTPROC_H_
