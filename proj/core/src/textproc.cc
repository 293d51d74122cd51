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

#include "qrewrite/textproc.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "qrewrite/errors.h"

namespace qrewrite {
namespace {

std::vector<std::string> split_words(std::string_view normalized) {
  std::vector<std::string> words;
  std::size_t start = 0;
  while (start < normalized.size()) {
    std::size_t end = normalized.find(' ', start);
    if (end == std::string_view::npos) end = normalized.size();
    words.emplace_back(normalized.substr(start, end - start));
    start = end + 1;
  }
  return words;
}

constexpr std::string_view kVocabMagic = "qrv1";

}  // namespace

Vocabulary::Vocabulary() {
  add(std::string(kPadToken));
  add(std::string(kUnkToken));
}

void Vocabulary::add(std::string token) {
  const auto id = static_cast<TokenId>(id_to_token_.size());
  token_to_id_.emplace(token, id);
  id_to_token_.push_back(std::move(token));
}

Vocabulary Vocabulary::build(std::span<const std::string> corpus,
                             int min_count) {
  if (corpus.empty()) throw ValidationError("cannot build a vocabulary from an empty corpus");
  if (min_count < 1) throw ValidationError("min_count must be at least 1");

  std::map<std::string, long> counts;
  for (const std::string& line : corpus) {
    for (std::string& w : split_words(normalize_text(line))) ++counts[std::move(w)];
  }
  std::vector<std::pair<std::string, long>> ranked;
  for (auto& [token, count] : counts) {
    if (count < min_count) continue;
    if (token == kPadToken || token == kUnkToken) continue;
    ranked.emplace_back(token, count);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  Vocabulary vocab;
  for (auto& [token, count] : ranked) vocab.add(std::move(token));
  return vocab;
}

TokenId Vocabulary::id(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  return it == token_to_id_.end() ? kUnkId : it->second;
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= id_to_token_.size()) {
    throw ValidationError("token id " + std::to_string(id) + " out of range");
  }
  return id_to_token_[static_cast<std::size_t>(id)];
}

bool Vocabulary::contains(std::string_view token) const {
  return token_to_id_.count(std::string(token)) > 0;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << kVocabMagic << ' ' << id_to_token_.size() << '\n';
  for (std::size_t i = 0; i < id_to_token_.size(); ++i) {
    out << id_to_token_[i] << '\t' << i << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open vocabulary file " + path.string());
  const std::string source = path.string();

  std::string line;
  if (!std::getline(in, line)) throw ParseError(source, 1, "missing header");
  std::istringstream header(line);
  std::string magic;
  std::size_t size = 0;
  if (!(header >> magic >> size) || magic != kVocabMagic) {
    throw ParseError(source, 1, "expected header 'qrv1 <size>'");
  }

  Vocabulary vocab;
  vocab.id_to_token_.clear();
  vocab.token_to_id_.clear();
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(source, line_no, "expected token<TAB>id");
    std::string token = line.substr(0, tab);
    std::size_t id = 0;
    try {
      id = std::stoul(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw ParseError(source, line_no, "bad id");
    }
    if (id != vocab.id_to_token_.size()) {
      throw ParseError(source, line_no, "ids must be dense and ascending");
    }
    if (vocab.token_to_id_.count(token)) {
      throw ParseError(source, line_no, "duplicate token '" + token + "'");
    }
    vocab.add(std::move(token));
  }
  if (vocab.size() != size) {
    throw ParseError(source, line_no, "header declares " + std::to_string(size) +
                                          " entries, found " + std::to_string(vocab.size()));
  }
  if (size < 2 || vocab.id_to_token_[kPadId] != kPadToken ||
      vocab.id_to_token_[kUnkId] != kUnkToken) {
    throw ParseError(source, 2, "reserved tokens missing");
  }
  return vocab;
}

TokenSequence tokenize(std::string_view text, const Vocabulary& vocab, int max_len) {
  if (max_len < 1) throw ValidationError("max_len must be at least 1");
  const std::string normalized = normalize_text(text);
  if (normalized.empty()) throw ValidationError("cannot tokenize empty text");

  TokenSequence seq;
  seq.ids.assign(static_cast<std::size_t>(max_len), kPadId);
  for (const std::string& w : split_words(normalized)) {
    if (seq.length == max_len) break;
    seq.ids[static_cast<std::size_t>(seq.length++)] = vocab.id(w);
  }
  return seq;
}

std::string serialize_hypothesis(const NluHypothesis& h) {
  const NluHypothesis c = canonical_hypothesis(h);
  std::string out = c.domain + ' ' + c.intent;
  for (const Slot& slot : c.slots) {
    out += ' ';
    out += slot.type;
    if (!slot.value.empty()) {
      out += ' ';
      out += slot.value;
    }
  }
  return out;
}

}  // namespace qrewrite
