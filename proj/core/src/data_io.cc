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

#include <fstream>
#include <functional>

#include <fmt/format.h>

#include "json.hpp"
#include "qrewrite/data.h"
#include "qrewrite/errors.h"

namespace qrewrite {
namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

OrderedJson hypothesis_to_json(const NluHypothesis& h) {
  OrderedJson slots = OrderedJson::array();
  for (const Slot& s : h.slots) slots.push_back(OrderedJson{{"type", s.type}, {"value", s.value}});
  return OrderedJson{{"domain", h.domain}, {"intent", h.intent}, {"slots", std::move(slots)}};
}

OrderedJson utterance_to_json(const Utterance& u) {
  OrderedJson j{{"user", u.user_id}, {"ts_ms", u.ts_ms}, {"text", u.text}};
  if (u.nlu) j["nlu"] = hypothesis_to_json(*u.nlu);
  return j;
}

// Field accessors that turn shape problems into messages naming the field.
const Json& field(const Json& j, const char* name) {
  if (!j.is_object()) throw std::invalid_argument("record is not a JSON object");
  auto it = j.find(name);
  if (it == j.end()) throw std::invalid_argument(std::string("missing \"") + name + "\" field");
  return *it;
}

std::string string_field(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_string()) throw std::invalid_argument(std::string("\"") + name + "\" is not a string");
  return v.get<std::string>();
}

NluHypothesis hypothesis_from_json(const Json& j) {
  NluHypothesis h;
  h.domain = string_field(j, "domain");
  h.intent = string_field(j, "intent");
  if (auto it = j.find("slots"); it != j.end()) {
    if (!it->is_array()) throw std::invalid_argument("\"slots\" is not an array");
    for (const Json& s : *it) h.slots.push_back({string_field(s, "type"), string_field(s, "value")});
  }
  validate_hypothesis(h);
  return h;
}

Utterance utterance_from_json(const Json& j) {
  Utterance u;
  u.user_id = string_field(j, "user");
  const Json& ts = field(j, "ts_ms");
  if (!ts.is_number_integer()) throw std::invalid_argument("\"ts_ms\" is not an integer");
  u.ts_ms = ts.get<std::int64_t>();
  u.text = string_field(j, "text");
  if (auto it = j.find("nlu"); it != j.end() && !it->is_null()) u.nlu = hypothesis_from_json(*it);
  validate_utterance(u);
  return u;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

// Feeds each non-blank line to parse; malformed lines either throw a
// ParseError naming the line or are recorded and skipped.
template <typename T>
Loaded<T> read_lines(const std::filesystem::path& path, ReadOptions opts,
                     const std::function<T(const std::string&)>& parse) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  Loaded<T> loaded;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      loaded.records.push_back(parse(line));
    } catch (const std::exception& e) {
      if (opts.strict) throw ParseError(path.string(), line_no, e.what());
      loaded.skipped.push_back({line_no, e.what()});
    }
  }
  if (in.bad()) throw IoError("failed reading " + path.string());
  return loaded;
}

void check_tsv_field(const std::string& s) {
  if (s.find_first_of("\t\n\r") != std::string::npos) {
    throw ValidationError("pair text contains a tab or newline: '" + s + "'");
  }
}

}  // namespace

void write_utterances(const std::filesystem::path& path, std::span<const Utterance> utterances) {
  auto out = open_for_write(path);
  for (const Utterance& u : utterances) out << utterance_to_json(u).dump() << '\n';
  finish_write(out, path);
}

Loaded<Utterance> read_utterances(const std::filesystem::path& path, ReadOptions opts) {
  return read_lines<Utterance>(path, opts, [](const std::string& line) {
    return utterance_from_json(Json::parse(line));
  });
}

void write_pairs(const std::filesystem::path& path, std::span<const TextPair> pairs) {
  auto out = open_for_write(path);
  for (const TextPair& p : pairs) {
    check_tsv_field(p.source);
    check_tsv_field(p.target);
    out << p.source << '\t' << p.target;
    if (p.score) out << '\t' << fmt::format("{:.9g}", *p.score);
    out << '\n';
  }
  finish_write(out, path);
}

Loaded<TextPair> read_pairs(const std::filesystem::path& path, ReadOptions opts) {
  return read_lines<TextPair>(path, opts, [](const std::string& line) {
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (cols.size() < 2 || cols.size() > 3) {
      throw std::invalid_argument("expected 2 or 3 tab-separated columns, found " +
                                  std::to_string(cols.size()));
    }
    if (normalize_text(cols[0]).empty() || normalize_text(cols[1]).empty()) {
      throw std::invalid_argument("empty source or target text");
    }
    TextPair p{cols[0], cols[1], std::nullopt};
    if (cols.size() == 3) {
      std::size_t used = 0;
      p.score = std::stod(cols[2], &used);
      if (used != cols[2].size()) throw std::invalid_argument("bad score '" + cols[2] + "'");
    }
    return p;
  });
}

void write_candidates(const std::filesystem::path& path, std::span<const Candidate> candidates) {
  auto out = open_for_write(path);
  for (const Candidate& c : candidates) {
    OrderedJson j{{"text", c.text}};
    if (c.nlu) j["nlu"] = hypothesis_to_json(*c.nlu);
    j["frequency"] = c.frequency;
    out << j.dump() << '\n';
  }
  finish_write(out, path);
}

Loaded<Candidate> read_candidates(const std::filesystem::path& path, ReadOptions opts) {
  return read_lines<Candidate>(path, opts, [](const std::string& line) {
    const Json j = Json::parse(line);
    Candidate c;
    c.text = string_field(j, "text");
    if (normalize_text(c.text).empty()) throw std::invalid_argument("empty candidate text");
    if (auto it = j.find("nlu"); it != j.end() && !it->is_null()) c.nlu = hypothesis_from_json(*it);
    if (auto it = j.find("frequency"); it != j.end()) {
      if (!it->is_number_integer() || it->get<std::int64_t>() < 1) {
        throw std::invalid_argument("\"frequency\" must be a positive integer");
      }
      c.frequency = it->get<std::int64_t>();
    }
    return c;
  });
}

void write_eval_cases(const std::filesystem::path& path, std::span<const EvalCase> cases) {
  auto out = open_for_write(path);
  for (const EvalCase& c : cases) {
    OrderedJson j{{"query", utterance_to_json(c.query)}, {"gold", utterance_to_json(c.gold)}};
    out << j.dump() << '\n';
  }
  finish_write(out, path);
}

Loaded<EvalCase> read_eval_cases(const std::filesystem::path& path, ReadOptions opts) {
  return read_lines<EvalCase>(path, opts, [](const std::string& line) {
    const Json j = Json::parse(line);
    EvalCase c{utterance_from_json(field(j, "query")), utterance_from_json(field(j, "gold"))};
    c.validate();
    return c;
  });
}

std::vector<TextPair> to_text_pairs(std::span<const RewritePair> pairs) {
  std::vector<TextPair> out;
  out.reserve(pairs.size());
  for (const RewritePair& p : pairs) out.push_back({p.source.text, p.target.text, std::nullopt});
  return out;
}

std::vector<TextPair> to_text_pairs(std::span<const MinedPair> pairs) {
  std::vector<TextPair> out;
  out.reserve(pairs.size());
  for (const MinedPair& p : pairs) out.push_back({p.pair.source.text, p.pair.target.text, p.score});
  return out;
}

std::vector<RewritePair> to_rewrite_pairs(std::span<const TextPair> pairs) {
  std::vector<RewritePair> out;
  out.reserve(pairs.size());
  for (const TextPair& p : pairs) {
    out.push_back(RewritePair::create(Utterance{"", 0, p.source, std::nullopt},
                                      Utterance{"", 0, p.target, std::nullopt}));
  }
  return out;
}

}  // namespace qrewrite
