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

#include "qrewrite/generator.h"

#include <algorithm>
#include <array>
#include <map>
#include <random>
#include <set>
#include <unordered_map>

#include "qrewrite/errors.h"

namespace qrewrite {
namespace {

using Rng = std::mt19937_64;

enum class Kind { kSong, kArtist, kStation, kCity, kDevice, kDuration, kItem, kNone };

struct Token {
  std::string word;
  std::string slot;  // empty for carrier words
};

struct TaggedQuery {
  std::vector<Token> tokens;
  std::string domain;
  std::string intent;
};

const std::map<std::string, std::string>& slot_type_names() {
  static const std::map<std::string, std::string> names = {
      {"songname", "SongName"},     {"artistname", "ArtistName"}, {"stationname", "StationName"},
      {"cityname", "CityName"},     {"devicename", "DeviceName"}, {"duration", "Duration"},
      {"itemname", "ItemName"},
  };
  return names;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < s.size()) {
    std::size_t end = s.find(' ', start);
    if (end == std::string::npos) end = s.size();
    if (end > start) out.push_back(s.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

struct ParsedTemplate {
  QueryTemplate source;
  std::vector<std::string> parts;  // words or "{slot}"
  Kind kind = Kind::kNone;
};

bool is_placeholder(const std::string& part) {
  return part.size() > 2 && part.front() == '{' && part.back() == '}';
}

ParsedTemplate parse_template(const QueryTemplate& t) {
  ParsedTemplate p{t, split(t.pattern), Kind::kNone};
  std::set<std::string> slots;
  for (const auto& part : p.parts) {
    if (!is_placeholder(part)) continue;
    const std::string name = part.substr(1, part.size() - 2);
    if (!slot_type_names().count(name)) {
      throw ValidationError("template '" + t.pattern + "' uses unknown slot {" + name + "}");
    }
    slots.insert(name);
  }
  if (slots.count("songname")) p.kind = Kind::kSong;
  else if (slots.count("artistname")) p.kind = Kind::kArtist;
  else if (slots.count("stationname")) p.kind = Kind::kStation;
  else if (slots.count("cityname")) p.kind = Kind::kCity;
  else if (slots.count("devicename")) p.kind = Kind::kDevice;
  else if (slots.count("duration")) p.kind = Kind::kDuration;
  else if (slots.count("itemname")) p.kind = Kind::kItem;
  return p;
}

std::size_t kind_size(const Catalog& c, Kind k) {
  switch (k) {
    case Kind::kSong: return c.songs.size();
    case Kind::kArtist: return c.artists.size();
    case Kind::kStation: return c.stations.size();
    case Kind::kCity: return c.cities.size();
    case Kind::kDevice: return c.devices.size();
    case Kind::kDuration: return c.durations.size();
    case Kind::kItem: return c.items.size();
    case Kind::kNone: return 1;
  }
  return 0;
}

std::string slot_value(const Catalog& c, Kind kind, std::size_t entity, const std::string& slot) {
  if (slot == "songname") return c.songs.at(entity).title;
  if (slot == "artistname") {
    return kind == Kind::kSong ? c.songs.at(entity).artist : c.artists.at(entity);
  }
  if (slot == "stationname") return c.stations.at(entity);
  if (slot == "cityname") return c.cities.at(entity);
  if (slot == "devicename") return c.devices.at(entity);
  if (slot == "duration") return c.durations.at(entity);
  return c.items.at(entity);
}

TaggedQuery instantiate(const Catalog& c, const ParsedTemplate& t, std::size_t entity) {
  TaggedQuery q{{}, t.source.domain, t.source.intent};
  for (const auto& part : t.parts) {
    if (!is_placeholder(part)) {
      q.tokens.push_back({part, ""});
      continue;
    }
    const std::string name = part.substr(1, part.size() - 2);
    for (auto& w : split(normalize_text(slot_value(c, t.kind, entity, name)))) {
      q.tokens.push_back({std::move(w), slot_type_names().at(name)});
    }
  }
  return q;
}

std::string query_text(const TaggedQuery& q) {
  std::string out;
  for (const auto& t : q.tokens) {
    if (!out.empty()) out += ' ';
    out += t.word;
  }
  return out;
}

NluHypothesis query_hypothesis(const TaggedQuery& q) {
  NluHypothesis h{q.domain, q.intent, {}};
  for (std::size_t i = 0; i < q.tokens.size(); ++i) {
    const auto& tok = q.tokens[i];
    if (tok.slot.empty()) continue;
    if (i > 0 && q.tokens[i - 1].slot == tok.slot) {
      h.slots.back().value += ' ' + tok.word;
    } else {
      h.slots.push_back({tok.slot, tok.word});
    }
  }
  return h;
}

std::uint64_t mix(std::uint64_t h) {
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  h *= 0xc4ceb9fe1a85ec53ULL;
  h ^= h >> 33;
  return h;
}

std::uint64_t hash_string(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

std::size_t pick(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// Popularity-skewed index: low indices are drawn more often.
std::size_t pick_skewed(Rng& rng, std::size_t n) {
  const double u = uniform01(rng);
  return std::min(n - 1, static_cast<std::size_t>(static_cast<double>(n) * u * u));
}

struct UserProfile {
  std::string id;
  std::vector<std::size_t> fav_artists;
  std::size_t fav_station = 0;
  std::size_t home_city = 0;
  std::int64_t clock_ms = 0;
};

class Generator {
 public:
  explicit Generator(const GeneratorConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
    for (const auto& t : cfg.templates) {
      ParsedTemplate p = parse_template(t);
      if (kind_size(cfg.catalog, p.kind) == 0) continue;
      by_kind_[p.kind].push_back(templates_.size());
      templates_.push_back(std::move(p));
    }
    for (std::size_t s = 0; s < cfg.catalog.songs.size(); ++s) {
      songs_by_artist_[cfg.catalog.songs[s].artist].push_back(s);
    }
    kinds_.clear();
    weights_.clear();
    const std::array<std::pair<Kind, double>, 7> mix = {{{Kind::kSong, 0.45},
                                                         {Kind::kArtist, 0.12},
                                                         {Kind::kStation, 0.10},
                                                         {Kind::kCity, 0.10},
                                                         {Kind::kDevice, 0.10},
                                                         {Kind::kDuration, 0.06},
                                                         {Kind::kItem, 0.07}}};
    for (auto [k, w] : mix) {
      if (by_kind_.count(k)) {
        kinds_.push_back(k);
        weights_.push_back(w);
      }
    }
    if (kinds_.empty()) throw ValidationError("no template can be filled from the catalog");
  }

  GeneratedCorpus run() {
    GeneratedCorpus corpus;
    make_users();
    std::unordered_map<std::string, std::int64_t> clean_counts;

    for (int s = 0; s < cfg_.n_sessions; ++s) {
      UserProfile& user = users_[pick(rng_, users_.size())];
      SessionDraft d = draft_session(user);
      ++corpus.n_sessions;
      if (d.failing) ++corpus.n_failing_sessions;
      if (d.abandoned) ++corpus.n_abandoned_sessions;
      if (d.gold) corpus.gold_pairs.push_back(*d.gold);
      for (std::size_t t = 0; t < d.turns.size(); ++t) {
        if (!d.defective[t]) ++clean_counts[d.turns[t].text];
        corpus.utterances.push_back(std::move(d.turns[t]));
      }
    }

    // Evaluation cases come from failing sessions after the log period.
    while (static_cast<int>(corpus.eval_cases.size()) < cfg_.n_eval_cases) {
      UserProfile& user = users_[pick(rng_, users_.size())];
      advance_clock(user);
      const TaggedQuery clean = sample_clean(user, nullptr);
      Utterance source = make_turn(user, noisy(clean));
      user.clock_ms += 2'000 + static_cast<std::int64_t>(pick(rng_, 10'000));
      Utterance gold = make_turn(user, clean);
      corpus.eval_cases.push_back(EvalCase{std::move(source), std::move(gold)});
    }

    std::stable_sort(corpus.utterances.begin(), corpus.utterances.end(),
                     [](const Utterance& a, const Utterance& b) {
                       return std::tie(a.ts_ms, a.user_id) < std::tie(b.ts_ms, b.user_id);
                     });

    corpus.candidates = enumerate();
    for (auto& c : corpus.candidates) {
      auto it = clean_counts.find(c.text);
      c.frequency = 1 + (it == clean_counts.end() ? 0 : it->second);
    }
    return corpus;
  }

  std::vector<Candidate> enumerate() const {
    std::vector<Candidate> out;
    std::set<std::string> seen;
    for (const auto& t : templates_) {
      if (t.kind == Kind::kNone) continue;
      for (std::size_t e = 0; e < kind_size(cfg_.catalog, t.kind); ++e) {
        const TaggedQuery q = instantiate(cfg_.catalog, t, e);
        std::string text = query_text(q);
        if (!seen.insert(text).second) continue;
        out.push_back(Candidate{std::move(text), query_hypothesis(q), 1});
      }
    }
    return out;
  }

 private:
  struct SessionDraft {
    std::vector<Utterance> turns;
    std::vector<bool> defective;
    std::optional<RewritePair> gold;
    bool failing = false;
    bool abandoned = false;
  };

  void make_users() {
    const Catalog& c = cfg_.catalog;
    for (int u = 0; u < cfg_.n_users; ++u) {
      UserProfile p;
      p.id = "user" + std::to_string(u);
      const std::size_t n_art = c.artists.empty() ? 0 : 1 + pick(rng_, 3);
      for (std::size_t k = 0; k < n_art; ++k) p.fav_artists.push_back(pick_skewed(rng_, c.artists.size()));
      p.fav_station = c.stations.empty() ? 0 : pick_skewed(rng_, c.stations.size());
      p.home_city = c.cities.empty() ? 0 : pick(rng_, c.cities.size());
      p.clock_ms = cfg_.start_ts_ms + static_cast<std::int64_t>(pick(rng_, 3'600'000));
      users_.push_back(std::move(p));
    }
  }

  void advance_clock(UserProfile& u) {
    // Session starts are separated by ten minutes to two days.
    u.clock_ms += 600'000 + static_cast<std::int64_t>(pick(rng_, 172'800'000));
  }

  Kind sample_kind() {
    std::discrete_distribution<std::size_t> d(weights_.begin(), weights_.end());
    return kinds_[d(rng_)];
  }

  std::size_t sample_entity(const UserProfile& u, Kind k, const TaggedQuery* prev) {
    const Catalog& c = cfg_.catalog;
    const std::size_t n = kind_size(c, k);
    const bool personal = uniform01(rng_) < 0.6;
    switch (k) {
      case Kind::kSong: {
        std::string artist;
        if (prev != nullptr) {
          for (const auto& t : prev->tokens) {
            if (t.slot == "ArtistName") artist += (artist.empty() ? "" : " ") + t.word;
          }
        }
        if (artist.empty() && personal && !u.fav_artists.empty()) {
          artist = normalize_text(c.artists[u.fav_artists[pick(rng_, u.fav_artists.size())]]);
        }
        if (auto it = songs_by_normalized_artist().find(artist);
            !artist.empty() && it != songs_by_normalized_artist().end()) {
          return it->second[pick(rng_, it->second.size())];
        }
        return pick_skewed(rng_, n);
      }
      case Kind::kArtist:
        if (personal && !u.fav_artists.empty()) return u.fav_artists[pick(rng_, u.fav_artists.size())];
        return pick_skewed(rng_, n);
      case Kind::kStation:
        return personal ? u.fav_station % n : pick_skewed(rng_, n);
      case Kind::kCity:
        return uniform01(rng_) < 0.7 ? u.home_city % n : pick(rng_, n);
      default:
        return pick_skewed(rng_, n);
    }
  }

  const std::unordered_map<std::string, std::vector<std::size_t>>& songs_by_normalized_artist() {
    if (songs_by_norm_artist_.empty()) {
      for (const auto& [artist, songs] : songs_by_artist_) {
        songs_by_norm_artist_[normalize_text(artist)] = songs;
      }
    }
    return songs_by_norm_artist_;
  }

  // A clean query; follow-ups lean toward the previous query's artist.
  TaggedQuery sample_clean(const UserProfile& u, const TaggedQuery* prev) {
    Kind k = sample_kind();
    bool related = false;
    if (prev != nullptr && uniform01(rng_) < 0.5) {
      for (const auto& t : prev->tokens) related |= t.slot == "ArtistName";
      if (related) k = Kind::kSong;
    }
    const auto& options = by_kind_.at(k);
    const ParsedTemplate& t = templates_[options[pick(rng_, options.size())]];
    return instantiate(cfg_.catalog, t, sample_entity(u, k, related ? prev : nullptr));
  }

  TaggedQuery noisy(const TaggedQuery& clean) {
    const NoiseModel& nm = cfg_.noise;
    TaggedQuery q = clean;
    for (auto& t : q.tokens) {
      if (!t.slot.empty() && uniform01(rng_) < nm.char_confusion_prob) {
        t.word = confuse_word(t.word, nm.confusions, static_cast<unsigned>(pick(rng_, 2)));
      }
    }
    if (q.tokens.size() > 2 && uniform01(rng_) < nm.word_drop_prob) {
      q.tokens.erase(q.tokens.begin() + static_cast<std::ptrdiff_t>(pick(rng_, q.tokens.size())));
    }
    if (q.tokens.size() > 1 && uniform01(rng_) < nm.word_swap_prob) {
      const std::size_t i = pick(rng_, q.tokens.size() - 1);
      std::swap(q.tokens[i], q.tokens[i + 1]);
    }
    if (query_text(q) == query_text(clean)) {
      std::vector<std::size_t> slot_positions;
      for (std::size_t i = 0; i < q.tokens.size(); ++i) {
        if (!q.tokens[i].slot.empty()) slot_positions.push_back(i);
      }
      const std::size_t i = slot_positions.empty() ? pick(rng_, q.tokens.size())
                                                   : slot_positions[pick(rng_, slot_positions.size())];
      q.tokens[i].word =
          confuse_word(q.tokens[i].word, nm.confusions, static_cast<unsigned>(pick(rng_, 2)));
    }
    if (uniform01(rng_) < nm.misparse_prob) {
      q.domain = "General";
      q.intent = "FallbackIntent";
      for (auto& t : q.tokens) t.slot.clear();
    }
    return q;
  }

  Utterance make_turn(const UserProfile& u, const TaggedQuery& q) {
    return Utterance{u.id, u.clock_ms, query_text(q), query_hypothesis(q)};
  }

  void add_turn(SessionDraft& d, UserProfile& u, const TaggedQuery& q, bool defective,
                bool quick) {
    if (!d.turns.empty()) {
      // Rephrases follow quickly; ordinary follow-ups take longer, but every
      // gap stays under the 45 s session limit.
      u.clock_ms += quick ? 2'000 + static_cast<std::int64_t>(pick(rng_, 10'000))
                          : 5'000 + static_cast<std::int64_t>(pick(rng_, 35'000));
    }
    d.turns.push_back(make_turn(u, q));
    d.defective.push_back(defective);
  }

  SessionDraft draft_session(UserProfile& u) {
    SessionDraft d;
    advance_clock(u);
    const double roll = uniform01(rng_);
    if (roll < cfg_.p_fail) {
      d.failing = true;
      TaggedQuery prev;
      bool has_prev = false;
      if (uniform01(rng_) < 0.3) {
        prev = sample_clean(u, nullptr);
        add_turn(d, u, prev, false, false);
        has_prev = true;
      }
      const TaggedQuery clean = sample_clean(u, has_prev ? &prev : nullptr);
      add_turn(d, u, noisy(clean), true, false);
      const std::size_t opening = d.turns.size() - 1;
      const int attempts = 1 + static_cast<int>(pick(rng_, static_cast<std::size_t>(cfg_.max_rephrases)));
      for (int a = 1; a < attempts; ++a) add_turn(d, u, noisy(clean), true, true);
      add_turn(d, u, clean, false, true);
      d.gold = RewritePair::create(d.turns[opening], d.turns.back());
      const double f = uniform01(rng_);
      const int follow = f < 0.5 ? 0 : (f < 0.8 ? 1 : 2);
      TaggedQuery last = clean;
      for (int k = 0; k < follow; ++k) {
        last = sample_clean(u, &last);
        add_turn(d, u, last, false, false);
      }
    } else if (roll < cfg_.p_fail + cfg_.p_abandon) {
      d.abandoned = true;
      const TaggedQuery clean = sample_clean(u, nullptr);
      add_turn(d, u, noisy(clean), true, false);
      if (uniform01(rng_) < 0.5) add_turn(d, u, noisy(clean), true, true);
      static const std::array<std::pair<const char*, const char*>, 4> kAbandon = {{
          {"StopIntent", "stop"},
          {"StopIntent", "stop it"},
          {"CancelIntent", "cancel"},
          {"CancelIntent", "never mind"},
      }};
      const auto& [intent, text] = kAbandon[pick(rng_, kAbandon.size())];
      TaggedQuery stop{{}, "Global", intent};
      for (auto& w : split(text)) stop.tokens.push_back({w, ""});
      add_turn(d, u, stop, false, true);
    } else {
      static const std::array<double, 5> kLengths = {0.3, 0.3, 0.2, 0.12, 0.08};
      std::discrete_distribution<int> len_dist(kLengths.begin(), kLengths.end());
      const int len = std::min(cfg_.max_turns, 1 + len_dist(rng_));
      TaggedQuery last;
      for (int k = 0; k < len; ++k) {
        last = sample_clean(u, k == 0 ? nullptr : &last);
        add_turn(d, u, last, false, false);
      }
    }
    return d;
  }

  const GeneratorConfig& cfg_;
  Rng rng_;
  std::vector<ParsedTemplate> templates_;
  std::map<Kind, std::vector<std::size_t>> by_kind_;
  std::vector<Kind> kinds_;
  std::vector<double> weights_;
  std::map<std::string, std::vector<std::size_t>> songs_by_artist_;
  std::unordered_map<std::string, std::vector<std::size_t>> songs_by_norm_artist_;
  std::vector<UserProfile> users_;
};

}  // namespace

std::string confuse_word(const std::string& word,
                         const std::vector<std::pair<std::string, std::string>>& confusions,
                         unsigned variant) {
  std::vector<std::pair<std::size_t, std::size_t>> sites;  // (rule, position)
  for (std::size_t r = 0; r < confusions.size(); ++r) {
    const std::string& from = confusions[r].first;
    if (from.empty()) continue;
    for (std::size_t pos = word.find(from); pos != std::string::npos; pos = word.find(from, pos + 1)) {
      sites.emplace_back(r, pos);
    }
  }
  if (sites.empty()) {
    // No rule applies: the recognizer drops or doubles the final letter.
    if (word.size() > 2 && variant % 2 == 0) return word.substr(0, word.size() - 1);
    return word + word.back();
  }
  const std::size_t k = mix(hash_string(word) ^ mix(variant + 1)) % sites.size();
  const auto [rule, pos] = sites[k];
  std::string out = word;
  out.replace(pos, confusions[rule].first.size(), confusions[rule].second);
  if (out == word) out += word.back();
  return out;
}

bool Catalog::empty() const {
  return songs.empty() && artists.empty() && stations.empty() && cities.empty() &&
         devices.empty() && durations.empty() && items.empty();
}

void GeneratorConfig::validate() const {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ValidationError(std::string("generator probability ") + name + " must lie in [0, 1]");
    }
  };
  prob(p_fail, "p_fail");
  prob(p_abandon, "p_abandon");
  prob(p_fail + p_abandon, "p_fail + p_abandon");
  prob(noise.char_confusion_prob, "char_confusion_prob");
  prob(noise.word_drop_prob, "word_drop_prob");
  prob(noise.word_swap_prob, "word_swap_prob");
  prob(noise.misparse_prob, "misparse_prob");
  if (catalog.empty()) throw ValidationError("generator catalog is empty");
  if (templates.empty()) throw ValidationError("generator has no query templates");
  if (n_users < 1) throw ValidationError("n_users must be >= 1");
  if (n_sessions < 0 || n_eval_cases < 0) throw ValidationError("session counts must be >= 0");
  if (max_rephrases < 1) throw ValidationError("max_rephrases must be >= 1");
  if (max_turns < 1) throw ValidationError("max_turns must be >= 1");
  if (start_ts_ms < 0) throw ValidationError("start_ts_ms must be >= 0");
}

GeneratedCorpus generate_corpus(const GeneratorConfig& cfg) {
  cfg.validate();
  return Generator(cfg).run();
}

std::vector<Candidate> enumerate_clean_queries(const GeneratorConfig& cfg) {
  cfg.validate();
  return Generator(cfg).enumerate();
}

}  // namespace qrewrite
