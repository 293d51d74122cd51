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

#include "fixtures.h"

#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

namespace qrewrite::testing {

NluHypothesis hyp(std::string domain, std::string intent,
                  std::initializer_list<std::pair<std::string, std::string>> slots) {
  NluHypothesis h;
  h.domain = std::move(domain);
  h.intent = std::move(intent);
  for (const auto& [type, value] : slots) h.slots.push_back(Slot{type, value});
  return h;
}

Utterance utt(std::string user, std::int64_t ts_ms, std::string text,
              std::optional<NluHypothesis> nlu) {
  return Utterance{std::move(user), ts_ms, std::move(text), std::move(nlu)};
}

Eigen::MatrixXd random_vectors(std::size_t n, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), dim);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = normal(rng);
  }
  return m;
}

Eigen::MatrixXd clustered_vectors(std::size_t n, int dim, int n_clusters, double spread,
                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd centers = random_vectors(static_cast<std::size_t>(n_clusters), dim, seed ^ 0xc1u);
  centers.rowwise().normalize();
  std::uniform_int_distribution<int> pick(0, n_clusters - 1);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), dim);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    m.row(i) = centers.row(pick(rng));
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) += spread * normal(rng);
  }
  return m;
}

std::vector<CandidateEntry> plain_entries(std::size_t n) {
  std::vector<CandidateEntry> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].id = static_cast<std::uint32_t>(i);
    out[i].text = "item " + std::to_string(i);
  }
  return out;
}

void set_identity_heads(EncoderParams& params) {
  const int d = params.config.d_out;
  for (LinearParams* head : {&params.head_source, &params.head_target}) {
    head->w = Eigen::MatrixXd::Identity(d, d);
    head->b = Eigen::VectorXd::Zero(d);
  }
}

TempDir::TempDir() {
  std::string pattern = (std::filesystem::temp_directory_path() / "qrewrite-test-XXXXXX").string();
  if (mkdtemp(pattern.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

MemorizationSet memorization_set() {
  const std::vector<std::pair<std::string, std::string>> songs = {
      {"play maj and dragons", "imagine dragons"}, {"play bee tolls", "the beatles"},
      {"play tailor swift songs", "taylor swift"}, {"play cold play", "coldplay"},
      {"play ed sharon", "ed sheeran"},            {"play beyond say", "beyonce"},
      {"play bruno mars bars", "bruno mars"},      {"play adel music", "adele"},
      {"play the weekend", "the weeknd"},          {"play billy eyelash", "billie eilish"}};
  MemorizationSet set;
  std::int64_t ts = 1000;
  for (const auto& [noisy, artist] : songs) {
    const std::string clean = "play " + artist;
    const NluHypothesis h = hyp("Music", "PlayMusicIntent", {{"ArtistName", artist}});
    Utterance src = utt("u", ts, noisy);
    Utterance tgt = utt("u", ts + 3000, clean, h);
    set.pairs.push_back(RewritePair::create(src, tgt));
    set.candidates.push_back(Candidate{clean, h, 1});
    set.cases.push_back(EvalCase{src, tgt});
    ts += 100000;
  }
  const std::vector<std::string> cities = {"boston", "denver", "paris", "tokyo", "lima",
                                           "oslo",   "cairo",  "delhi", "seoul", "rome"};
  for (const auto& city : cities) {
    set.candidates.push_back(
        Candidate{"weather in " + city, hyp("Weather", "GetWeatherIntent", {{"CityName", city}}), 1});
    set.candidates.push_back(
        Candidate{"time in " + city, hyp("Global", "GetTimeIntent", {{"CityName", city}}), 1});
    set.candidates.push_back(Candidate{"play radio " + city,
                                       hyp("Music", "PlayStationIntent", {{"StationName", city}}), 1});
    set.candidates.push_back(Candidate{"navigate to " + city,
                                       hyp("Navigation", "NavigateIntent", {{"CityName", city}}), 1});
  }
  return set;
}

}  // namespace qrewrite::testing
