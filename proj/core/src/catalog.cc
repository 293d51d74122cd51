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

// Built-in entity catalog and query templates for the synthetic corpus.

#include <random>
#include <set>

#include "qrewrite/generator.h"

namespace qrewrite {
namespace {

const std::vector<std::string> kArtists = {
    "lil nas x.",      "imagine dragons", "billie eilish",   "taylor swift",   "drake",
    "the beatles",     "queen",           "adele",           "ed sheeran",     "coldplay",
    "post malone",     "ariana grande",   "bruno mars",      "kendrick lamar", "lady gaga",
    "the weeknd",      "dua lipa",        "shawn mendes",    "maroon five",    "linkin park",
    "nirvana",         "metallica",       "eminem",          "rihanna",        "beyonce",
    "katy perry",      "justin bieber",   "harry styles",    "lizzo",          "khalid",
    "halsey",          "lorde",           "sia",             "pink floyd",     "led zeppelin",
    "fleetwood mac",   "the killers",     "arctic monkeys",  "radiohead",      "kanye west",
    "travis scott",    "cardi b",         "doja cat",        "olivia rodrigo", "miley cyrus",
    "selena gomez",    "camila cabello",  "john legend",     "alicia keys",    "norah jones",
    "frank sinatra",   "elvis presley",   "johnny cash",     "dolly parton",   "luke combs",
    "kane brown",      "chris stapleton", "blake shelton",   "carrie underwood", "envy lane",
};

const std::vector<Song> kFamousSongs = {
    {"old town road", "lil nas x."},     {"panini", "lil nas x."},
    {"believer", "imagine dragons"},     {"thunder", "imagine dragons"},
    {"bad guy", "billie eilish"},        {"ocean eyes", "billie eilish"},
    {"shake it off", "taylor swift"},    {"blank space", "taylor swift"},
    {"hotline bling", "drake"},          {"gods plan", "drake"},
    {"hey jude", "the beatles"},         {"let it be", "the beatles"},
    {"bohemian rhapsody", "queen"},      {"we will rock you", "queen"},
    {"hello", "adele"},                  {"rolling in the deep", "adele"},
    {"shape of you", "ed sheeran"},      {"perfect", "ed sheeran"},
    {"yellow", "coldplay"},              {"viva la vida", "coldplay"},
    {"blinding lights", "the weeknd"},   {"starboy", "the weeknd"},
    {"envy me", "envy lane"},            {"blue news radio", "envy lane"},
};

const std::vector<std::string> kTitleAdjectives = {
    "golden", "broken", "silent", "electric", "lonely", "wild",   "sweet",  "midnight",
    "neon",   "frozen", "burning", "crazy",   "little", "endless", "secret", "summer",
    "velvet", "purple", "silver", "hollow",  "faded",  "lucky",   "restless", "paper",
};

const std::vector<std::string> kTitleNouns = {
    "heart",  "river",   "dreams",  "highway", "fire",   "rain",    "love",   "city",
    "stars",  "shadows", "sky",     "eyes",    "road",   "thunder", "window", "garden",
    "ocean",  "mirror",  "morning", "letters", "wings",  "horizon", "echoes", "island",
};

const std::vector<std::string> kStations = {
    "jazz",       "blues",       "classic rock", "country",    "hip hop",   "lofi",
    "smooth jazz", "top forty",  "news",         "sports",     "classical", "reggae",
    "soul",       "funk",        "disco",        "indie",      "metal",     "punk",
    "gospel",     "folk",        "latin",        "kpop",       "electronic", "ambient",
    "chill",      "oldies",      "eighties",     "nineties",   "workout",   "sleep",
};

const std::vector<std::string> kCities = {
    "seattle",   "boston",    "chicago",   "denver",     "austin",     "miami",
    "atlanta",   "phoenix",   "portland",  "dallas",     "houston",    "detroit",
    "nashville", "memphis",   "orlando",   "tampa",      "sacramento", "san diego",
    "san jose",  "new york",  "los angeles", "las vegas", "salt lake city", "kansas city",
    "st louis",  "pittsburgh", "cleveland", "cincinnati", "columbus",  "indianapolis",
    "milwaukee", "minneapolis", "omaha",    "tulsa",      "albuquerque", "el paso",
    "tucson",    "fresno",    "oakland",   "baltimore",  "richmond",   "raleigh",
    "charlotte", "charleston", "savannah", "new orleans", "buffalo",   "rochester",
    "anchorage", "honolulu",
};

const std::vector<std::string> kDevices = {
    "kitchen light",  "living room lamp", "bedroom light", "porch light",  "fan",
    "heater",         "air conditioner",  "coffee maker",  "tv",           "garage light",
    "hallway light",  "desk lamp",        "office light",  "dining light", "bathroom fan",
    "christmas lights", "patio lights",   "night light",   "humidifier",   "speaker",
};

const std::vector<std::string> kDurations = {
    "one minute",     "two minutes",     "three minutes",   "four minutes",   "five minutes",
    "six minutes",    "seven minutes",   "eight minutes",   "nine minutes",   "ten minutes",
    "twelve minutes", "fifteen minutes", "twenty minutes",  "twenty five minutes",
    "thirty minutes", "forty minutes",   "forty five minutes", "fifty minutes", "one hour",
    "two hours",
};

const std::vector<std::string> kItems = {
    "milk",   "eggs",    "bread",   "butter",  "cheese",   "apples",  "bananas", "coffee",
    "tea",    "rice",    "pasta",   "tomatoes", "onions",  "garlic",  "chicken", "beef",
    "salmon", "yogurt",  "cereal",  "oranges", "lettuce",  "carrots", "potatoes", "flour",
    "sugar",  "salt",    "pepper",  "olive oil", "honey",  "peanut butter", "jam", "juice",
    "water",  "soap",    "shampoo", "toothpaste", "paper towels", "napkins", "batteries",
    "dog food",
};

std::vector<Song> make_songs() {
  std::vector<Song> songs = kFamousSongs;
  std::set<std::string> titles;
  for (const auto& s : songs) titles.insert(s.title);
  // Fixed seed: the catalog is part of the format, not of the corpus seed.
  std::mt19937_64 rng(20200101);
  std::uniform_int_distribution<std::size_t> adj(0, kTitleAdjectives.size() - 1);
  std::uniform_int_distribution<std::size_t> noun(0, kTitleNouns.size() - 1);
  std::uniform_int_distribution<std::size_t> artist(0, kArtists.size() - 1);
  std::uniform_int_distribution<int> shape(0, 3);
  while (songs.size() < 400) {
    std::string title;
    switch (shape(rng)) {
      case 0: title = kTitleAdjectives[adj(rng)] + " " + kTitleNouns[noun(rng)]; break;
      case 1: title = kTitleNouns[noun(rng)] + " of " + kTitleNouns[noun(rng)]; break;
      case 2: title = "the " + kTitleAdjectives[adj(rng)] + " " + kTitleNouns[noun(rng)]; break;
      default: title = kTitleAdjectives[adj(rng)] + " " + kTitleNouns[noun(rng)] + " " +
                       kTitleNouns[noun(rng)];
    }
    if (!titles.insert(title).second) continue;
    songs.push_back({title, kArtists[artist(rng)]});
  }
  return songs;
}

}  // namespace

GeneratorConfig GeneratorConfig::desk_default() {
  GeneratorConfig cfg;
  cfg.catalog.songs = make_songs();
  cfg.catalog.artists = kArtists;
  cfg.catalog.stations = kStations;
  cfg.catalog.cities = kCities;
  cfg.catalog.devices = kDevices;
  cfg.catalog.durations = kDurations;
  cfg.catalog.items = kItems;

  cfg.templates = {
      {"Music", "PlayMusic", "play {songname}"},
      {"Music", "PlayMusic", "play {songname} by {artistname}"},
      {"Music", "PlayMusic", "play the song {songname}"},
      {"Music", "PlayMusic", "i want to hear {songname} by {artistname}"},
      {"Music", "PlayMusic", "play {artistname}"},
      {"Music", "PlayMusic", "play songs by {artistname}"},
      {"Music", "PlayMusic", "play music by {artistname}"},
      {"Music", "PlayStation", "play {stationname} radio"},
      {"Music", "PlayStation", "tune in to {stationname} radio"},
      {"Music", "PlayStation", "play the {stationname} station"},
      {"Weather", "GetWeather", "what's the weather in {cityname}"},
      {"Weather", "GetWeather", "weather in {cityname}"},
      {"Weather", "GetWeather", "will it rain in {cityname} today"},
      {"HomeAutomation", "TurnOn", "turn on the {devicename}"},
      {"HomeAutomation", "TurnOn", "switch on the {devicename}"},
      {"HomeAutomation", "TurnOff", "turn off the {devicename}"},
      {"HomeAutomation", "TurnOff", "switch off the {devicename}"},
      {"Notifications", "SetTimer", "set a timer for {duration}"},
      {"Notifications", "SetTimer", "start a {duration} timer"},
      {"Shopping", "AddToList", "add {itemname} to my shopping list"},
      {"Shopping", "AddToList", "put {itemname} on my list"},
  };

  cfg.noise.confusions = {
      {"ee", "ea"}, {"ea", "ee"}, {"ph", "f"},  {"c", "k"},   {"k", "c"},  {"s", "z"},
      {"i", "y"},   {"y", "ie"},  {"m", "n"},   {"n", "m"},   {"th", "d"}, {"v", "b"},
      {"b", "v"},   {"d", "t"},   {"t", "d"},   {"oo", "u"},  {"er", "a"}, {"l", "r"},
      {"r", "l"},   {"ow", "o"},  {"ai", "ay"}, {"o", "oh"},  {"g", "j"},  {"u", "oo"},
  };
  return cfg;
}

}  // namespace qrewrite
