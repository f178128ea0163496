// Copyright 2026 The Engram Authors
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
#include "engram/corpus.hpp"

#include <random>
#include <set>

#include "engram/error.hpp"
#include "engram/json_io.hpp"
#include "engram/text.hpp"

namespace engram {
namespace {

// Standard distributions are implementation defined; keep the corpus stable
// across standard libraries by drawing raw words only.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  template <typename T>
  const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 gen_;
};

const std::vector<std::string> kOnsets = {"b", "d", "f", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "dr", "tr"};
const std::vector<std::string> kVowels = {"a", "e", "i", "o", "u"};
const std::vector<std::string> kCodas = {"", "", "n", "r", "l", "x", "s"};

const std::vector<std::string> kCities = {"Lisbon", "Oslo",   "Berlin", "Paris",  "Madrid",   "Vienna",
                                          "Prague", "Dublin", "Warsaw", "Athens", "Helsinki", "Riga",
                                          "Tallinn", "Zagreb", "Sofia", "Bergen"};
const std::vector<std::string> kFirstNames = {"Marta", "Tessa", "Jonas", "Ilse", "Pavel", "Nora",
                                              "Emil",  "Greta", "Lukas", "Vera", "Anton", "Lena"};
const std::vector<std::string> kLastNames = {"Lund", "Ibsen", "Novak", "Berg", "Holm", "Strand",
                                             "Dahl", "Falk",  "Moen",  "Aas",  "Vik",  "Rud"};

const std::vector<std::string> kAcks = {"Okay, I understand.", "Got it, thanks.", "Alright, noted.",
                                        "Understood.", "Sounds good."};

enum class Attr { kWarranty, kReturn, kPrice, kTier, kHomeCity, kManager, kHeadquarters };
const std::vector<Attr> kAttrs = {Attr::kWarranty, Attr::kReturn,  Attr::kPrice,       Attr::kTier,
                                  Attr::kHomeCity, Attr::kManager, Attr::kHeadquarters};

struct AttrInfo {
  const char* phrase;
  const char* label;
};

AttrInfo info(Attr a) {
  switch (a) {
    case Attr::kWarranty: return {"warranty period", "warranty_period"};
    case Attr::kReturn: return {"return window", "return_window"};
    case Attr::kPrice: return {"price", "price"};
    case Attr::kTier: return {"support tier", "support_tier"};
    case Attr::kHomeCity: return {"home city", "home_city"};
    case Attr::kManager: return {"account manager", "account_manager"};
    case Attr::kHeadquarters: return {"headquarters city", "headquarters_city"};
  }
  return {"", ""};
}

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string invent_name(Rng& rng) {
  std::string name;
  const std::size_t syllables = 2 + rng.below(2);
  for (std::size_t i = 0; i < syllables; ++i) name += rng.pick(kOnsets) + rng.pick(kVowels);
  name += rng.pick(kCodas);
  return capitalize(name);
}

std::string person_name(Rng& rng) { return rng.pick(kFirstNames) + " " + rng.pick(kLastNames); }

// Value as stated, and as the annotator reports it.
std::pair<std::string, std::string> draw_value(Attr a, Rng& rng) {
  switch (a) {
    case Attr::kWarranty: {
      const auto n = 1 + rng.below(5);
      const std::string v = std::to_string(n) + (n == 1 ? " year" : " years");
      return {v, v};
    }
    case Attr::kReturn: {
      static const std::vector<int> days = {7, 14, 15, 21, 30, 45, 60, 90};
      const std::string v = std::to_string(rng.pick(days)) + " days";
      return {v, v};
    }
    case Attr::kPrice: {
      const std::string v = "$" + std::to_string(10 + rng.below(990));
      return {v, v};
    }
    case Attr::kTier: {
      const std::string v = "level " + std::to_string(1 + rng.below(4));
      return {v, v};
    }
    case Attr::kHomeCity:
    case Attr::kHeadquarters: {
      const std::string v = rng.pick(kCities);
      return {v, lower(v)};
    }
    case Attr::kManager: {
      const std::string v = person_name(rng);
      return {v, lower(v)};
    }
  }
  return {};
}

struct FactSpec {
  Attr attr;
  std::string subject;
  std::string stated;
  std::string value;
};

std::string statement(const FactSpec& f) {
  return "The " + std::string(info(f.attr).phrase) + " of " + f.subject + " is " + f.stated + ".";
}

std::size_t tokens_of(const std::string& utterance) { return count_tokens(normalize_text(utterance)); }

}  // namespace

void CorpusOptions::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidArgument, what); };
  if (facts == 0) fail("facts must be at least 1");
  if (dup == 0) fail("dup must be at least 1");
  if (!(ack_rate >= 0.0 && ack_rate <= 1.0)) fail("ack_rate must lie in [0, 1]");
  if (contradictions > facts) fail("contradictions cannot exceed facts");
  if (step <= 0) fail("step must be positive");
  if (contradiction_gap < 0) fail("contradiction_gap must be non-negative");
}

const std::vector<std::string>& filler_lines() {
  static const std::vector<std::string> lines = {
      "Thanks for explaining all of this so clearly.",
      "Great, thanks for the quick and friendly answers.",
      "Nice, please keep going with the rest of the list.",
      "Interesting, please continue when you are ready.",
      "Could you tell me a little more about how that usually works?",
      "Could you tell me more about that?",
      "Hmm, interesting.",
  };
  return lines;
}

Corpus generate_corpus(const CorpusOptions& options) {
  options.validate();
  Rng rng(options.seed);

  std::vector<FactSpec> facts;
  std::set<std::string> subjects;
  while (facts.size() < options.facts) {
    const Attr attr = rng.pick(kAttrs);
    const std::string subject = attr == Attr::kHomeCity ? invent_name(rng) + " " + rng.pick(kLastNames)
                                                         : invent_name(rng);
    if (!subjects.insert(lower(subject)).second) continue;
    auto [stated, value] = draw_value(attr, rng);
    facts.push_back({attr, subject, stated, value});
  }

  Corpus corpus;
  // Statement instances, then filler, shuffled together.
  std::vector<std::size_t> order;  // fact index, or facts.size() + filler index
  for (std::size_t i = 0; i < facts.size(); ++i) {
    for (std::size_t k = 0; k < options.dup; ++k) order.push_back(i);
  }
  for (std::size_t k = 0; k < options.filler; ++k) order.push_back(facts.size() + k);
  rng.shuffle(order);

  Timestamp clock = options.start;
  auto emit = [&](std::string utterance, std::string speaker) {
    corpus.total_tokens += tokens_of(utterance);
    corpus.turns.push_back({std::move(utterance), std::move(speaker), clock});
    clock = clock + options.step;
  };

  std::vector<bool> seen(facts.size(), false);
  for (std::size_t slot : order) {
    if (slot >= facts.size()) {
      emit(rng.pick(filler_lines()), "user");
      continue;
    }
    const std::string text = statement(facts[slot]);
    if (seen[slot]) corpus.redundant_tokens += tokens_of(text);
    seen[slot] = true;
    emit(text, "assistant");
    if (options.ack_rate > 0.0 && rng.unit() < options.ack_rate) {
      const std::string& ack = rng.pick(kAcks);
      corpus.redundant_tokens += tokens_of(ack);
      emit(ack, "user");
    }
  }

  if (options.contradictions > 0) {
    std::vector<std::size_t> idx(facts.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    rng.shuffle(idx);
    idx.resize(options.contradictions);
    std::sort(idx.begin(), idx.end());
    clock = clock + options.contradiction_gap;
    for (std::size_t i : idx) {
      FactSpec& f = facts[i];
      auto [stated, value] = draw_value(f.attr, rng);
      while (value == f.value) std::tie(stated, value) = draw_value(f.attr, rng);
      f.stated = stated;
      f.value = value;
      emit(statement(f), "assistant");
    }
  }

  for (const auto& f : facts) {
    const AttrInfo ai = info(f.attr);
    corpus.probes.push_back({"What is the " + std::string(ai.phrase) + " of " + f.subject + "?",
                             std::string(ai.phrase) + " of " + lower(f.subject), f.value, ai.label});
  }
  return corpus;
}

std::string turns_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& t : corpus.turns) {
    out += Json{{"utterance", t.utterance}, {"speaker", t.speaker}, {"ts", t.ts.seconds}}.dump() + "\n";
  }
  return out;
}

std::string probes_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& p : corpus.probes) {
    out += Json{{"question", p.question}, {"key", p.key}, {"value", p.value}, {"label", p.label}}.dump() + "\n";
  }
  return out;
}

}  // namespace engram
