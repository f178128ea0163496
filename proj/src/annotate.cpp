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

#include "engram/annotate.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "engram/error.hpp"
#include "engram/text.hpp"

namespace engram {

namespace data {
extern const char* const kGazetteer;
extern const char* const kEmotionLexicon;
extern const char* const kAcknowledgments;
}  // namespace data

namespace {

using WordSet = std::unordered_set<std::string_view>;

const WordSet kDeterminers = {"the", "a",     "an",    "this", "that", "these", "those",
                              "my",  "our",   "your",  "his",  "her",  "their", "its",
                              "some", "any",  "every", "each"};
const WordSet kFirstPerson = {"i", "me", "my", "mine", "myself", "we", "us", "our", "ours"};
const WordSet kOtherPronouns = {"you", "he",  "she",   "they", "it",   "him", "them",
                                "his", "her", "their", "its",  "your", "this", "that"};
const WordSet kCopulas = {"is", "are", "was", "were", "am"};
const WordSet kAuxiliaries = {"will",  "would", "shall", "should", "can",    "could",
                              "may",   "might", "must",  "do",     "does",   "did",
                              "not",   "don't", "doesn't", "didn't", "won't", "never",
                              "also",  "still", "already", "really", "usually", "often",
                              "always", "currently", "now"};
const WordSet kWhWords = {"what", "who", "whom", "whose", "where", "when", "which", "why", "how"};
const WordSet kPrepositions = {"in", "at", "on", "to", "from", "with", "for", "of", "by", "about",
                               "into", "over", "under", "near", "as"};
const WordSet kDiscourseMarkers = {"so",  "well", "also", "actually", "and", "btw", "oh", "hey",
                                   "hi",  "um",   "uh",   "just",     "yes", "no",  "ok", "okay",
                                   "alright", "anyway", "please", "hmm"};
// Capitalized only because they open the sentence.
const WordSet kOpeners = {"hmm", "nice", "great", "cool", "wow", "sure", "thanks", "thank", "sorry",
                          "good", "fine", "ah", "interesting", "perfect", "awesome", "lol", "hello",
                          "yeah", "yep", "nope", "really", "maybe", "indeed", "right", "exactly"};
const WordSet kPinMarkers = {"remember", "note"};
const WordSet kPrivateMarkers = {"private", "confidential", "secret"};
const WordSet kPreferenceVerbs = {"like", "love", "prefer", "enjoy"};
const WordSet kDislikeVerbs = {"hate", "dislike"};
const WordSet kUnitWords = {"day",     "days",    "week",   "weeks",   "month", "months",
                            "year",    "years",   "hour",   "hours",   "minute", "minutes",
                            "dollar",  "dollars", "usd",    "eur",     "euro",  "euros",
                            "percent", "kg",      "km",     "miles",   "gb",    "tb",
                            "items",   "units",   "pounds", "yuan",    "times"};
const WordSet kRecurringMarkers = {"every", "daily", "weekly", "monthly", "always", "usually",
                                   "often", "each",  "annually", "yearly", "regularly"};
const WordSet kFutureMarkers = {"will", "tomorrow", "next", "soon", "shall", "upcoming", "won't"};
const WordSet kPastMarkers = {"was",  "were",       "did",     "had",     "yesterday", "ago",
                              "last", "previously", "earlier", "formerly", "didn't"};
const WordSet kPresentMarkers = {"is", "are", "am", "now", "currently", "today", "has", "have",
                                 "does", "do"};

// Base verbs recognised in verb-relation clauses. Irregular past forms are
// listed separately; regular forms are derived.
const std::vector<std::string_view> kVerbs = {
    "live",   "work",   "own",    "buy",     "like",    "love",    "prefer", "enjoy",
    "hate",   "dislike", "want",  "need",    "use",     "move",    "visit",  "travel",
    "drive",  "study",  "teach",  "manage",  "lead",    "report",  "belong", "know",
    "speak",  "plan",   "order",  "pay",     "return",  "ship",    "book",   "cancel",
    "have",   "get",    "go",     "come",    "join",    "leave",   "start",  "attend",
    "call",   "meet",   "sell",   "prefer",  "support", "cover",   "include", "require",
    "collaborate", "partner", "subscribe", "stay",  "reside", "graduate", "belong"};

const std::vector<std::pair<std::string_view, std::string_view>> kIrregularPast = {
    {"bought", "buy"},  {"went", "go"},     {"came", "come"},   {"had", "have"},
    {"got", "get"},     {"left", "leave"},  {"met", "meet"},    {"sold", "sell"},
    {"paid", "pay"},    {"drove", "drive"}, {"spoke", "speak"}, {"taught", "teach"},
    {"led", "lead"},    {"knew", "know"},   {"made", "make"},   {"took", "take"}};

std::string third_person(std::string_view base) {
  std::string b(base);
  if (b == "have") return "has";
  if (b == "be") return "is";
  auto ends = [&](std::string_view suffix) {
    return b.size() >= suffix.size() && b.compare(b.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends("s") || ends("sh") || ends("ch") || ends("x") || ends("z") || ends("o")) return b + "es";
  if (b.size() >= 2 && b.back() == 'y' && std::string_view("aeiou").find(b[b.size() - 2]) == std::string_view::npos) {
    return b.substr(0, b.size() - 1) + "ies";
  }
  return b + "s";
}

std::string regular_past(std::string_view base) {
  std::string b(base);
  if (b.back() == 'e') return b + "d";
  if (b.size() >= 2 && b.back() == 'y' && std::string_view("aeiou").find(b[b.size() - 2]) == std::string_view::npos) {
    return b.substr(0, b.size() - 1) + "ied";
  }
  return b + "ed";
}

struct VerbForm {
  std::string base;
  bool past = false;
};

// Surface form -> base verb.
const std::unordered_map<std::string, VerbForm>& verb_forms() {
  static const auto* forms = [] {
    auto* m = new std::unordered_map<std::string, VerbForm>();
    for (auto v : kVerbs) {
      m->emplace(std::string(v), VerbForm{std::string(v), false});
      m->emplace(third_person(v), VerbForm{std::string(v), false});
      m->emplace(regular_past(v), VerbForm{std::string(v), true});
    }
    for (auto [past, base] : kIrregularPast) m->insert_or_assign(std::string(past), VerbForm{std::string(base), true});
    return m;
  }();
  return *forms;
}

bool in(const WordSet& set, std::string_view w) { return set.count(w) > 0; }

bool is_function_word(std::string_view w) {
  return in(kDeterminers, w) || in(kFirstPerson, w) || in(kOtherPronouns, w) || in(kCopulas, w) ||
         in(kAuxiliaries, w) || in(kWhWords, w) || in(kPrepositions, w) ||
         in(kDiscourseMarkers, w) || w == "and" || w == "or" || w == "but" || w == "plus" ||
         w == "be" || w == "been" || w == "being" || w == "there" || w == "here" ||
         w == "then" || w == "than" || w == "very" || w == "too" || w == "only";
}

struct Token {
  std::string text;   // punctuation-stripped, original case
  std::string lower;  // normalized
  std::size_t begin = 0;  // byte range of `text` inside the sentence
  std::size_t end = 0;
  bool possessive = false;  // had a trailing 's
};

bool starts_upper(std::string_view s) {
  if (s.empty()) return false;
  int32_t i = 0;
  UChar32 c;
  U8_NEXT(s.data(), i, static_cast<int32_t>(s.size()), c);
  return c >= 0 && u_isupper(c);
}

bool is_strip_char(char c) {
  return std::string_view(".,!?;:\"'()[]{}`").find(c) != std::string_view::npos;
}

std::vector<Token> tokenize(std::string_view sentence) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < sentence.size()) {
    while (i < sentence.size() && std::isspace(static_cast<unsigned char>(sentence[i]))) ++i;
    std::size_t j = i;
    while (j < sentence.size() && !std::isspace(static_cast<unsigned char>(sentence[j]))) ++j;
    if (j == i) break;
    std::size_t b = i, e = j;
    while (b < e && is_strip_char(sentence[b])) ++b;
    while (e > b && is_strip_char(sentence[e - 1])) --e;
    if (e > b) {
      Token t;
      std::string_view word = sentence.substr(b, e - b);
      if (word.size() > 2 && (word.ends_with("'s") || word.ends_with("’s"))) {
        const std::size_t cut = word.ends_with("'s") ? 2 : 4;
        word.remove_suffix(cut);
        e -= cut;
        t.possessive = true;
      }
      t.text = std::string(word);
      t.lower = normalize_text(word);
      t.begin = b;
      t.end = e;
      out.push_back(std::move(t));
    }
    i = j;
  }
  return out;
}

// Splits at . ! ? ; followed by whitespace or end of text. Returns each
// sentence with its terminal character (0 when none).
std::vector<std::pair<std::string, char>> split_sentences(std::string_view text) {
  std::vector<std::pair<std::string, char>> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?' && c != ';') continue;
    const bool boundary = i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1]));
    if (!boundary) continue;
    std::string s(text.substr(start, i - start));
    if (!normalize_text(s).empty()) out.emplace_back(std::move(s), c);
    start = i + 1;
  }
  std::string tail(text.substr(start));
  if (!normalize_text(tail).empty()) out.emplace_back(std::move(tail), '\0');
  return out;
}

bool is_quantity(std::string_view lower) {
  static const std::regex re(R"(^[$€£]?[0-9]+([.,:][0-9]+)*(%|-[a-z]+)?$)");
  return std::regex_match(lower.begin(), lower.end(), re);
}

std::string span_text(const std::string& sentence, const std::vector<Token>& toks, std::size_t from,
                      std::size_t to) {
  if (from >= to) return {};
  return normalize_text(std::string_view(sentence).substr(toks[from].begin, toks[to - 1].end - toks[from].begin));
}

std::string label_of(const std::string& phrase) {
  std::string out = phrase;
  std::replace(out.begin(), out.end(), ' ', '_');
  return out;
}

struct SentenceResult {
  std::vector<Entity> entities;
  std::vector<Triple> triples;
  std::vector<Fact> facts;
  std::vector<Relation> relations;
  TagSet tags;
  bool question = false;
  bool acknowledgment = false;
};

class SentenceAnnotator {
 public:
  SentenceAnnotator(const RuleTables& tables, std::size_t longest_term, const std::string& sentence,
                    char terminal, const std::vector<std::string>& context)
      : tables_(tables), longest_term_(longest_term), sentence_(sentence), terminal_(terminal),
        context_(context) {}

  SentenceResult run() {
    toks_ = tokenize(sentence_);
    if (toks_.empty()) return {};
    if (is_acknowledgment()) {
      out_.acknowledgment = true;
      return std::move(out_);
    }
    out_.question = terminal_ == '?' || in(kWhWords, toks_.front().lower);
    strip_leading_markers();
    mark_entities();
    if (!out_.question && first_ < toks_.size()) {
      if (!copular_clause() && !verb_clause() && !elliptical_answer()) fallback_statement();
    }
    control_tags();
    return std::move(out_);
  }

 private:
  bool is_acknowledgment() const {
    for (const auto& t : toks_) {
      if (!tables_.acknowledgment_words.count(t.lower)) return false;
    }
    return true;
  }

  void strip_leading_markers() {
    while (first_ + 1 < toks_.size() && in(kDiscourseMarkers, toks_[first_].lower)) ++first_;
    // "remember (that) ..." pins the memory; the rest is parsed normally.
    if (first_ + 1 < toks_.size() && in(kPinMarkers, toks_[first_].lower)) {
      out_.tags.insert(std::string(kPinnedTag));
      ++first_;
      if (first_ + 1 < toks_.size() && toks_[first_].lower == "that") ++first_;
    }
  }

  void add_entity(const std::string& surface, EntityKind kind) {
    if (surface.empty()) return;
    for (auto& e : out_.entities) {
      if (e.surface == surface) {
        if (kind == EntityKind::kStrong) e.kind = kind;
        return;
      }
    }
    out_.entities.push_back({surface, kind});
  }

  void mark_entities() {
    strong_.assign(toks_.size(), false);
    for (std::size_t i = first_; i < toks_.size(); ++i) {
      if (in(kFirstPerson, toks_[i].lower)) {
        strong_[i] = true;
        add_entity("user", EntityKind::kStrong);
      }
    }
    // Quantities, optionally followed by a unit word.
    for (std::size_t i = first_; i < toks_.size(); ++i) {
      if (strong_[i] || !is_quantity(toks_[i].lower)) continue;
      std::size_t end = i + 1;
      if (end < toks_.size() && in(kUnitWords, toks_[end].lower)) ++end;
      mark_span(i, end);
      i = end - 1;
    }
    // Gazetteer, longest match first.
    for (std::size_t i = first_; i < toks_.size(); ++i) {
      if (strong_[i]) continue;
      for (std::size_t len = std::min(longest_term_, toks_.size() - i); len >= 1; --len) {
        std::vector<std::string> words;
        for (std::size_t k = i; k < i + len; ++k) words.push_back(toks_[k].lower);
        auto it = tables_.gazetteer.find(join(words, " "));
        if (it == tables_.gazetteer.end()) continue;
        mark_span(i, i + len);
        if (!it->second.empty()) out_.tags.insert(it->second);
        i += len - 1;
        break;
      }
    }
    // Capitalized spans.
    for (std::size_t i = first_; i < toks_.size(); ++i) {
      if (strong_[i] || !capitalized_content(i)) continue;
      std::size_t end = i + 1;
      while (end < toks_.size() && !strong_[end] && capitalized_content(end) && !toks_[end - 1].possessive) ++end;
      mark_span(i, end);
      i = end - 1;
    }
    // Remaining content words are Weak.
    for (std::size_t i = first_; i < toks_.size(); ++i) {
      const auto& w = toks_[i].lower;
      if (strong_[i] || w.size() < 3 || is_function_word(w) || verb_forms().count(w)) continue;
      if (!std::all_of(w.begin(), w.end(), [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '-'; })) continue;
      if (tables_.acknowledgment_words.count(w)) continue;
      add_entity(w, EntityKind::kWeak);
    }
  }

  bool capitalized_content(std::size_t i) const {
    if (i == first_ && in(kOpeners, toks_[i].lower)) return false;
    return starts_upper(toks_[i].text) && !is_function_word(toks_[i].lower) &&
           !tables_.acknowledgment_words.count(toks_[i].lower);
  }

  void mark_span(std::size_t from, std::size_t to) {
    for (std::size_t k = from; k < to; ++k) strong_[k] = true;
    std::vector<std::string> words;
    for (std::size_t k = from; k < to; ++k) words.push_back(toks_[k].lower);
    add_entity(join(words, " "), EntityKind::kStrong);
  }

  bool phrase_is_strong(std::size_t from, std::size_t to) const {
    for (std::size_t k = from; k < to; ++k) {
      if (strong_[k]) return true;
    }
    return false;
  }

  std::size_t skip_determiners(std::size_t from, std::size_t to) const {
    while (from < to && in(kDeterminers, toks_[from].lower) && !in(kFirstPerson, toks_[from].lower)) ++from;
    return from;
  }

  // Normalized phrase for [from, to); a lone first-person pronoun is "user".
  std::string phrase(std::size_t from, std::size_t to) const {
    if (to == from + 1 && in(kFirstPerson, toks_[from].lower)) return "user";
    return span_text(sentence_, toks_, from, to);
  }

  void add_fact(const std::string& key, const std::string& value, const std::string& label) {
    Fact f{key, value, label, value.empty() ? key : key + " = " + value};
    for (const auto& existing : out_.facts) {
      if (existing.statement == f.statement) return;
    }
    out_.facts.push_back(std::move(f));
  }

  void add_relation(const std::string& head, bool head_strong, const std::string& label,
                    const std::string& tail, bool tail_strong) {
    add_entity(head, head_strong ? EntityKind::kStrong : EntityKind::kWeak);
    add_entity(tail, tail_strong ? EntityKind::kStrong : EntityKind::kWeak);
    out_.triples.push_back({head, label, tail});
    if (head_strong && tail_strong) out_.relations.push_back({head, label, tail});
  }

  bool subject_ok(std::size_t from, std::size_t to) const {
    if (from >= to || to - from > 6) return false;
    if (to == from + 1 && in(kOtherPronouns, toks_[from].lower)) return false;
    for (std::size_t k = from; k < to; ++k) {
      const auto& w = toks_[k].lower;
      if (in(kWhWords, w) || in(kCopulas, w) || in(kAuxiliaries, w)) return false;
    }
    return true;
  }

  bool copular_clause() {
    std::size_t c = first_;
    while (c < toks_.size() && !in(kCopulas, toks_[c].lower)) ++c;
    std::size_t object_from = c + 1;
    std::size_t subject_to = c;
    if (c == toks_.size()) {
      // "will be", "has/have/had been"
      for (c = first_; c + 1 < toks_.size(); ++c) {
        const auto& a = toks_[c].lower;
        const auto& b = toks_[c + 1].lower;
        if ((a == "will" && b == "be") || ((a == "has" || a == "have" || a == "had") && b == "been")) break;
      }
      if (c + 1 >= toks_.size()) return false;
      subject_to = c;
      object_from = c + 2;
    }
    const std::size_t subject_from = skip_determiners(first_, subject_to);
    if (!subject_ok(subject_from, subject_to)) return false;
    const std::size_t obj_from = skip_determiners(object_from, toks_.size());
    if (obj_from >= toks_.size()) return false;
    const std::string value = phrase(obj_from, toks_.size());
    const bool value_strong = phrase_is_strong(obj_from, toks_.size());

    // "<E>'s <attr>" and "my <attr>" subjects.
    std::size_t poss = subject_from;
    while (poss < subject_to && !toks_[poss].possessive) ++poss;
    const bool first_person_owner =
        first_ < subject_to && (toks_[first_].lower == "my" || toks_[first_].lower == "our") &&
        subject_from == first_ + 1;
    if (first_person_owner || (poss + 1 < subject_to)) {
      const std::size_t attr_from = first_person_owner ? subject_from : poss + 1;
      const std::string attr = phrase(attr_from, subject_to);
      const std::string owner = first_person_owner ? "user" : phrase(subject_from, poss + 1);
      const bool owner_strong = first_person_owner || phrase_is_strong(subject_from, poss + 1);
      if (!first_person_owner) add_entity(owner, owner_strong ? EntityKind::kStrong : EntityKind::kWeak);
      add_fact(attr + " of " + owner, value, label_of(attr));
      add_relation(owner, owner_strong, label_of(attr), value, value_strong);
      return true;
    }
    // "<attr> of <E>"
    for (std::size_t k = subject_from + 1; k + 1 < subject_to; ++k) {
      if (toks_[k].lower != "of") continue;
      const std::size_t owner_from = skip_determiners(k + 1, subject_to);
      if (owner_from >= subject_to) break;
      const std::string attr = phrase(subject_from, k);
      const std::string owner = phrase(owner_from, subject_to);
      const bool owner_strong = phrase_is_strong(owner_from, subject_to);
      add_fact(attr + " of " + owner, value, label_of(attr));
      add_relation(owner, owner_strong, label_of(attr), value, value_strong);
      return true;
    }
    const std::string subject = phrase(subject_from, subject_to);
    const bool subject_strong = phrase_is_strong(subject_from, subject_to);
    add_fact(subject, value, "is");
    add_relation(subject, subject_strong, "is", value, value_strong);
    return true;
  }

  bool verb_clause() {
    std::size_t v = first_;
    while (v < toks_.size() && !verb_forms().count(toks_[v].lower) && !in(kAuxiliaries, toks_[v].lower)) ++v;
    if (v >= toks_.size()) return false;
    const std::size_t subject_to = v;
    while (v < toks_.size() && in(kAuxiliaries, toks_[v].lower)) ++v;
    if (v >= toks_.size()) return false;
    auto form = verb_forms().find(toks_[v].lower);
    if (form == verb_forms().end()) return false;
    const std::size_t subject_from = skip_determiners(first_, subject_to);
    if (!subject_ok(subject_from, subject_to)) return false;

    std::string label = third_person(form->second.base);
    std::size_t obj = v + 1;
    if (obj < toks_.size() && in(kPrepositions, toks_[obj].lower)) {
      label += "_" + toks_[obj].lower;
      ++obj;
    }
    obj = skip_determiners(obj, toks_.size());
    if (obj >= toks_.size()) return false;
    const std::string subject = phrase(subject_from, subject_to);
    const std::string object = phrase(obj, toks_.size());
    const bool subject_strong = phrase_is_strong(subject_from, subject_to);
    const bool object_strong = phrase_is_strong(obj, toks_.size());
    add_fact(subject + " " + label, object, label);
    add_relation(subject, subject_strong, label, object, object_strong);

    if (subject == "user") {
      if (in(kPreferenceVerbs, form->second.base)) out_.tags.insert("pref:" + label_of(object));
      if (in(kDislikeVerbs, form->second.base)) out_.tags.insert("dislike:" + label_of(object));
    }
    return true;
  }

  // A fragment answering the previous "what is X?" question becomes "X = fragment".
  bool elliptical_answer() {
    if (context_.empty()) return false;
    const auto prior = tokenize(context_.back());
    const std::string& raw = context_.back();
    if (prior.size() < 3 || normalize_text(raw).back() != '?') return false;
    if (prior[0].lower != "what" && prior[0].lower != "which") return false;
    if (!in(kCopulas, prior[1].lower)) return false;
    std::size_t from = 2;
    while (from < prior.size() && in(kDeterminers, prior[from].lower)) ++from;
    std::size_t to = prior.size();
    // Drop a trailing deictic qualifier: "... for this product".
    for (std::size_t k = from + 1; k + 1 < to; ++k) {
      if ((prior[k].lower == "for" || prior[k].lower == "of" || prior[k].lower == "on") &&
          (prior[k + 1].lower == "this" || prior[k + 1].lower == "that")) {
        to = k;
        break;
      }
    }
    if (from >= to) return false;
    // Only answers that carry something concrete count: "2 years", "Berlin".
    if (std::none_of(strong_.begin() + static_cast<std::ptrdiff_t>(first_), strong_.end(), [](bool b) { return b; })) {
      return false;
    }
    const std::string key = span_text(raw, prior, from, to);
    const std::string value = span_text(sentence_, toks_, first_, toks_.size());
    add_fact(key, value, "is");
    return true;
  }

  void fallback_statement() {
    if (!phrase_is_strong(first_, toks_.size())) return;
    add_fact(span_text(sentence_, toks_, first_, toks_.size()), "", "");
  }

  void control_tags() {
    for (std::size_t i = 0; i < toks_.size(); ++i) {
      const auto& w = toks_[i].lower;
      if (in(kPrivateMarkers, w)) out_.tags.insert(std::string(kPrivateTag));
      if (w == "share" && i > 0 && (toks_[i - 1].lower == "don't" || toks_[i - 1].lower == "not")) {
        out_.tags.insert(std::string(kPrivateTag));
      }
    }
  }

  const RuleTables& tables_;
  std::size_t longest_term_;
  const std::string& sentence_;
  char terminal_;
  const std::vector<std::string>& context_;
  std::vector<Token> toks_;
  std::vector<bool> strong_;
  std::size_t first_ = 0;
  SentenceResult out_;
};

TemporalClass classify_temporal(const std::vector<std::string>& words) {
  bool recurring = false, future = false, past = false, present = false;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto& w = words[i];
    recurring |= in(kRecurringMarkers, w);
    future |= in(kFutureMarkers, w) || (w == "going" && i + 1 < words.size() && words[i + 1] == "to");
    past |= in(kPastMarkers, w);
    present |= in(kPresentMarkers, w);
    if (auto it = verb_forms().find(w); it != verb_forms().end()) {
      (it->second.past ? past : present) = true;
    }
  }
  if (recurring) return TemporalClass::kRecurring;
  if (future) return TemporalClass::kFuture;
  if (past) return TemporalClass::kPast;
  if (present) return TemporalClass::kPresent;
  return TemporalClass::kAtemporal;
}

EmotionTag classify_emotion(const std::vector<std::string>& words,
                            const std::map<std::string, LexiconEntry>& lexicon, std::size_t longest) {
  std::map<EmotionLabel, double> score;
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (std::size_t len = std::min(longest, words.size() - i); len >= 1; --len) {
      std::vector<std::string> parts(words.begin() + static_cast<std::ptrdiff_t>(i),
                                     words.begin() + static_cast<std::ptrdiff_t>(i + len));
      auto it = lexicon.find(join(parts, " "));
      if (it == lexicon.end()) continue;
      score[it->second.label] += it->second.weight;
      i += len - 1;
      break;
    }
  }
  EmotionTag best;
  for (const auto& [label, s] : score) {
    if (label == EmotionLabel::kNeutral || s <= 0.0) continue;
    if (s > best.intensity) best = EmotionTag{label, std::min(1.0, s)};
  }
  return best;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kConfigInvalid, "cannot read rule table " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename F>
void for_each_data_line(std::string_view text, F&& f) {
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    f(line);
  }
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, '\t')) out.push_back(cur);
  return out;
}

std::size_t longest_key(const auto& map) {
  std::size_t best = 1;
  for (const auto& [k, _] : map) best = std::max(best, split_whitespace(k).size());
  return best;
}

}  // namespace

std::map<std::string, std::string> RuleTables::parse_gazetteer(std::string_view text) {
  std::map<std::string, std::string> out;
  for_each_data_line(text, [&](const std::string& line) {
    auto cols = split_tabs(line);
    out[normalize_text(cols[0])] = cols.size() > 1 ? normalize_text(cols[1]) : std::string();
  });
  return out;
}

std::map<std::string, LexiconEntry> RuleTables::parse_lexicon(std::string_view text) {
  std::map<std::string, LexiconEntry> out;
  for_each_data_line(text, [&](const std::string& line) {
    auto cols = split_tabs(line);
    if (cols.size() < 3) throw Error(ErrorCode::kConfigInvalid, "bad lexicon line: " + line);
    auto label = parse_emotion_label(normalize_text(cols[1]));
    if (!label) throw Error(ErrorCode::kConfigInvalid, "bad emotion label: " + cols[1]);
    out[normalize_text(cols[0])] = LexiconEntry{*label, std::stod(cols[2])};
  });
  return out;
}

std::set<std::string> RuleTables::parse_word_list(std::string_view text) {
  std::set<std::string> out;
  for_each_data_line(text, [&](const std::string& line) { out.insert(normalize_text(line)); });
  return out;
}

RuleTables RuleTables::defaults() {
  RuleTables t;
  t.gazetteer = parse_gazetteer(data::kGazetteer);
  t.emotion_lexicon = parse_lexicon(data::kEmotionLexicon);
  t.acknowledgment_words = parse_word_list(data::kAcknowledgments);
  return t;
}

RuleTables RuleTables::load(const std::string& gazetteer_path, const std::string& lexicon_path,
                            const std::string& acknowledgment_path) {
  RuleTables t = defaults();
  if (!gazetteer_path.empty()) t.gazetteer = parse_gazetteer(read_file(gazetteer_path));
  if (!lexicon_path.empty()) t.emotion_lexicon = parse_lexicon(read_file(lexicon_path));
  if (!acknowledgment_path.empty()) {
    t.acknowledgment_words = parse_word_list(read_file(acknowledgment_path));
  }
  return t;
}

Annotator::Annotator(RuleTables tables)
    : tables_(std::move(tables)),
      longest_gazetteer_term_(longest_key(tables_.gazetteer)),
      longest_lexicon_phrase_(longest_key(tables_.emotion_lexicon)) {}

SemanticAnchorSet Annotator::annotate(std::string_view utterance,
                                      const std::vector<std::string>& context) const {
  if (normalize_text(utterance).empty()) {
    throw Error(ErrorCode::kEmptyUtterance, "utterance is empty");
  }
  SemanticAnchorSet out;
  bool all_ack = true;
  bool any_question = false;
  std::vector<std::string> words;
  for (const auto& [sentence, terminal] : split_sentences(utterance)) {
    SentenceAnnotator sa(tables_, longest_gazetteer_term_, sentence, terminal, context);
    SentenceResult r = sa.run();
    all_ack &= r.acknowledgment;
    any_question |= r.question;
    for (auto& e : r.entities) {
      auto it = std::find_if(out.entities.begin(), out.entities.end(),
                             [&](const Entity& x) { return x.surface == e.surface; });
      if (it == out.entities.end()) {
        out.entities.push_back(e);
      } else if (e.kind == EntityKind::kStrong) {
        it->kind = EntityKind::kStrong;
      }
    }
    for (auto& f : r.facts) {
      if (std::none_of(out.facts.begin(), out.facts.end(),
                       [&](const Fact& x) { return x.statement == f.statement; })) {
        out.facts.push_back(f);
      }
    }
    out.triples.insert(out.triples.end(), r.triples.begin(), r.triples.end());
    out.relations.insert(out.relations.end(), r.relations.begin(), r.relations.end());
    out.tags.insert(r.tags.begin(), r.tags.end());
    for (const auto& t : tokenize(sentence)) words.push_back(t.lower);
  }
  if (all_ack) {
    out.utterance_kind = UtteranceKind::kAcknowledgment;
    out.entities.clear();
    out.facts.clear();
    out.triples.clear();
    out.relations.clear();
  } else if (any_question && out.facts.empty()) {
    out.utterance_kind = UtteranceKind::kQuestion;
  }
  out.temporal_class = classify_temporal(words);
  out.emotion = classify_emotion(words, tables_.emotion_lexicon, longest_lexicon_phrase_);
  return out;
}

SemanticAnchorSet anchors_for_fact(const SemanticAnchorSet& anchors, std::size_t index) {
  SemanticAnchorSet out;
  const Fact& fact = anchors.facts.at(index);
  out.facts = {fact};
  out.temporal_class = anchors.temporal_class;
  out.emotion = anchors.emotion;
  out.utterance_kind = anchors.utterance_kind;
  out.tags = anchors.tags;
  const std::string haystack = " " + fact.key + " " + fact.value + " ";
  auto mentioned = [&](const std::string& surface) {
    if (surface == "user") return haystack.find(" user ") != std::string::npos;
    return haystack.find(" " + surface + " ") != std::string::npos ||
           haystack.find(" " + surface + ",") != std::string::npos;
  };
  for (const auto& e : anchors.entities) {
    if (mentioned(e.surface)) out.entities.push_back(e);
  }
  auto has = [&](const std::string& s) {
    return std::any_of(out.entities.begin(), out.entities.end(),
                       [&](const Entity& e) { return e.surface == s; });
  };
  for (const auto& t : anchors.triples) {
    if (has(t.subject) && has(t.object)) out.triples.push_back(t);
  }
  for (const auto& r : anchors.relations) {
    if (has(r.head) && has(r.tail)) out.relations.push_back(r);
  }
  return out;
}

std::vector<MemoryUnit> generate_units(const SemanticAnchorSet& anchors, std::string_view raw,
                                       Timestamp now, const std::string& space_id,
                                       const UtteranceRef& source, const Embedder& embedder) {
  std::vector<MemoryUnit> out;
  if (anchors.utterance_kind == UtteranceKind::kAcknowledgment) return out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < anchors.facts.size(); ++i) {
    const std::string content = normalize_text(anchors.facts[i].statement);
    if (content.empty() || !seen.insert(content).second) continue;
    MemoryUnit u;
    u.space_id = space_id;
    u.content = content;
    u.anchors = anchors_for_fact(anchors, i);
    u.embedding = embedder.embed(content);
    u.created_at = now;
    u.trace = ActivationTrace::created_at(now);
    u.emotion_weight = anchors.emotion.intensity;
    u.preference_tags = anchors.tags;
    u.provenance = {SourceRef{source.id, source.turn}};
    u.kind = UnitKind::kFact;
    u.speaker = source.speaker;
    out.push_back(std::move(u));
  }
  return out;
}

std::optional<MemoryUnit> generate_turn_unit(const SemanticAnchorSet& anchors, std::string_view raw,
                                             Timestamp now, const std::string& space_id,
                                             const UtteranceRef& source, const Embedder& embedder) {
  if (!anchors.facts.empty()) return std::nullopt;
  const std::string content = normalize_text(raw);
  if (content.empty()) return std::nullopt;
  MemoryUnit u;
  u.space_id = space_id;
  u.content = content;
  u.anchors = anchors;
  u.embedding = embedder.embed(content);
  u.created_at = now;
  u.trace = ActivationTrace::created_at(now);
  u.emotion_weight = anchors.emotion.intensity;
  u.preference_tags = anchors.tags;
  u.provenance = {SourceRef{source.id, source.turn}};
  switch (anchors.utterance_kind) {
    case UtteranceKind::kAcknowledgment: u.kind = UnitKind::kAcknowledgment; break;
    case UtteranceKind::kQuestion: u.kind = UnitKind::kQuestion; break;
    case UtteranceKind::kStatement: u.kind = UnitKind::kRemark; break;
  }
  u.speaker = source.speaker;
  return u;
}

}  // namespace engram
