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

#include <doctest.h>

#include <algorithm>
#include <fstream>

#include "engram/annotate.hpp"
#include "engram/error.hpp"
#include "engram/json_io.hpp"
#include "engram/text.hpp"

using namespace engram;

namespace {

const Annotator& annotator() {
  static const Annotator a;
  return a;
}

SemanticAnchorSet annotate(std::string_view text, const std::vector<std::string>& context = {}) {
  return annotator().annotate(text, context);
}

bool has_fact(const SemanticAnchorSet& a, const std::string& key, const std::string& value) {
  return std::any_of(a.facts.begin(), a.facts.end(),
                     [&](const Fact& f) { return f.key == key && f.value == value; });
}

}  // namespace

TEST_CASE("golden: warranty statement") {
  std::ifstream in(ENGRAM_TEST_DATA_DIR "/golden/warranty_anchors.json");
  REQUIRE(in);
  const Json golden = Json::parse(in);
  const auto a = annotate(golden["utterance"].get<std::string>());
  CHECK(Json(a.facts) == golden["facts"]);
  for (const auto& s : golden["strong"]) CHECK(a.has_strong(s.get<std::string>()));
  CHECK(to_string(a.temporal_class) == golden["temporal_class"].get<std::string>());
  CHECK(to_string(a.utterance_kind) == golden["utterance_kind"].get<std::string>());
  CHECK(a.tags.count("after_sales") == 1);
}

TEST_CASE("attribute facts and relations") {
  const auto a = annotate("The warranty period of Kovalen is 2 years.");
  REQUIRE(a.facts.size() == 1);
  CHECK(a.facts[0].key == "warranty period of kovalen");
  CHECK(a.facts[0].value == "2 years");
  CHECK(a.facts[0].label == "warranty_period");
  CHECK(a.has_strong("kovalen"));
  CHECK(a.has_strong("2 years"));
  REQUIRE(a.relations.size() == 1);
  CHECK(a.relations[0] == Relation{"kovalen", "warranty_period", "2 years"});

  const auto b = annotate("Kovalen's price is $40.");
  REQUIRE(b.facts.size() == 1);
  CHECK(b.facts[0].key == "price of kovalen");
  CHECK(b.facts[0].value == "$40");
}

TEST_CASE("verb relations map first person to user") {
  const auto a = annotate("I live in Paris.");
  CHECK(has_fact(a, "user lives_in", "paris"));
  REQUIRE(a.relations.size() == 1);
  CHECK(a.relations[0] == Relation{"user", "lives_in", "paris"});
  CHECK(a.temporal_class == TemporalClass::kPresent);

  const auto b = annotate("I moved to Berlin last year.");
  CHECK(b.temporal_class == TemporalClass::kPast);
  const auto c = annotate("I will move to Lisbon next month.");
  CHECK(c.temporal_class == TemporalClass::kFuture);
  const auto d = annotate("I visit Rome every summer.");
  CHECK(d.temporal_class == TemporalClass::kRecurring);
}

TEST_CASE("preferences and control tags") {
  CHECK(annotate("I love jazz.").tags.count("pref:jazz") == 1);
  CHECK(annotate("I hate spinach.").tags.count("dislike:spinach") == 1);
  CHECK(annotate("Remember that my birthday is May 3.").tags.count("pinned") == 1);
  CHECK(annotate("My password is private.").tags.count("private") == 1);
}

TEST_CASE("acknowledgments and questions") {
  const auto a = annotate("Okay, I understand.");
  CHECK(a.utterance_kind == UtteranceKind::kAcknowledgment);
  CHECK(a.facts.empty());
  CHECK(a.entities.empty());
  const auto q = annotate("What is the after-sales service period for this product?");
  CHECK(q.utterance_kind == UtteranceKind::kQuestion);
  CHECK(q.facts.empty());
}

TEST_CASE("elliptical answer uses the preceding question") {
  const auto a = annotate("1-year free.", {"What is the after-sales service period for this product?"});
  CHECK(has_fact(a, "after-sales service period", "1-year free"));
}

TEST_CASE("emotion from lexicon") {
  const auto a = annotate("I am so excited, I cannot wait for the trip!");
  CHECK(a.emotion.label == EmotionLabel::kExcited);
  CHECK(a.emotion.intensity > 0.0);
  CHECK(a.emotion.intensity <= 1.0);
  CHECK(annotate("The invoice is 40 dollars.").emotion.label == EmotionLabel::kNeutral);
}

TEST_CASE("annotation is deterministic and rejects empty input") {
  const std::string text = "Alice works at Acme Corp. She is happy.";
  CHECK(annotate(text) == annotate(text));
  CHECK_THROWS_AS(annotate("   "), Error);
}

TEST_CASE("generate_units yields one unit per distinct fact") {
  HashingEmbedder embedder;
  const auto a = annotate("The price of Kovalen is $40. The price of Kovalen is $40. I live in Oslo.");
  auto units = generate_units(a, "", Timestamp{100}, "s", UtteranceRef{"u1", 0, "user"}, embedder);
  REQUIRE(units.size() == 2);
  for (const auto& u : units) {
    CHECK(u.content == normalize_text(u.content));
    CHECK(u.trace.total_count == 1);
    CHECK(u.embedding.size() == embedder.dimension());
    CHECK(u.kind == UnitKind::kFact);
    CHECK(u.provenance.front().id == "u1");
  }
  const auto ack = annotate("Thanks, got it.");
  CHECK(generate_units(ack, "Thanks, got it.", Timestamp{1}, "s", {}, embedder).empty());
  auto turn = generate_turn_unit(ack, "Thanks, got it.", Timestamp{1}, "s", {}, embedder);
  REQUIRE(turn);
  CHECK(turn->kind == UnitKind::kAcknowledgment);
}

TEST_CASE("rule tables parse and reject malformed rows") {
  auto lex = RuleTables::parse_lexicon("# c\nglad\tpositive\t0.5\n");
  CHECK(lex.at("glad").weight == 0.5);
  CHECK_THROWS_AS(RuleTables::parse_lexicon("glad\tecstatic\t1\n"), Error);
}
