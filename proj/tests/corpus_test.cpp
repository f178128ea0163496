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
#include <set>

#include "doctest.h"
#include "engram/corpus.hpp"
#include "test_util.hpp"

using namespace engram;
using engram::testing::annotator;
using engram::testing::error_code_of;

TEST_CASE("gen-corpus yields exactly the requested number of fact keys") {
  CorpusOptions o;
  o.facts = 100;
  o.dup = 10;
  const Corpus c = generate_corpus(o);
  CHECK(c.probes.size() == 100);
  CHECK(c.turns.size() == 1000);
  std::set<std::string> keys;
  for (const auto& p : c.probes) keys.insert(p.key);
  CHECK(keys.size() == 100);
}

TEST_CASE("every statement annotates to its probe's key, value and label") {
  CorpusOptions o;
  o.facts = 300;
  o.seed = 7;
  o.contradictions = 40;
  const Corpus c = generate_corpus(o);
  std::map<std::string, const Probe*> by_key;
  for (const auto& p : c.probes) by_key[p.key] = &p;

  std::set<std::string> keys;
  std::map<std::string, std::string> latest;
  for (const auto& t : c.turns) {
    const auto anchors = annotator().annotate(t.utterance, {});
    REQUIRE_MESSAGE(anchors.facts.size() == 1, t.utterance);
    const Fact& f = anchors.facts.front();
    REQUIRE_MESSAGE(by_key.count(f.key), t.utterance);
    CHECK_MESSAGE(f.label == by_key[f.key]->label, t.utterance);
    keys.insert(f.key);
    latest[f.key] = f.value;
  }
  CHECK(keys.size() == 300);
  for (const auto& p : c.probes) CHECK_MESSAGE(latest[p.key] == p.value, p.key);
}

TEST_CASE("probe questions carry the probed entity but no facts") {
  CorpusOptions o;
  o.facts = 50;
  for (const auto& p : generate_corpus(o).probes) {
    const auto anchors = annotator().annotate(p.question, {});
    CHECK(anchors.facts.empty());
    CHECK(anchors.utterance_kind == UtteranceKind::kQuestion);
  }
}

TEST_CASE("filler and acknowledgments carry no facts") {
  for (const auto& line : filler_lines()) CHECK_MESSAGE(annotator().annotate(line, {}).facts.empty(), line);
  CorpusOptions o;
  o.facts = 40;
  o.ack_rate = 1.0;
  const Corpus c = generate_corpus(o);
  CHECK(c.turns.size() == 80);
  for (std::size_t i = 1; i < c.turns.size(); i += 2) {
    CHECK(annotator().annotate(c.turns[i].utterance, {}).utterance_kind == UtteranceKind::kAcknowledgment);
  }
}

TEST_CASE("contradictions restate facts with a new value after the gap") {
  CorpusOptions o;
  o.facts = 20;
  o.dup = 2;
  o.contradictions = 5;
  const Corpus c = generate_corpus(o);
  REQUIRE(c.turns.size() == 45);
  CHECK(c.turns[40].ts - c.turns[39].ts == o.step + o.contradiction_gap);
}

TEST_CASE("redundancy bound counts repeats and acknowledgments") {
  CorpusOptions o;
  o.facts = 1;
  o.dup = 3;
  const Corpus c = generate_corpus(o);
  CHECK(c.redundant_tokens * 3 == c.total_tokens * 2);
}

TEST_CASE("the corpus is a pure function of the options") {
  CorpusOptions o;
  o.facts = 30;
  o.dup = 3;
  o.ack_rate = 0.5;
  o.filler = 10;
  o.contradictions = 4;
  CHECK(turns_jsonl(generate_corpus(o)) == turns_jsonl(generate_corpus(o)));
  o.seed = 2;
  const auto other = turns_jsonl(generate_corpus(o));
  o.seed = 1;
  CHECK(other != turns_jsonl(generate_corpus(o)));
}

TEST_CASE("corpus options are validated") {
  CorpusOptions o;
  o.facts = 0;
  CHECK(error_code_of([&] { generate_corpus(o); }) == ErrorCode::kInvalidArgument);
  o = {};
  o.ack_rate = 1.5;
  CHECK(error_code_of([&] { generate_corpus(o); }) == ErrorCode::kInvalidArgument);
  o = {};
  o.contradictions = o.facts + 1;
  CHECK(error_code_of([&] { generate_corpus(o); }) == ErrorCode::kInvalidArgument);
}
