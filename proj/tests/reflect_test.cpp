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

#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "engram/reflect.hpp"
#include "engram/retrieve.hpp"
#include "test_util.hpp"

using namespace engram;
using engram::testing::Dialogue;
using engram::testing::embedder;
using engram::testing::error_code_of;
using engram::testing::make_unit;
using engram::testing::Warranty;

namespace {

const MaintenanceSettings kSettings;
const ReflectConfig kCfg;
constexpr Timestamp kT0{1'700'000'000};

MemoryUnit fact_unit(const std::string& key, const std::string& value, TemporalClass tc, Timestamp at,
                     std::int64_t turn) {
  auto u = make_unit(key + " = " + value, at);
  u.anchors.facts.push_back({key, value, "plans", key + " = " + value});
  u.anchors.temporal_class = tc;
  u.provenance = {{"t" + std::to_string(turn), turn}};
  return u;
}

class FailingEmbedder final : public Embedder {
 public:
  std::size_t dimension() const override { return kDefaultDimension; }
  Embedding embed(std::string_view) const override { throw Error(ErrorCode::kIo, "embedding backend down"); }
};

}  // namespace

TEST_CASE("temporal: monotone store has no findings") {
  Dialogue d;
  d.say("I live in Paris.");
  d.say("I will visit Rome next week.");
  d.say("Marta Ibsen works at Orlando Labs.");
  CHECK(reflect_temporal(d.space).empty());
}

TEST_CASE("temporal: creation order disagrees with dialogue order") {
  MemorySpace space("s");
  auto a = make_unit("first said", kT0 + 100);
  a.provenance = {{"u1", 1}};
  auto b = make_unit("second said", kT0);
  b.provenance = {{"u2", 2}};
  const auto ia = space.insert_unit(std::move(a));
  const auto ib = space.insert_unit(std::move(b));
  const auto findings = reflect_temporal(space);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].kind == TemporalFinding::Kind::kOrdering);
  CHECK(findings[0].unit == ib);
  CHECK(findings[0].reference == ia);
}

TEST_CASE("temporal: three-event chain with one inversion") {
  MemorySpace space("s");
  space.insert_unit(fact_unit("trip to rome", "booked", TemporalClass::kFuture, kT0, 1));
  const auto past = space.insert_unit(fact_unit("trip to rome", "done", TemporalClass::kPast, kT0 + kDay, 2));
  const auto again = space.insert_unit(fact_unit("trip to rome", "soon", TemporalClass::kFuture, kT0 + 2 * kDay, 3));
  const auto findings = reflect_temporal(space);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].kind == TemporalFinding::Kind::kInversion);
  CHECK(findings[0].unit == again);
  CHECK(findings[0].reference == past);
}

TEST_CASE("factual: replacement outside the ambiguity window") {
  Dialogue d;
  const auto paris = d.say("I live in Paris.").at(0);
  const auto berlin = d.say("I live in Berlin.", 30 * kDay).at(0);
  const auto res = reflect_factual(d.space, d.clock, kCfg, embedder());
  REQUIRE(res.size() == 1);
  CHECK(res[0].kind == Resolution::Kind::kReplacement);
  CHECK(res[0].key == "user lives_in");
  CHECK(res[0].kept == berlin);
  CHECK(res[0].superseded == std::vector<UnitId>{paris});
  CHECK(d.space.unit(paris).state == LifecycleState::kCompressed);
  CHECK(d.space.unit(paris).superseded_by == berlin);
  CHECK(d.space.unit(berlin).state == LifecycleState::kActive);
  CHECK(reflect_factual(d.space, d.clock, kCfg, embedder()).empty());
}

TEST_CASE("factual: fusion inside the ambiguity window") {
  Dialogue d;
  const auto paris = d.say("I live in Paris.").at(0);
  const auto berlin = d.say("I live in Berlin.", 10).at(0);
  const auto res = reflect_factual(d.space, d.clock, kCfg, embedder());
  REQUIRE(res.size() == 1);
  CHECK(res[0].kind == Resolution::Kind::kFusion);
  const auto& kept = d.space.unit(berlin);
  CHECK(kept.conflict_unresolved);
  CHECK(kept.content == "user lives_in = paris / berlin");
  CHECK(kept.anchors.facts.size() == 2);
  CHECK(kept.provenance.size() == 2);
  CHECK(d.space.unit(paris).state == LifecycleState::kSoftDeleted);
  CHECK(d.space.unit(paris).superseded_by == berlin);
  CHECK(reflect_factual(d.space, d.clock, kCfg, embedder()).empty());
}

TEST_CASE("factual: no functional conflicts") {
  Dialogue d;
  d.say("I live in Paris.");
  d.say("I live in Paris.", kDay);
  d.say("My favorite color is blue.");
  d.say("My favorite color is red.", 30 * kDay);  // not a functional relation
  CHECK(reflect_factual(d.space, d.clock, kCfg, embedder()).empty());
}

TEST_CASE("logical: path reinforcement") {
  MemorySpace space("s");
  space.insert_unit(make_unit("a knows b", kT0, {{"ann", "knows", "bo"}}));
  space.insert_unit(make_unit("b knows c", kT0, {{"bo", "knows", "cy"}}));
  const EdgeId e1 = space.edges()[0].id;
  const EdgeId e2 = space.edges()[1].id;
  space.update_edge(e1, [](GraphEdge& e) { e.path_uses = 5; });
  space.update_edge(e2, [](GraphEdge& e) {
    e.strength = 9.8;
    e.path_uses = 3;
  });
  const auto out = reflect_logical(space, kCfg);
  REQUIRE(out.reinforced.size() == 2);
  CHECK(space.edge(e1).strength == doctest::Approx(1.5));
  CHECK(space.edge(e2).strength == 10.0);
  CHECK(space.edge(e1).path_uses == 0);
  CHECK(reflect_logical(space, kCfg).reinforced.empty());

  // Traversal counts come from retrieval.
  Query q;
  q.text = "ann";
  q.embedding = embedder().embed("ann");
  q.seeds = {*space.resolve("ann")};
  const auto hits = retrieve_topk(space, q, 2, kT0 + kHour, ScoreWeights{}, kSettings.activation);
  apply_accesses(space, hits, kT0 + kHour);
  const auto again = reflect_logical(space, kCfg);
  CHECK_FALSE(again.reinforced.empty());
}

TEST_CASE("logical: dangling chain and functional cycle") {
  MemorySpace space("s");
  space.insert_unit(make_unit("a to b", kT0, {{"ann", "knows", "bo"}}));
  space.insert_unit(make_unit("b to c", kT0, {{"bo", "knows", "cy"}}));
  space.update_edge(space.edges()[1].id, [](GraphEdge& e) { e.validity = EdgeValidity::kFailed; });
  auto out = reflect_logical(space, kCfg);
  CHECK(out.dangling == std::vector<NodeId>{*space.resolve("bo")});
  CHECK(out.functional_cycles.empty());

  space.insert_unit(make_unit("x reports to y", kT0, {{"xavi", "reports_to", "yuna"}}));
  space.insert_unit(make_unit("y reports to x", kT0, {{"yuna", "reports_to", "xavi"}}));
  out = reflect_logical(space, kCfg);
  REQUIRE(out.functional_cycles.size() == 1);
  CHECK(out.functional_cycles[0] == std::vector<NodeId>{*space.resolve("xavi"), *space.resolve("yuna")});
}

TEST_CASE("cycle: empty store") {
  MemorySpace space("s");
  const auto report = run_reflection_cycle(space, kT0, kSettings, embedder());
  CHECK_FALSE(report.mutated());
  CHECK(report.generation == 1);
  CHECK(space.generation() == 1);
  CHECK(space.last_reflection() == kT0);
}

TEST_CASE("cycle: warranty fixture merges the answers and is idempotent") {
  Warranty w;
  const auto keys = live_fact_keys(w.d.space);
  const auto report = run_reflection_cycle(w.d.space, w.d.clock, kSettings, embedder());
  CHECK(report.prune.units_merged == 4);
  CHECK(report.prune.units_removed == 3);
  CHECK(live_fact_keys(w.d.space) == keys);
  const auto second = run_reflection_cycle(w.d.space, w.d.clock, kSettings, embedder());
  CHECK_FALSE(second.mutated());
  CHECK(second.generation == report.generation + 1);
}

TEST_CASE("cycle: a failing pass leaves the space untouched") {
  Dialogue d;
  d.say("I live in Paris.");
  d.say("I live in Berlin.", 30 * kDay);
  const MemorySpace before = d.space;
  FailingEmbedder broken;
  CHECK(error_code_of([&] { run_reflection_cycle(d.space, d.clock, kSettings, broken); }) == ErrorCode::kIo);
  CHECK(d.space.same_contents(before));
  CHECK(d.space.generation() == 0);
}

TEST_CASE("cycle: feedback adjusts emotion weight") {
  namespace fs = std::filesystem;
  Dialogue d;
  const auto id = d.say("I live in Paris.").at(0);
  const fs::path file = fs::temp_directory_path() / "engram_feedback_test.jsonl";
  {
    std::ofstream out(file);
    out << "{\"unit_id\": " << id.value << ", \"delta\": 0.4}\n\n{\"unit_id\": 999, \"delta\": 0.1}\n";
  }
  const auto feedback = load_feedback(file);
  REQUIRE(feedback.size() == 2);
  const auto report = run_reflection_cycle(d.space, d.clock, kSettings, embedder(), feedback);
  CHECK(report.feedback_applied == std::vector<UnitId>{id});
  CHECK(report.feedback_unknown == std::vector<UnitId>{UnitId{999}});
  CHECK(d.space.unit(id).emotion_weight == doctest::Approx(0.4));

  {
    std::ofstream out(file);
    out << "{\"unit_id\": \"x\"}\n";
  }
  CHECK(error_code_of([&] { load_feedback(file); }) == ErrorCode::kInvalidArgument);
  fs::remove(file);
  CHECK(error_code_of([&] { load_feedback(file); }) == ErrorCode::kIo);
}

TEST_CASE("property: reflection keeps answerable facts and generations increase") {
  const std::vector<std::string> lines = {
      "I live in Paris.", "I live in Berlin.", "The warranty of Kovalen is 2 years.",
      "The warranty of Kovalen is 3 years.", "Okay, I understand.", "Marta Ibsen works at Orlando Labs.",
      "What is the warranty of Kovalen?", "Thanks!", "The sky looks grey."};
  for (unsigned seed = 1; seed <= 8; ++seed) {
    CAPTURE(seed);
    std::mt19937 rng(seed);
    Dialogue d;
    std::uint64_t generation = 0;
    for (int round = 0; round < 4; ++round) {
      for (int i = 0; i < 12; ++i) d.say(lines[rng() % lines.size()], static_cast<Duration>(rng() % (2 * kHour)));
      const auto keys = live_fact_keys(d.space);
      const auto report = run_reflection_cycle(d.space, d.clock, kSettings, embedder());
      CHECK(report.generation > generation);
      generation = report.generation;
      CHECK(live_fact_keys(d.space) == keys);
      CHECK_FALSE(run_reflection_cycle(d.space, d.clock, kSettings, embedder()).mutated());
      ++generation;
    }
  }
}
