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

#include <filesystem>
#include <fstream>
#include <random>

#include "engram/error.hpp"
#include "engram/graphstore.hpp"
#include "engram/json_io.hpp"
#include "test_util.hpp"

using namespace engram;
using engram::testing::make_unit;
using engram::testing::units_from;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("engram_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("upsert is idempotent on identical content and merges provenance") {
  MemorySpace s("s");
  auto a = make_unit("alice owns a bike", Timestamp{10}, {{"alice", "owns", "bike"}});
  auto b = a;
  b.provenance = {SourceRef{"other", 3}};
  const UnitId ia = s.upsert_unit(a);
  const UnitId ib = s.upsert_unit(b);
  CHECK(ia == ib);
  CHECK(s.unit(ia).provenance.size() == 2);
  CHECK(s.size() == 1);
}

TEST_CASE("relations become nodes and a labelled edge") {
  MemorySpace s("s");
  s.insert_unit(make_unit("alice owns bike", Timestamp{1}, {{"alice", "owns", "bike"}}));
  const auto a = s.resolve("alice");
  const auto b = s.resolve("bike");
  REQUIRE(a);
  REQUIRE(b);
  REQUIRE(s.edges().size() == 1);
  CHECK(s.edges()[0].head == *a);
  CHECK(s.edges()[0].tail == *b);
  CHECK(s.edges()[0].relation_label == "owns");
  CHECK(s.edges()[0].validity == EdgeValidity::kValid);
}

TEST_CASE("bulk insert assigns distinct ids") {
  MemorySpace s("s");
  std::set<UnitId> ids;
  for (int i = 0; i < 1000; ++i) {
    ids.insert(s.insert_unit(make_unit("fact number " + std::to_string(i), Timestamp{i})));
  }
  CHECK(ids.size() == 1000);
}

TEST_CASE("invalid units are rejected") {
  MemorySpace s("s");
  auto u = make_unit("x", Timestamp{1});
  u.provenance.clear();
  CHECK_THROWS_AS(s.insert_unit(u), Error);
  u = make_unit("x", Timestamp{1});
  u.embedding.resize(10);
  CHECK_THROWS_AS(s.insert_unit(u), Error);
  GraphStore store;
  u = make_unit("x", Timestamp{1});
  u.space_id = "nope";
  CHECK_THROWS_AS(store.upsert_unit(u), Error);
}

TEST_CASE("functional relations: latest wins") {
  MemorySpace s("s");
  s.insert_unit(make_unit("user lives_in = paris", Timestamp{100}, {{"user", "lives_in", "paris"}}));
  s.insert_unit(make_unit("user lives_in = berlin", Timestamp{200}, {{"user", "lives_in", "berlin"}}));
  s.insert_unit(make_unit("user visited = rome", Timestamp{100}, {{"user", "visited", "rome"}}));
  s.insert_unit(make_unit("user visited = oslo", Timestamp{200}, {{"user", "visited", "oslo"}}));
  const auto failed = s.detect_failed_edges(Timestamp{300});
  REQUIRE(failed.size() == 1);
  const auto& e = s.edge(failed[0]);
  CHECK(s.node(e.tail).label == "paris");
  CHECK(e.strength == 0.0);
  CHECK(s.detect_failed_edges(Timestamp{300}).empty());

  // Moving back revalidates the old edge and fails the newer one.
  s.insert_unit(make_unit("user lives_in = paris again", Timestamp{400}, {{"user", "lives_in", "paris"}}));
  CHECK(s.edge(failed[0]).validity == EdgeValidity::kValid);
  const auto again = s.detect_failed_edges(Timestamp{500});
  REQUIRE(again.size() == 1);
  CHECK(s.node(s.edge(again[0]).tail).label == "berlin");
}

TEST_CASE("incremental failure detection matches the full scan") {
  std::mt19937 rng(7);
  const std::vector<std::string> heads = {"user", "alice", "bob"};
  const std::vector<std::string> labels = {"lives_in", "visited", "works_at"};
  const std::vector<std::string> tails = {"paris", "berlin", "rome", "oslo"};
  MemorySpace inc("inc");
  MemorySpace full("full");
  for (int i = 0; i < 300; ++i) {
    const auto& h = heads[rng() % heads.size()];
    const auto& l = labels[rng() % labels.size()];
    const auto& t = tails[rng() % tails.size()];
    const auto u = make_unit(h + " " + l + " = " + t + " #" + std::to_string(i), Timestamp{100 + i}, {{h, l, t}});
    const UnitId id = inc.insert_unit(u);
    full.insert_unit(u);
    const std::vector<UnitId> fresh = {id};
    CHECK(inc.detect_failed_edges(Timestamp{100 + i}, fresh) == full.detect_failed_edges(Timestamp{100 + i}));
  }
  REQUIRE(inc.edges().size() == full.edges().size());
  for (std::size_t i = 0; i < inc.edges().size(); ++i) {
    CHECK(inc.edges()[i].validity == full.edges()[i].validity);
  }
}

TEST_CASE("edges whose sources are all soft-deleted fail") {
  MemorySpace s("s");
  const UnitId id = s.insert_unit(make_unit("alice owns bike", Timestamp{1}, {{"alice", "owns", "bike"}}));
  s.retire_unit(id, LifecycleState::kSoftDeleted, Timestamp{2});
  CHECK(s.detect_failed_edges(Timestamp{3}).size() == 1);
}

TEST_CASE("node merging") {
  MemorySpace s("s");
  s.insert_unit(make_unit("a", Timestamp{1}, {}, {"nyc"}));
  s.insert_unit(make_unit("b", Timestamp{2}, {{"nyc", "has", "subway"}}));
  // Identical labels collapse to one node on insertion already.
  CHECK(s.nodes().size() == 2);

  s.insert_unit(make_unit("c", Timestamp{3}, {{"new york city", "has", "subway"}}));
  s.insert_unit(make_unit("d", Timestamp{4}, {{"new york city.", "has", "subway"}}));
  const auto before = s.nodes().size();
  const auto actions = s.merge_similar_nodes(0.85, testing::embedder());
  REQUIRE(actions.size() == 1);
  CHECK(s.node(actions[0].survivor).label == "new york city");
  CHECK(s.nodes().size() == before - 1);
  CHECK(s.resolve("new york city.") == actions[0].survivor);
  // Parallel edges folded into one with both sources.
  int has_edges = 0;
  for (const auto& e : s.edges()) {
    if (e.head == actions[0].survivor) {
      ++has_edges;
      CHECK(e.sources.size() == 2);
    }
  }
  CHECK(has_edges == 1);
  CHECK(s.merge_similar_nodes(0.85, testing::embedder()).empty());
  CHECK_THROWS_AS(s.merge_similar_nodes(0.0, testing::embedder()), Error);
}

TEST_CASE("alias spellings collapse to one node per entity") {
  // Fixture and threshold from tools/oracles/alias_table.py: alias pairs have
  // similarity >= 0.7746, distinct entities <= 0.6528.
  constexpr double kAliasThreshold = 0.71;
  std::ifstream in(ENGRAM_TEST_DATA_DIR "/golden/alias_labels.tsv");
  REQUIRE(in);
  MemorySpace s("s");
  std::map<std::string, int> entity_of;
  std::string row;
  Timestamp t{1};
  while (std::getline(in, row)) {
    if (row.empty() || row[0] == '#') continue;
    const auto tab = row.find('\t');
    const std::string label = row.substr(tab + 1);
    entity_of[label] = std::stoi(row.substr(0, tab));
    s.insert_unit(make_unit("mention of " + label, t, {}, {label}));
    t = t + 1;
  }
  const std::size_t entities = 60;
  CHECK(s.nodes().size() == entity_of.size());
  s.merge_similar_nodes(kAliasThreshold, testing::embedder());
  CHECK(s.nodes().size() == entities);
  for (const auto& [label, entity] : entity_of) {
    const auto node = s.resolve(label);
    REQUIRE(node);
    // Every spelling resolves to the node of its own entity.
    const std::string& survivor = s.node(*node).label;
    CHECK(entity_of.at(survivor) == entity);
  }
  CHECK(s.merge_similar_nodes(kAliasThreshold, testing::embedder()).empty());
}

TEST_CASE("snapshot round trip, journal replay and corruption") {
  const auto dir = scratch_dir("snapshot");
  MemorySpace s("s");
  save_snapshot(s, dir);
  CHECK(load_snapshot(dir).same_contents(s));

  for (const char* text : {"I live in Paris.", "The warranty is 1-year free.", "Alice works at Acme."}) {
    for (auto& u : units_from(text, Timestamp{s.turn_count() * 100 + 1}, text, s.next_turn())) {
      s.insert_unit(std::move(u));
    }
  }
  s.take_changes();
  save_snapshot(s, dir);
  CHECK(load_snapshot(dir).same_contents(s));

  // Journal carries later mutations.
  for (auto& u : units_from("I live in Berlin.", Timestamp{1000}, "late", s.next_turn())) {
    s.insert_unit(std::move(u));
  }
  s.detect_failed_edges(Timestamp{1001});
  append_journal(s, s.take_changes(), dir);
  const UnitId first = s.units().front().id;
  s.remove_unit(first);
  append_journal(s, s.take_changes(), dir);
  CHECK(load_snapshot(dir).same_contents(s));

  // A torn final journal line is ignored.
  {
    std::ofstream j(dir / "journal.jsonl", std::ios::app);
    j << "{\"epoch\": 1, \"op\": \"upsert\", \"type\": \"unit\", \"da";
  }
  CHECK(load_snapshot(dir).same_contents(s));

  // Tampered records fail the checksum.
  const Json manifest = Json::parse(std::ifstream(dir / "manifest.json"));
  const auto records = dir / manifest["records_file"].get<std::string>();
  {
    std::ofstream r(records, std::ios::app);
    r << "\n";
  }
  CHECK_THROWS_AS(load_snapshot(dir), Error);
  std::filesystem::resize_file(records, 10);
  try {
    load_snapshot(dir);
    FAIL("expected CorruptSnapshot");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kCorruptSnapshot);
  }
}

TEST_CASE("unsupported snapshot versions are rejected") {
  const auto dir = scratch_dir("version");
  save_snapshot(MemorySpace("s"), dir);
  Json manifest = Json::parse(std::ifstream(dir / "manifest.json"));
  manifest["version"] = 99;
  std::ofstream(dir / "manifest.json") << manifest.dump();
  try {
    load_snapshot(dir);
    FAIL("expected VersionUnsupported");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kVersionUnsupported);
  }
}

TEST_CASE("merge_unit_into unions provenance and retires the source") {
  MemorySpace s("s");
  const UnitId a = s.insert_unit(make_unit("warranty = 1 year", Timestamp{1}, {}, {"warranty"}));
  const UnitId b = s.insert_unit(make_unit("warranty = 1 year.", Timestamp{5}, {}, {"warranty"}));
  s.merge_unit_into(b, a, Timestamp{6});
  CHECK(s.unit(a).provenance.size() == 2);
  CHECK(s.unit(a).trace.total_count == 2);
  CHECK(s.unit(b).state == LifecycleState::kSoftDeleted);
  CHECK(s.unit(b).superseded_by == a);
  CHECK(s.node(*s.resolve("warranty")).unit_refs == std::set<UnitId>{a});
}
