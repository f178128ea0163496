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
#include <algorithm>
#include <filesystem>
#include <thread>

#include "doctest.h"
#include "engram/corpus.hpp"
#include "engram/engine.hpp"
#include "test_util.hpp"

using namespace engram;
using engram::testing::error_code_of;
using engram::testing::kAck;
using engram::testing::kAnswer;
using engram::testing::kQuestion;

namespace {

namespace fs = std::filesystem;

constexpr Timestamp kT0{1'700'000'000};

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

EngineConfig persistent_config(const fs::path& dir) {
  EngineConfig c;
  c.service.data_dir = dir;
  return c;
}

std::multiset<std::string> contents(const MemoryEngine& e, const std::string& space) {
  return e.inspect(space, [](const MemorySpace& sp) {
    std::multiset<std::string> out;
    for (const auto& u : sp.units()) out.insert(u.content);
    return out;
  });
}

}  // namespace

TEST_CASE("ingest then query returns the fact above the score floor") {
  MemoryEngine e{EngineConfig{}};
  const auto r = e.ingest("s", {"The warranty period of Velorin is 3 years.", "assistant", kT0});
  CHECK(r.units.size() == 1);
  CHECK(r.turn == 0);
  e.ingest("s", {"The price of Tamurio is $45.", "assistant", kT0 + 60});
  QueryRequest q;
  q.text = "What is the warranty period of Velorin?";
  q.ts = kT0 + 120;
  const auto res = e.query("s", q);
  REQUIRE(!res.hits.empty());
  CHECK(res.hits[0].unit == r.units[0]);
  CHECK(res.hits[0].score >= e.config().retrieval.score_floor);
  REQUIRE(res.hits[0].fact);
  CHECK(res.hits[0].fact->value == "3 years");
  // the access was recorded
  e.inspect("s", [&](const MemorySpace& sp) { CHECK(sp.unit(r.units[0]).trace.total_count == 2); });
}

TEST_CASE("unknown spaces and bad requests") {
  MemoryEngine e{EngineConfig{}};
  QueryRequest q;
  q.text = "anything";
  CHECK(error_code_of([&] { e.query("missing", q); }) == ErrorCode::kSpaceUnknown);
  CHECK(error_code_of([&] { e.stats("missing"); }) == ErrorCode::kSpaceUnknown);
  CHECK(error_code_of([&] { e.ingest("s", {"   ", "user", kT0}); }) == ErrorCode::kEmptyUtterance);
  CHECK(error_code_of([&] { e.ingest("../etc", {"Hello there.", "user", kT0}); }) == ErrorCode::kInvalidArgument);
  e.ingest("s", {"The price of Tamurio is $45.", "assistant", kT0});
  q.k = 0;
  CHECK(error_code_of([&] { e.query("s", q); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("generation counts committed mutations") {
  MemoryEngine e{EngineConfig{}};
  CHECK(e.generation() == 0);
  e.ingest("s", {"The price of Tamurio is $45.", "assistant", kT0});
  CHECK(e.generation() == 1);
  QueryRequest q;
  q.text = "price of Tamurio";
  q.ts = kT0 + 10;
  q.record_access = false;
  e.query("s", q);
  CHECK(e.generation() == 1);
}

TEST_CASE("maintenance reduces the warranty dialogue; dry runs leave the store alone") {
  MemoryEngine e{EngineConfig{}};
  Timestamp t = kT0;
  for (int round = 0; round < 3; ++round) {
    for (const auto& text : {kQuestion, kAnswer, kAck}) e.ingest("s", {text, "user", t = t + 60});
  }
  const std::string before = e.export_space("s");
  MaintainRequest m;
  m.passes = {Pass::kReflect};
  m.ts = t + 60;
  m.dry_run = true;
  const auto dry = e.maintain("s", m);
  CHECK(e.export_space("s") == before);
  m.dry_run = false;
  const auto real = e.maintain("s", m);
  REQUIRE(dry.reflect);
  REQUIRE(real.reflect);
  CHECK(dry.reflect->prune.units_merged == real.reflect->prune.units_merged);
  const auto st = e.stats("s");
  CHECK(st.units_by_state.at("soft_deleted") >= 3);
  CHECK(st.generation == 1);
  CHECK(st.last_reflection == t + 60);
}

TEST_CASE("export and import are byte-stable") {
  MemoryEngine a{EngineConfig{}};
  CorpusOptions o;
  o.facts = 20;
  o.dup = 2;
  o.ack_rate = 0.5;
  for (const auto& turn : generate_corpus(o).turns) a.ingest("s", {turn.utterance, turn.speaker, turn.ts});
  MaintainRequest m;
  m.passes = {Pass::kPrune};
  m.ts = kT0 + kDay;
  a.maintain("s", m);
  const std::string dump = a.export_space("s");

  MemoryEngine b{EngineConfig{}};
  CHECK(b.import_space(dump) == "s");
  CHECK(b.export_space("s") == dump);
  // and the imported store answers like the original
  QueryRequest q;
  q.text = "What is the price of something?";
  q.ts = kT0 + 2 * kDay;
  q.record_access = false;
  const auto ha = a.query("s", q).hits;
  const auto hb = b.query("s", q).hits;
  REQUIRE(ha.size() == hb.size());
  for (std::size_t i = 0; i < ha.size(); ++i) {
    CHECK(ha[i].unit == hb[i].unit);
    CHECK(ha[i].score == hb[i].score);
  }
  CHECK(error_code_of([&] { b.import_space("{\"type\":\"unit\"}\n"); }) == ErrorCode::kCorruptSnapshot);
  CHECK(error_code_of([&] { b.import_space("not json\n"); }) == ErrorCode::kCorruptSnapshot);
}

TEST_CASE("purge needs confirmation and only removes soft-deleted units") {
  MemoryEngine e{EngineConfig{}};
  e.ingest("s", {"The price of Tamurio is $45.", "assistant", kT0});
  e.ingest("s", {"Okay, I understand.", "user", kT0 + 60});
  MaintainRequest m;
  m.passes = {Pass::kPrune};
  m.ts = kT0 + 120;
  e.maintain("s", m);
  CHECK(e.stats("s").units_by_state.at("soft_deleted") == 1);
  CHECK(error_code_of([&] { e.purge("s", false); }) == ErrorCode::kInvalidArgument);
  CHECK(e.stats("s").units == 2);
  CHECK(e.purge("s", true) == 1);
  CHECK(e.stats("s").units == 1);
  CHECK(e.stats("s").units_by_state.at("active") == 1);
}

TEST_CASE("a persistent engine reloads its spaces and agents") {
  TempDir dir("engram_engine_persist");
  std::string dump;
  {
    MemoryEngine e(persistent_config(dir.path), true);
    e.ingest("s", {"The price of Tamurio is $45.", "assistant", kT0});
    e.ingest("s", {"The warranty period of Velorin is 3 years.", "assistant", kT0 + 60});
    QueryRequest q;
    q.text = "What is the price of Tamurio?";
    q.ts = kT0 + 120;
    e.query("s", q);
    e.register_agent({"support", {"after_sales"}, {"query"}, "support-space"});
    dump = e.export_space("s");
  }
  MemoryEngine again(persistent_config(dir.path), true);
  CHECK(again.export_space("s") == dump);
  REQUIRE(again.agents().size() == 1);
  CHECK(again.agents()[0].space_id == "support-space");
  CHECK(again.has_space("support-space"));

  MaintainRequest m;
  m.passes = {Pass::kForget};
  m.ts = kT0 + 30 * kDay;
  again.maintain("s", m);
  const std::string after = again.export_space("s");
  MemoryEngine third(persistent_config(dir.path), true);
  CHECK(third.export_space("s") == after);
}

TEST_CASE("share and apply through the engine") {
  MemoryEngine e{EngineConfig{}};
  e.register_agent({"sales", {"billing"}, {"query"}, "sales-space"});
  e.register_agent({"support", {"after_sales", "billing"}, {"query"}, "support-space"});
  CHECK_THROWS_AS(e.register_agent({"sales", {}, {}, "x"}), Error);
  e.ingest("sales-space", {"The price of Tamurio is $45.", "assistant", kT0});
  const auto env = e.share({"sales", {"billing"}, {}, kT0 + 60});
  CHECK(env.summary_units.size() == 1);
  const auto report = e.apply({env, "support", kT0 + 120});
  CHECK(report.accepted.size() == 1);
  CHECK(e.apply({env, "support", kT0 + 180}).already_applied);
  CHECK(e.route({"after_sales"}) == "support");
  CHECK(error_code_of([&] { e.share({"nobody", {"billing"}, {}, kT0}); }) == ErrorCode::kUnknownAgent);
}

TEST_CASE("concurrent ingest equals some sequential order") {
  CorpusOptions o;
  o.facts = 40;
  o.dup = 2;
  o.ack_rate = 0.3;
  const Corpus c = generate_corpus(o);

  MemoryEngine sequential{EngineConfig{}};
  for (const auto& t : c.turns) sequential.ingest("s", {t.utterance, t.speaker, t.ts});

  MemoryEngine concurrent{EngineConfig{}};
  std::vector<std::thread> pool;
  const std::size_t threads = 4;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < c.turns.size(); i += threads) {
        const auto& t = c.turns[i];
        concurrent.ingest("s", {t.utterance, t.speaker, t.ts});
        QueryRequest q;
        q.text = t.utterance;
        q.ts = t.ts;
        q.record_access = false;
        concurrent.query("s", q);
      }
    });
  }
  for (auto& th : pool) th.join();

  CHECK(contents(concurrent, "s") == contents(sequential, "s"));
  const auto sa = sequential.stats("s");
  const auto sb = concurrent.stats("s");
  CHECK(sa.units == sb.units);
  CHECK(sa.nodes == sb.nodes);
  CHECK(sa.turns == sb.turns);
  CHECK(sa.fact_keys == sb.fact_keys);
  concurrent.inspect("s", [](const MemorySpace& sp) {
    std::set<std::int64_t> turns;
    for (const auto& u : sp.units()) turns.insert(u.provenance.front().turn);
    CHECK(turns.size() == sp.size());  // one unit per turn, none lost or doubled
  });
}
