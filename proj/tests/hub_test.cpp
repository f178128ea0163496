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

#include <map>
#include <random>

#include "doctest.h"
#include "engram/api_json.hpp"
#include "engram/hub.hpp"
#include "engram/retrieve.hpp"
#include "test_util.hpp"

using namespace engram;
using engram::testing::embedder;
using engram::testing::error_code_of;
using engram::testing::units_from;

namespace {

constexpr Timestamp kT0{1'700'000'000};

AgentProfile profile(const std::string& id, TagSet domain, const std::string& space) {
  return AgentProfile{id, std::move(domain), {"query"}, space};
}

// Space whose units come from the default pipeline.
struct Agent {
  MemorySpace space;
  Timestamp clock = kT0;

  explicit Agent(std::string id) : space(std::move(id)) {}

  std::vector<UnitId> say(const std::string& text, Duration step = 60) {
    clock = clock + step;
    const auto turn = space.next_turn();
    std::vector<UnitId> ids;
    for (auto& u : units_from(text, clock, "t" + std::to_string(turn), turn)) {
      u.space_id = space.id();
      ids.push_back(space.insert_unit(std::move(u)));
    }
    return ids;
  }
};

MemoryHub two_agent_hub() {
  MemoryHub hub;
  hub.register_agent(profile("sales", {"after_sales", "billing"}, "sales-space"));
  hub.register_agent(profile("support", {"support", "account"}, "support-space"));
  return hub;
}

}  // namespace

TEST_CASE("hub: registration") {
  MemoryHub hub;
  CHECK(error_code_of([&] { hub.route({"billing"}); }) == ErrorCode::kNoAgents);
  hub.register_agent(profile("sales", {"billing"}, "s"));
  CHECK(hub.route({"billing"}) == "sales");
  CHECK(error_code_of([&] { hub.register_agent(profile("sales", {"orders"}, "t")); }) == ErrorCode::kDuplicateAgent);
  CHECK(error_code_of([&] { hub.register_agent(profile("empty", {}, "t")); }) == ErrorCode::kInvalidArgument);
  CHECK(error_code_of([&] { hub.agent("nobody"); }) == ErrorCode::kUnknownAgent);
}

TEST_CASE("hub: routing") {
  const MemoryHub hub = two_agent_hub();
  // Disjoint domains partition requests exactly.
  for (const auto& [id, a] : hub.agents()) {
    for (const auto& tag : a.responsibility_domain) CHECK(hub.route({tag}) == id);
    CHECK(hub.route(a.responsibility_domain) == id);
  }
  CHECK(hub.route({"weather"}) == "sales");            // no overlap: lowest id
  CHECK(hub.route({"billing", "support"}) == "sales");  // 1/3 each: lowest id
  CHECK(hub.route({"support", "account", "billing"}) == "support");
  CHECK(hub.route({}) == "sales");
}

TEST_CASE("hub: one summary per fact key") {
  MemoryHub hub = two_agent_hub();
  Agent a("sales-space");
  a.say("The warranty of Kovalen is 1 year.");
  a.say("The warranty of Kovalen is 2 years.");
  const auto newest = a.say("The warranty of Kovalen is 3 years.").at(0);
  const auto env = hub.summarize_for_share("sales", a.space, {"after_sales"}, {}, a.clock, embedder());
  REQUIRE(env.summary_units.size() == 1);
  const auto& s = env.summary_units[0];
  CHECK(s.fact_key == "warranty of kovalen");
  CHECK(s.value == "3 years");
  CHECK(s.text == "warranty of kovalen = 3 years");
  CHECK(s.asserted_at == a.space.unit(newest).created_at);
  CHECK(s.origin_refs.size() == 3);
  CHECK(env.valid_until == a.clock + kDay);
  CHECK(env.envelope_id == envelope_digest(env));
  CHECK(env.schema == "engram.envelope/1");

  CHECK(error_code_of([&] { hub.summarize_for_share("support", a.space, {"after_sales"}, {}, a.clock, embedder()); }) ==
        ErrorCode::kPermissionDenied);
  CHECK(error_code_of([&] { hub.summarize_for_share("sales", a.space, {"health"}, {}, a.clock, embedder()); }) ==
        ErrorCode::kEmptySelection);
}

TEST_CASE("hub: private units are never selected") {
  MemoryHub hub = two_agent_hub();
  Agent a("sales-space");
  a.say("This is confidential: the price of Kovalen is $40.");
  a.say("Keep it private, the discount for Brisko is 20%.");
  for (const auto& u : a.space.units()) CHECK(u.has_tag(kPrivateTag));
  CHECK(error_code_of([&] { hub.summarize_for_share("sales", a.space, {"billing"}, {}, a.clock, embedder()); }) ==
        ErrorCode::kEmptySelection);
}

TEST_CASE("hub: envelope JSON round trip") {
  MemoryHub hub = two_agent_hub();
  Agent a("sales-space");
  a.say("The warranty of Kovalen is 2 years.");
  a.say("The price of Kovalen is $40.");
  const auto env = hub.summarize_for_share("sales", a.space, {"after_sales", "billing"},
                                           {SharePermission::kDomainRestricted, {"support"}}, a.clock, embedder());
  const Json j = env;
  const auto back = j.get<ShareEnvelope>();
  CHECK(back == env);
  CHECK(envelope_digest(back) == env.envelope_id);
}

TEST_CASE("hub: apply_shared") {
  MemoryHub hub = two_agent_hub();
  Agent a("sales-space");
  a.say("The warranty of Kovalen is 2 years.");
  a.say("The price of Kovalen is $40.");
  const auto env = hub.summarize_for_share("sales", a.space, {"after_sales", "billing"}, {}, a.clock, embedder());
  REQUIRE(env.summary_units.size() == 2);

  SUBCASE("fresh envelope into an empty space") {
    MemorySpace b("support-space");
    const auto report = hub.apply_shared(env, "support", b, a.clock + kHour, embedder());
    CHECK(report.accepted.size() == 2);
    CHECK(report.rejected_conflict.empty());
    CHECK(b.size() == 2);
    for (const auto& u : b.units()) {
      CHECK(u.speaker == "sales");
      CHECK_FALSE(u.provenance.empty());
      CHECK(u.provenance[0].id.starts_with("sales-space:"));
    }
    CHECK(b.resolve("kovalen").has_value());

    const auto again = hub.apply_shared(env, "support", b, a.clock + 2 * kHour, embedder());
    CHECK(again.already_applied);
    CHECK(again.accepted.empty());
    CHECK(b.size() == 2);
  }
  SUBCASE("newer local value wins") {
    Agent b("support-space");
    b.clock = a.clock + kDay;
    b.say("The price of Kovalen is $45.");
    const auto report = hub.apply_shared(env, "support", b.space, a.clock + 2 * kHour, embedder());
    CHECK(report.rejected_conflict == std::vector<std::string>{"price of kovalen"});
    CHECK(report.accepted.size() == 1);
  }
  SUBCASE("expired envelope") {
    MemorySpace b("support-space");
    const auto report = hub.apply_shared(env, "support", b, env.valid_until + 1, embedder());
    CHECK(report.rejected_expired == 2);
    CHECK(report.accepted.empty());
    CHECK(b.size() == 0);
    // Exactly at the deadline it is still valid.
    CHECK(hub.apply_shared(env, "support", b, env.valid_until, embedder()).accepted.size() == 2);
  }
  SUBCASE("permissions") {
    MemorySpace b("support-space");
    auto priv = hub.summarize_for_share("sales", a.space, {"billing"}, {SharePermission::kPrivate, {}}, a.clock,
                                        embedder());
    CHECK(error_code_of([&] { hub.apply_shared(priv, "support", b, a.clock, embedder()); }) ==
          ErrorCode::kPermissionDenied);
    auto restricted = hub.summarize_for_share("sales", a.space, {"billing"},
                                              {SharePermission::kDomainRestricted, {"orders"}}, a.clock, embedder());
    CHECK(error_code_of([&] { hub.apply_shared(restricted, "support", b, a.clock, embedder()); }) ==
          ErrorCode::kPermissionDenied);
    auto allowed = hub.summarize_for_share("sales", a.space, {"billing"},
                                           {SharePermission::kDomainRestricted, {"account"}}, a.clock, embedder());
    CHECK(hub.apply_shared(allowed, "support", b, a.clock, embedder()).accepted.size() == 1);
    MemorySpace other("elsewhere");
    CHECK(error_code_of([&] { hub.apply_shared(env, "support", other, a.clock, embedder()); }) ==
          ErrorCode::kPermissionDenied);
  }
  SUBCASE("tampered envelope") {
    MemorySpace b("support-space");
    auto bad = env;
    bad.summary_units[0].value = "forever";
    CHECK(error_code_of([&] { hub.apply_shared(bad, "support", b, a.clock, embedder()); }) ==
          ErrorCode::kInvalidArgument);
  }
}

TEST_CASE("property: envelopes match a brute-force oracle, leak nothing private and stay small") {
  const std::vector<std::string> products = {"Kovalen", "Brisko", "Tamrel", "Odessi"};
  const std::vector<std::string> attrs = {"warranty", "price", "return window", "support tier", "home city"};
  const std::vector<std::string> topics = {"after_sales", "billing", "support", "profile"};
  MemoryHub hub;
  hub.register_agent(profile("a", {"after_sales"}, "space-a"));
  for (unsigned seed = 1; seed <= 25; ++seed) {
    CAPTURE(seed);
    std::mt19937 rng(seed);
    Agent agent("space-a");
    for (int i = 0; i < 30; ++i) {
      std::string line = "The " + attrs[rng() % attrs.size()] + " of " + products[rng() % products.size()] + " is " +
                         std::to_string(1 + rng() % 5) + " units.";
      if (rng() % 4 == 0) line = "Keep this private: " + line;
      for (UnitId id : agent.say(line, static_cast<Duration>(rng() % kDay))) {
        if (rng() % 6 == 0) agent.space.retire_unit(id, LifecycleState::kSoftDeleted, agent.clock);
      }
    }
    TagSet topic;
    for (const auto& t : topics) {
      if (rng() % 2) topic.insert(t);
    }

    // Oracle: filter, group by key, newest value.
    std::map<std::string, std::pair<const MemoryUnit*, std::vector<std::string>>> oracle;
    std::size_t underlying_tokens = 0;
    for (const auto& u : agent.space.units()) {
      bool on_topic = false;
      for (const auto& t : u.preference_tags) on_topic = on_topic || topic.count(t);
      if (u.state != LifecycleState::kActive || u.has_tag("private") || u.anchors.facts.empty() || !on_topic) continue;
      auto& [newest, refs] = oracle[u.anchors.facts[0].key];
      if (!newest || std::tie(u.created_at, u.id) > std::tie(newest->created_at, newest->id)) newest = &u;
      refs.push_back("space-a:" + std::to_string(u.id.value));
      underlying_tokens += count_tokens(u.content);
    }

    if (oracle.empty()) {
      CHECK(error_code_of([&] { hub.summarize_for_share("a", agent.space, topic, {}, agent.clock, embedder()); }) ==
            ErrorCode::kEmptySelection);
      continue;
    }
    const auto env = hub.summarize_for_share("a", agent.space, topic, {}, agent.clock, embedder());
    REQUIRE(env.summary_units.size() == oracle.size());
    std::size_t envelope_tokens = 0;
    for (const auto& s : env.summary_units) {
      REQUIRE(oracle.count(s.fact_key));
      const auto& [newest, refs] = oracle.at(s.fact_key);
      CHECK(s.value == newest->anchors.facts[0].value);
      CHECK(s.origin_refs == refs);
      envelope_tokens += count_tokens(s.text);
      for (const auto& ref : s.origin_refs) {
        const auto id = UnitId{std::stoull(ref.substr(ref.find(':') + 1))};
        CHECK_FALSE(agent.space.unit(id).has_tag(kPrivateTag));
      }
    }
    CHECK(envelope_tokens <= underlying_tokens);
  }
}

TEST_CASE("property: shared topics retrieve the same fact keys in both spaces") {
  MemoryHub hub = two_agent_hub();
  Agent a("sales-space");
  a.say("The warranty of Kovalen is 2 years.");
  a.say("The warranty of Kovalen is 2 years.");
  a.say("The return window of Kovalen is 30 days.");
  a.say("The repair of Brisko takes 5 days.");
  a.say("The warranty of Brisko is 1 year.");
  const auto env = hub.summarize_for_share("sales", a.space, {"after_sales"}, {}, a.clock, embedder());
  MemorySpace b("support-space");
  hub.apply_shared(env, "support", b, a.clock, embedder());

  auto keys = [&](const MemorySpace& space, const std::string& text) {
    const auto q = make_query(space, text, {"after_sales"}, engram::testing::annotator(), embedder());
    std::set<std::string> out;
    for (const auto& h : retrieve_topk(space, q, space.size(), a.clock + kHour, ScoreWeights{}, ActivationParams{})) {
      for (const auto& f : space.unit(h.unit).anchors.facts) out.insert(f.key);
    }
    return out;
  };
  for (const std::string text : {"warranty of Kovalen", "after-sales service", "Brisko repair"}) {
    CAPTURE(text);
    CHECK(keys(a.space, text) == keys(b, text));
  }
}
