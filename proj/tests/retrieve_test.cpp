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
#include <cmath>
#include <random>

#include "engram/error.hpp"
#include "engram/retrieve.hpp"
#include "test_util.hpp"

using namespace engram;
using engram::testing::make_unit;

namespace {

ScoreWeights weights(double s, double a, double p, double e) {
  ScoreWeights w;
  w.w_sim = s;
  w.w_act = a;
  w.w_pref = p;
  w.w_emo = e;
  return w;
}

NodeId node_of(const MemorySpace& s, const std::string& label) { return *s.resolve(label); }

// Independent scorer: plain formulas, long double, no shared helpers beyond
// the embedding vectors themselves.
long double oracle_score(const std::vector<float>& q, const MemoryUnit& u, Timestamp now,
                         const ScoreWeights& w, const TagSet& prefs, double boost) {
  long double dotp = 0, nq = 0, nu = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    dotp += (long double)q[i] * u.embedding[i];
    nq += (long double)q[i] * q[i];
    nu += (long double)u.embedding[i] * u.embedding[i];
  }
  const long double cosv = dotp / std::sqrt(nq * nu);
  long double sum = 0;
  for (Timestamp t : u.trace.recent) {
    const long double age = std::max<long double>(now.seconds - t.seconds, 1) / 86400.0L;
    sum += std::pow(age, -0.5L);
  }
  const long double act = 1.0L / (1.0L + std::exp(-std::log(sum)));
  std::size_t common = 0;
  for (const auto& t : prefs) common += u.preference_tags.count(t);
  const std::size_t uni = prefs.size() + u.preference_tags.size() - common;
  const long double jac = uni == 0 ? 0 : (long double)common / uni;
  return w.w_sim * std::max<long double>(0, cosv) + w.w_act * (act + boost) + w.w_pref * jac +
         w.w_emo * u.emotion_weight;
}

// Checks that `hits` are exactly the top-k by oracle score, allowing exact
// ties (within 1e-12) to be ordered either way.
void check_against_oracle(const MemorySpace& s, const Query& q, std::size_t k, Timestamp now,
                          const ScoreWeights& w, const std::vector<RetrievalHit>& hits,
                          const std::map<UnitId, double>& boosts = {}) {
  std::vector<std::pair<long double, UnitId>> all;
  for (const auto& u : s.units()) {
    if (!u.is_retrievable()) continue;
    auto b = boosts.find(u.id);
    all.push_back({oracle_score(q.embedding, u, now, w, q.prefs, b == boosts.end() ? 0.0 : b->second), u.id});
  }
  std::sort(all.begin(), all.end(), [](auto& a, auto& b) { return a.first > b.first; });
  REQUIRE(hits.size() == std::min(k, all.size()));
  for (std::size_t i = 0; i < hits.size(); ++i) {
    CHECK(std::abs((long double)hits[i].score - all[i].first) < 1e-12L);
  }
  if (!hits.empty() && hits.size() < all.size()) {
    // Nothing outside the returned set beats the k-th score.
    CHECK(all[hits.size()].first <= (long double)hits.back().score + 1e-12L);
  }
}

}  // namespace

TEST_CASE("score_unit special cases") {
  auto u = make_unit("the warranty is one year", Timestamp{0});
  CHECK(score_unit(u.embedding, u, Timestamp{0}, weights(1, 0, 0, 0), {}, {}) ==
        doctest::Approx(1.0).epsilon(1e-6));
  u.preference_tags = {"pref:jazz"};
  CHECK(score_unit(u.embedding, u, Timestamp{0}, weights(0, 0, 1, 0), {"pref:rock"}, {}) == 0.0);
  CHECK(score_unit(u.embedding, u, Timestamp{0}, weights(0, 0, 1, 0), {"pref:jazz"}, {}) == 1.0);
  CHECK(jaccard({}, {}) == 0.0);
  CHECK(jaccard({"a", "b"}, {"b", "c"}) == doctest::Approx(1.0 / 3.0));
  ScoreWeights bad = weights(0.5, 0.5, 0.5, 0);
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("spread: seeds only at zero hops, geometric decay on a chain") {
  MemorySpace s("s");
  s.insert_unit(make_unit("ab", Timestamp{1}, {{"a", "r", "b"}}));
  s.insert_unit(make_unit("bc", Timestamp{1}, {{"b", "r", "c"}}));
  ScoreWeights w;
  w.max_hops = 0;
  auto r = spread(s, {node_of(s, "a")}, w);
  CHECK(r.boost.size() == 1);
  CHECK(r.boost.at(node_of(s, "a")) == 1.0);
  w.max_hops = 2;
  r = spread(s, {node_of(s, "a")}, w);
  CHECK(r.boost.at(node_of(s, "b")) == doctest::Approx(0.5));
  CHECK(r.boost.at(node_of(s, "c")) == doctest::Approx(0.25));
  CHECK(r.path.at(node_of(s, "c")).size() == 2);
  CHECK_THROWS_AS(spread(s, {NodeId{999}}, w), Error);
}

TEST_CASE("spread: diamond keeps the best path, not the sum") {
  // a-b-d and a-c-d; the a-c edge is weaker, so d's best path goes via b.
  MemorySpace s("s");
  s.insert_unit(make_unit("ab", Timestamp{1}, {{"a", "r", "b"}}));
  s.insert_unit(make_unit("ac", Timestamp{1}, {{"a", "r", "c"}}));
  s.insert_unit(make_unit("bd", Timestamp{1}, {{"b", "r", "d"}}));
  s.insert_unit(make_unit("cd", Timestamp{1}, {{"c", "r", "d"}}));
  for (const auto& e : s.edges()) {
    if (s.node(e.tail).label == "c" && s.node(e.head).label == "a") {
      s.update_edge(e.id, [](GraphEdge& x) { x.strength = 0.5; });
    }
  }
  ScoreWeights w;
  const auto r = spread(s, {node_of(s, "a")}, w);
  // Hand enumeration: a->b = .5*1/1 = .5; b->d = .5*.5*(1/1) = .25;
  // a->c = .5*(.5/1) = .25; c->d = .25*.5*(1/1) = .125 (c's max incident is 1).
  CHECK(r.boost.at(node_of(s, "b")) == doctest::Approx(0.5));
  CHECK(r.boost.at(node_of(s, "c")) == doctest::Approx(0.25));
  CHECK(r.boost.at(node_of(s, "d")) == doctest::Approx(0.25));
}

TEST_CASE("spread: failed edges are not traversed; scaling strengths changes nothing") {
  MemorySpace s("s");
  s.insert_unit(make_unit("ab", Timestamp{1}, {{"a", "r", "b"}}));
  s.insert_unit(make_unit("ac", Timestamp{1}, {{"a", "q", "c"}}));
  s.update_edge(s.edges()[0].id, [](GraphEdge& e) {
    e.validity = EdgeValidity::kFailed;
    e.strength = 0;
  });
  ScoreWeights w;
  auto r = spread(s, {node_of(s, "a")}, w);
  CHECK(r.boost.count(node_of(s, "b")) == 0);
  CHECK(r.boost.at(node_of(s, "c")) == doctest::Approx(0.5));
  const auto before = r.boost;
  for (const auto& e : s.edges()) s.update_edge(e.id, [](GraphEdge& x) { x.strength *= 7.0; });
  CHECK(spread(s, {node_of(s, "a")}, w).boost == before);
}

TEST_CASE("multi_hop_path") {
  // Six nodes, two routes from a to f: a-b-f (2 hops) and a-c-d-f (3 hops);
  // e hangs off d.
  MemorySpace s("s");
  for (auto [h, t] : std::vector<std::pair<const char*, const char*>>{
           {"a", "b"}, {"b", "f"}, {"a", "c"}, {"c", "d"}, {"d", "f"}, {"d", "e"}}) {
    s.insert_unit(make_unit(std::string(h) + t, Timestamp{1}, {{h, "r", t}}));
  }
  auto paths = multi_hop_path(s, "a", "f", 3);
  REQUIRE(paths.size() == 2);
  CHECK(paths[0].size() == 2);
  CHECK(paths[1].size() == 3);
  CHECK(multi_hop_path(s, "a", "f", 2).size() == 1);
  CHECK(multi_hop_path(s, "a", "a", 3) == std::vector<std::vector<EdgeId>>{{}});
  s.insert_unit(make_unit("xy", Timestamp{1}, {{"x", "r", "y"}}));
  CHECK(multi_hop_path(s, "a", "x", 5).empty());
  CHECK_THROWS_AS(multi_hop_path(s, "a", "nowhere", 2), Error);
}

TEST_CASE("retrieve_topk trivial cases") {
  MemorySpace s("s");
  Query q;
  q.embedding = testing::embedder().embed("anything");
  CHECK(retrieve_topk(s, q, 5, Timestamp{10}, {}, {}).empty());
  s.insert_unit(make_unit("alpha", Timestamp{1}));
  s.insert_unit(make_unit("beta", Timestamp{2}));
  const auto hits = retrieve_topk(s, q, 10, Timestamp{10}, {}, {});
  CHECK(hits.size() == 2);
  CHECK_THROWS_AS(retrieve_topk(s, q, 0, Timestamp{10}, {}, {}), Error);
}

TEST_CASE("retrieve_topk on a 5-unit fixture matches the oracle ranking") {
  MemorySpace s("s");
  auto u1 = make_unit("the warranty is one year free", Timestamp{0});
  auto u2 = make_unit("seven day no reason return", Timestamp{86400});
  u2.preference_tags = {"after_sales"};
  auto u3 = make_unit("user loves jazz music", Timestamp{2 * 86400});
  u3.emotion_weight = 0.6;
  u3.preference_tags = {"pref:jazz"};
  auto u4 = make_unit("warranty covers the battery", Timestamp{3 * 86400});
  u4.trace = record_access(u4.trace, Timestamp{4 * 86400});
  auto u5 = make_unit("orbital mechanics lecture", Timestamp{4 * 86400});
  for (auto* u : {&u1, &u2, &u3, &u4, &u5}) s.insert_unit(*u);
  const Timestamp now{5 * 86400};
  Query q;
  q.embedding = testing::embedder().embed("how long is the warranty");
  q.prefs = {"after_sales", "pref:jazz"};
  const auto w = weights(0.4, 0.3, 0.2, 0.1);
  const auto hits = retrieve_topk(s, q, 5, now, w, {});
  check_against_oracle(s, q, 5, now, w, hits);
  CHECK(s.unit(hits[0].unit).content.find("warranty") != std::string::npos);
}

TEST_CASE("retrieval boost follows the graph and carries the path") {
  MemorySpace s("s");
  s.insert_unit(make_unit("kovalen makes bikes", Timestamp{1}, {{"kovalen", "makes", "bikes"}}));
  const UnitId far = s.insert_unit(make_unit("bikes use chains", Timestamp{1}, {{"bikes", "use", "chains"}}));
  s.insert_unit(make_unit("unrelated words here", Timestamp{1}));
  Query q;
  q.embedding = testing::embedder().embed("kovalen");
  q.seeds = {node_of(s, "kovalen")};
  const auto hits = retrieve_topk(s, q, 3, Timestamp{100}, {}, {});
  REQUIRE(hits.size() == 3);
  CHECK(hits[0].path.empty());
  const auto it = std::find_if(hits.begin(), hits.end(), [&](const auto& h) { return h.unit == far; });
  REQUIRE(it != hits.end());
  CHECK(it->path.size() == 1);
}

TEST_CASE("randomized stores match the exhaustive oracle") {
  std::mt19937_64 rng(5);
  const std::vector<std::string> words = {"warranty", "return", "price", "jazz", "paris", "berlin",
                                          "delivery", "invoice", "battery", "bike", "coffee", "tea"};
  MemorySpace s("s");
  std::uniform_int_distribution<int> word(0, static_cast<int>(words.size()) - 1);
  std::uniform_int_distribution<int> day(0, 60);
  std::uniform_real_distribution<double> emo(0, 1);
  for (int i = 0; i < 1000; ++i) {
    std::string text = words[word(rng)] + " " + words[word(rng)] + " " + std::to_string(i);
    auto u = make_unit(text, Timestamp{day(rng) * 86400});
    u.emotion_weight = emo(rng) < 0.3 ? emo(rng) : 0.0;
    if (emo(rng) < 0.3) u.preference_tags = {"pref:" + words[word(rng)]};
    s.insert_unit(u);
  }
  const Timestamp now{70 * 86400};
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_real_distribution<double> uw(0, 1);
    double a = uw(rng), b = uw(rng), c = uw(rng), d = uw(rng);
    const double sum = a + b + c + d;
    const auto w = weights(a / sum, b / sum, c / sum, 1.0 - (a + b + c) / sum);
    Query q;
    q.embedding = testing::embedder().embed(words[word(rng)] + " " + words[word(rng)]);
    q.prefs = {"pref:" + words[word(rng)]};
    const auto hits = retrieve_topk(s, q, 10, now, w, {});
    check_against_oracle(s, q, 10, now, w, hits);
  }
}

TEST_CASE("apply_accesses records once and re-activates") {
  MemorySpace s("s");
  const UnitId id = s.insert_unit(make_unit("x", Timestamp{0}));
  s.set_state(id, LifecycleState::kPendingForget, Timestamp{5});
  std::vector<RetrievalHit> hits = {{id, 1.0, {}}};
  apply_accesses(s, hits, Timestamp{10});
  apply_accesses(s, hits, Timestamp{10});
  CHECK(s.unit(id).trace.total_count == 2);
  CHECK(s.unit(id).state == LifecycleState::kActive);
  ActivationParams p;
  const MemoryUnit before = make_unit("x", Timestamp{0});
  CHECK(trace_retention(s.unit(id).trace, Timestamp{86400}, p) >
        trace_retention(before.trace, Timestamp{86400}, p));
}
