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

#include "engram/retrieve.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>

#include "engram/error.hpp"

namespace engram {
namespace {

bool usable(const GraphEdge& e) { return e.validity != EdgeValidity::kFailed && e.strength > 0.0; }

NodeId other_end(const GraphEdge& e, NodeId from) { return e.head == from ? e.tail : e.head; }

double max_incident_strength(const MemorySpace& space, NodeId n) {
  double best = 0.0;
  for (EdgeId id : space.incident_edges(n)) {
    const GraphEdge& e = space.edge(id);
    if (usable(e)) best = std::max(best, e.strength);
  }
  return best;
}

NodeId resolve_or_throw(const MemorySpace& space, std::string_view label) {
  if (auto id = space.resolve(label)) return *id;
  throw Error(ErrorCode::kUnknownNode, "no node for \"" + std::string(label) + "\"");
}

}  // namespace

void ScoreWeights::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidArgument, what); };
  for (double w : {w_sim, w_act, w_pref, w_emo}) {
    if (!(w >= 0.0) || !std::isfinite(w)) fail("score weights must be non-negative");
  }
  if (std::abs(w_sim + w_act + w_pref + w_emo - 1.0) > 1e-9) fail("score weights must sum to 1");
  if (!(hop_decay > 0.0 && hop_decay < 1.0)) fail("hop_decay must lie in (0, 1)");
  if (max_hops < 0) fail("max_hops must be non-negative");
}

double jaccard(const TagSet& a, const TagSet& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

double score_unit(std::span<const float> query_vec, const MemoryUnit& unit, Timestamp now,
                  const ScoreWeights& w, const TagSet& prefs, const ActivationParams& params,
                  double boost) {
  const double sim = query_vec.empty() ? 0.0 : std::max(0.0, cosine(query_vec, unit.embedding));
  const double act = logistic(trace_activation(unit.trace, now, params));
  return w.w_sim * sim + w.w_act * (act + boost) + w.w_pref * jaccard(prefs, unit.preference_tags) +
         w.w_emo * unit.emotion_weight;
}

SpreadResult spread(const MemorySpace& space, const std::set<NodeId>& seeds, const ScoreWeights& w) {
  SpreadResult out;
  for (NodeId s : seeds) {
    if (!space.find_node(s)) throw Error(ErrorCode::kUnknownNode, "unknown seed node " + std::to_string(s.value));
    out.boost[s] = 1.0;
    out.path[s] = {};
  }
  std::set<NodeId> frontier = seeds;
  for (int hop = 1; hop <= w.max_hops && !frontier.empty(); ++hop) {
    // Relax from the previous round's values only, so a node's boost is the
    // best over paths of at most `hop` edges.
    const auto prev = out.boost;
    const auto prev_path = out.path;
    std::set<NodeId> next;
    for (NodeId u : frontier) {
      const double norm = max_incident_strength(space, u);
      if (norm <= 0.0) continue;
      for (EdgeId id : space.incident_edges(u)) {
        const GraphEdge& e = space.edge(id);
        if (!usable(e)) continue;
        const NodeId v = other_end(e, u);
        const double cand = prev.at(u) * w.hop_decay * (e.strength / norm);
        auto it = out.boost.find(v);
        if (it != out.boost.end() && cand <= it->second) continue;
        out.boost[v] = cand;
        auto p = prev_path.at(u);
        p.push_back(id);
        out.path[v] = std::move(p);
        next.insert(v);
      }
    }
    frontier = std::move(next);
  }
  return out;
}

std::vector<std::vector<EdgeId>> multi_hop_path(const MemorySpace& space, std::string_view entity_a,
                                                std::string_view entity_b, int max_hops) {
  const NodeId a = resolve_or_throw(space, entity_a);
  const NodeId b = resolve_or_throw(space, entity_b);
  if (a == b) return {{}};
  std::vector<std::vector<EdgeId>> paths;
  std::vector<EdgeId> current;
  std::set<NodeId> on_path = {a};
  std::function<void(NodeId)> dfs = [&](NodeId u) {
    if (static_cast<int>(current.size()) >= max_hops) return;
    for (EdgeId id : space.incident_edges(u)) {
      const GraphEdge& e = space.edge(id);
      if (!usable(e)) continue;
      const NodeId v = other_end(e, u);
      if (on_path.count(v)) continue;
      current.push_back(id);
      if (v == b) {
        paths.push_back(current);
      } else {
        on_path.insert(v);
        dfs(v);
        on_path.erase(v);
      }
      current.pop_back();
    }
  };
  dfs(a);
  std::sort(paths.begin(), paths.end(), [](const auto& x, const auto& y) {
    if (x.size() != y.size()) return x.size() < y.size();
    return x < y;
  });
  return paths;
}

Query make_query(const MemorySpace& space, std::string_view text, const TagSet& prefs,
                 const AnchorSource& annotator, const Embedder& embedder) {
  Query q;
  q.text = std::string(text);
  q.embedding = embedder.embed(text);
  q.prefs = prefs;
  const auto anchors = annotator.annotate(text, {});
  for (const auto& s : anchors.strong_entities()) {
    if (auto id = space.resolve(s)) q.seeds.insert(*id);
  }
  return q;
}

std::vector<RetrievalHit> retrieve_topk(const MemorySpace& space, const Query& query, std::size_t k,
                                        Timestamp now, const ScoreWeights& w,
                                        const ActivationParams& params) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  std::unordered_map<UnitId, std::pair<double, const std::vector<EdgeId>*>> unit_boost;
  SpreadResult spread_result;
  if (!query.seeds.empty() && w.w_act > 0.0) {
    spread_result = spread(space, query.seeds, w);
    // A unit collects the boosts of every node it references (sources add
    // up, as in ACT-R); it reports the path of its strongest node.
    std::unordered_map<UnitId, double> strongest;
    for (const auto& [node, boost] : spread_result.boost) {
      const auto* path = &spread_result.path.at(node);
      for (UnitId u : space.node(node).unit_refs) {
        auto [it, fresh] = unit_boost.try_emplace(u, boost, path);
        auto [best, first] = strongest.try_emplace(u, boost);
        if (fresh) continue;
        it->second.first += boost;
        if (boost > best->second || (boost == best->second && path->size() < it->second.second->size())) {
          best->second = boost;
          it->second.second = path;
        }
      }
    }
  }

  struct Scored {
    double score;
    Timestamp last;
    UnitId id;
    const std::vector<EdgeId>* path;
  };
  std::vector<Scored> scored;
  scored.reserve(space.size());
  for (const auto& u : space.units()) {
    if (!u.is_retrievable()) continue;
    double boost = 0.0;
    const std::vector<EdgeId>* path = nullptr;
    if (auto it = unit_boost.find(u.id); it != unit_boost.end()) {
      boost = it->second.first;
      path = it->second.second;
    }
    scored.push_back({score_unit(query.embedding, u, now, w, query.prefs, params, boost),
                      u.trace.last_access(), u.id, path});
  }
  auto better = [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.last != b.last) return a.last > b.last;
    return a.id < b.id;
  };
  const std::size_t n = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(), better);
  std::vector<RetrievalHit> hits;
  hits.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    hits.push_back({scored[i].id, scored[i].score, scored[i].path ? *scored[i].path : std::vector<EdgeId>{}});
  }
  return hits;
}

void apply_accesses(MemorySpace& space, std::span<const RetrievalHit> hits, Timestamp now) {
  for (const auto& hit : hits) {
    const MemoryUnit* u = space.find_unit(hit.unit);
    if (!u || !u->is_retrievable()) continue;
    // At-least-once delivery: an access already recorded at this instant, or
    // one that arrives after a later access, is dropped.
    if (u->trace.last_access() >= now) continue;
    space.update_unit(hit.unit, [&](MemoryUnit& unit) { unit.trace = record_access(unit.trace, now); });
    if (u->state == LifecycleState::kPendingForget) space.set_state(hit.unit, LifecycleState::kActive, now);
    for (EdgeId e : hit.path) {
      if (space.find_edge(e)) space.update_edge(e, [](GraphEdge& edge) { ++edge.path_uses; });
    }
  }
}

}  // namespace engram
