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

#include "engram/prune.hpp"

#include <algorithm>
#include <map>
#include <tuple>
#include <unordered_map>

#include "engram/error.hpp"
#include "engram/text.hpp"

namespace engram {
namespace {

// The first-person node touches nearly every user utterance; linking through
// it would make every remark look task-related.
constexpr std::string_view kSpeakerNode = "user";

bool has_digit(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) { return c >= '0' && c <= '9'; });
}

std::set<std::string> salient_tokens(const MemoryUnit& u) {
  std::set<std::string> out;
  const Fact* f = u.primary_fact();
  if (!f) return out;
  std::set<std::string> named;
  for (const auto& e : u.anchors.entities) {
    if (e.kind != EntityKind::kStrong || e.surface == kSpeakerNode) continue;
    for (auto& t : split_whitespace(e.surface)) named.insert(std::move(t));
  }
  for (auto& t : split_whitespace(f->value)) {
    if (has_digit(t) || named.count(t)) out.insert(std::move(t));
  }
  return out;
}

std::string fact_key(const MemoryUnit& u) {
  const Fact* f = u.primary_fact();
  return f ? f->key : std::string();
}

// A different stated value for the same key.
bool conflicting(const MemoryUnit& a, const MemoryUnit& b) {
  const Fact* fa = a.primary_fact();
  const Fact* fb = b.primary_fact();
  return fa && fb && fa->value != fb->value;
}

bool newer(const MemoryUnit& a, const MemoryUnit& b) {
  return std::tie(a.created_at, a.id) > std::tie(b.created_at, b.id);
}

bool has_failed_functional_edge(const MemorySpace& space, UnitId u) {
  for (const auto& e : space.edges()) {
    if (e.validity == EdgeValidity::kFailed && e.sources.count(u) && space.config().is_functional(e.relation_label)) {
      return true;
    }
  }
  return false;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::string_view to_string(LinkKind kind) {
  switch (kind) {
    case LinkKind::kSharedEntity: return "shared_entity";
    case LinkKind::kQuestionAnswer: return "question_answer";
    case LinkKind::kAnswerConfirmation: return "answer_confirmation";
  }
  return "?";
}

std::string_view to_string(RedundancyClass c) {
  switch (c) {
    case RedundancyClass::kDuplicate: return "duplicate";
    case RedundancyClass::kIrrelevant: return "irrelevant";
    case RedundancyClass::kOutdated: return "outdated";
    case RedundancyClass::kKeep: return "keep";
  }
  return "?";
}

std::map<UnitId, std::set<LinkKind>> AssociationMap::links_of(UnitId u) const {
  std::map<UnitId, std::set<LinkKind>> out;
  if (auto it = nodes_of_.find(u); it != nodes_of_.end()) {
    for (NodeId n : it->second) {
      for (UnitId v : units_of_.at(n)) {
        if (v != u) out[v].insert(LinkKind::kSharedEntity);
      }
    }
  }
  if (auto it = chain_.find(u); it != chain_.end()) {
    for (const auto& [v, kinds] : it->second) out[v].insert(kinds.begin(), kinds.end());
  }
  return out;
}

bool AssociationMap::linked(UnitId a, UnitId b) const {
  if (auto it = chain_.find(a); it != chain_.end() && it->second.count(b)) return true;
  auto na = nodes_of_.find(a);
  auto nb = nodes_of_.find(b);
  if (na == nodes_of_.end() || nb == nodes_of_.end()) return false;
  return std::any_of(na->second.begin(), na->second.end(), [&](NodeId n) { return nb->second.count(n) > 0; });
}

std::vector<AssociationLink> AssociationMap::all_links() const {
  std::set<AssociationLink> out;
  for (const auto& [n, units] : units_of_) {
    for (std::size_t i = 0; i < units.size(); ++i) {
      for (std::size_t j = i + 1; j < units.size(); ++j) {
        out.insert({std::min(units[i], units[j]), std::max(units[i], units[j]), LinkKind::kSharedEntity});
      }
    }
  }
  for (const auto& [a, peers] : chain_) {
    for (const auto& [b, kinds] : peers) {
      if (a < b) {
        for (LinkKind k : kinds) out.insert({a, b, k});
      }
    }
  }
  return {out.begin(), out.end()};
}

AssociationMap build_association_map(const MemorySpace& space) {
  AssociationMap map;
  for (const auto& n : space.nodes()) {
    if (n.label == kSpeakerNode) continue;
    std::vector<UnitId> live;
    for (UnitId u : n.unit_refs) {
      const MemoryUnit* unit = space.find_unit(u);
      if (unit && unit->is_retrievable()) live.push_back(u);
    }
    if (live.size() < 2) continue;
    for (UnitId u : live) map.nodes_of_[u].insert(n.id);
    map.units_of_[n.id] = std::move(live);
  }

  std::map<std::int64_t, std::vector<const MemoryUnit*>> by_turn;
  for (const auto& u : space.units()) {
    if (!u.is_retrievable()) continue;
    std::set<std::int64_t> turns;
    for (const auto& ref : u.provenance) {
      if (ref.turn >= 0) turns.insert(ref.turn);
    }
    for (auto t : turns) by_turn[t].push_back(&u);
  }
  auto link = [&](UnitId a, UnitId b, LinkKind k) {
    map.chain_[a][b].insert(k);
    map.chain_[b][a].insert(k);
  };
  auto at = [&](std::int64_t t) -> const std::vector<const MemoryUnit*>& {
    static const std::vector<const MemoryUnit*> none;
    auto it = by_turn.find(t);
    return it == by_turn.end() ? none : it->second;
  };
  for (const auto& [turn, units] : by_turn) {
    for (const MemoryUnit* q : units) {
      if (q->kind != UnitKind::kQuestion) continue;
      for (const MemoryUnit* a : at(turn + 1)) {
        if (a->kind != UnitKind::kFact) continue;
        link(q->id, a->id, LinkKind::kQuestionAnswer);
        for (const MemoryUnit* c : at(turn + 2)) {
          if (c->kind == UnitKind::kAcknowledgment) link(a->id, c->id, LinkKind::kAnswerConfirmation);
        }
      }
    }
  }
  return map;
}

std::size_t VerdictSet::count(RedundancyClass c) const {
  return static_cast<std::size_t>(
      std::count_if(verdicts.begin(), verdicts.end(), [c](const auto& v) { return v.cls == c; }));
}

bool values_compatible(const MemoryUnit& a, const MemoryUnit& b) { return salient_tokens(a) == salient_tokens(b); }

VerdictSet classify_redundancy(const MemorySpace& space, const AssociationMap& map, Timestamp now,
                               const PruneConfig& cfg, const ActivationParams& params) {
  VerdictSet out;
  out.store_version = space.version();

  std::vector<const MemoryUnit*> live;
  for (const auto& u : space.units()) {
    if (u.is_retrievable()) live.push_back(&u);
  }
  std::map<UnitId, RedundancyVerdict> verdicts;
  for (const MemoryUnit* u : live) verdicts[u->id] = {u->id, RedundancyClass::kKeep, std::nullopt, {"keep", 0.0}};

  // Duplicates: earlier distinct contents are group heads, compared within the
  // same unit kind and, for facts, the same key.
  {
    std::vector<const MemoryUnit*> order = live;
    std::sort(order.begin(), order.end(), [](const MemoryUnit* a, const MemoryUnit* b) { return newer(*b, *a); });
    std::map<std::pair<UnitKind, std::string>, std::vector<const MemoryUnit*>> heads;
    std::unordered_map<std::string, const MemoryUnit*> head_by_content;
    for (const MemoryUnit* u : order) {
      if (u->kind == UnitKind::kAcknowledgment) continue;
      if (auto it = head_by_content.find(u->content); it != head_by_content.end() && it->second->kind == u->kind) {
        verdicts[u->id] = {u->id, RedundancyClass::kDuplicate, it->second->id, {"identical_content", 1.0}};
        continue;
      }
      auto& bucket = heads[{u->kind, fact_key(*u)}];
      const MemoryUnit* target = nullptr;
      double sim = 0.0;
      for (const MemoryUnit* h : bucket) {
        const double s = cosine(u->embedding, h->embedding);
        if (s >= cfg.dup_threshold && (u->kind != UnitKind::kFact || values_compatible(*u, *h))) {
          target = h;
          sim = s;
          break;
        }
      }
      if (target) {
        verdicts[u->id] = {u->id, RedundancyClass::kDuplicate, target->id, {"similarity", sim}};
      } else {
        bucket.push_back(u);
        head_by_content.emplace(u->content, u);
      }
    }
  }

  // Project duplicate groups as merged, in the order refine applies them.
  std::map<UnitId, ActivationTrace> trace;
  std::map<UnitId, TagSet> tags;
  for (const MemoryUnit* u : live) {
    trace[u->id] = u->trace;
    tags[u->id] = u->preference_tags;
  }
  for (const auto& [id, v] : verdicts) {
    if (v.cls != RedundancyClass::kDuplicate) continue;
    const MemoryUnit& from = space.unit(id);
    trace[*v.merge_target] = merge_traces(trace[*v.merge_target], from.trace, now);
    tags[*v.merge_target].insert(from.preference_tags.begin(), from.preference_tags.end());
  }
  auto activation = [&](const MemoryUnit& u) {
    auto it = trace.find(u.id);
    return trace_activation(it == trace.end() ? u.trace : it->second, now, params);
  };

  // Outdated works on duplicate groups, represented by their heads. A group's
  // recency is its latest dialogue turn (provenance survives merging, so this
  // is the same before and after refine), then the head's creation. The most
  // recent group of a key is never outdated, which conserves the key.
  std::map<UnitId, std::vector<UnitId>> members;
  for (const MemoryUnit* u : live) {
    const auto& v = verdicts[u->id];
    members[v.cls == RedundancyClass::kDuplicate ? *v.merge_target : u->id].push_back(u->id);
  }
  using Recency = std::tuple<std::int64_t, Timestamp, UnitId>;
  std::map<UnitId, Recency> recency;
  for (const auto& [head, ids] : members) {
    std::int64_t turn = -1;
    for (UnitId m : ids) {
      for (const auto& ref : space.unit(m).provenance) turn = std::max(turn, ref.turn);
    }
    recency[head] = {turn, space.unit(head).created_at, head};
  }
  std::map<std::string, std::vector<const MemoryUnit*>> by_key;
  for (const MemoryUnit* u : live) {
    if (u->kind == UnitKind::kFact && !fact_key(*u).empty() && verdicts[u->id].cls != RedundancyClass::kDuplicate) {
      by_key[fact_key(*u)].push_back(u);
    }
  }
  for (const auto& [key, heads] : by_key) {
    for (const MemoryUnit* h : heads) {
      const MemoryUnit* newest = nullptr;
      for (const MemoryUnit* g : heads) {
        if (recency.at(g->id) > recency.at(h->id) && conflicting(*g, *h) &&
            (!newest || recency.at(g->id) > recency.at(newest->id))) {
          newest = g;
        }
      }
      if (!newest) continue;
      auto& v = verdicts[h->id];
      const auto& group = members.at(h->id);
      if (std::any_of(group.begin(), group.end(), [&](UnitId m) { return has_failed_functional_edge(space, m); })) {
        v = {h->id, RedundancyClass::kOutdated, newest->id, {"failed_edge", 0.0}};
        continue;
      }
      const double r = trace_retention(trace.at(h->id), now, params);
      if (r < cfg.outdated_threshold) v = {h->id, RedundancyClass::kOutdated, newest->id, {"retention", r}};
    }
  }

  // Irrelevant. The median runs over fact units that survive merging,
  // including already compressed ones.
  std::vector<double> fact_acts;
  for (const auto& u : space.units()) {
    if (u.kind != UnitKind::kFact) continue;
    if (u.state == LifecycleState::kSoftDeleted) continue;
    if (auto it = verdicts.find(u.id); it != verdicts.end() && it->second.cls == RedundancyClass::kDuplicate) continue;
    fact_acts.push_back(activation(u));
  }
  const bool have_median = !fact_acts.empty();
  const double med = have_median ? median(fact_acts) : 0.0;
  for (const MemoryUnit* u : live) {
    auto& v = verdicts[u->id];
    if (v.cls != RedundancyClass::kKeep || u->kind == UnitKind::kFact) continue;
    if (u->kind == UnitKind::kAcknowledgment) {
      v = {u->id, RedundancyClass::kIrrelevant, std::nullopt, {"acknowledgment", 0.0}};
      continue;
    }
    if (!tags.at(u->id).empty() || !have_median) continue;
    std::size_t degree = 0;
    for (const auto& [peer, kinds] : map.links_of(u->id)) {
      const MemoryUnit* p = space.find_unit(peer);
      if (!p || p->kind != UnitKind::kFact) continue;
      if (kinds.count(LinkKind::kSharedEntity) || kinds.count(LinkKind::kQuestionAnswer)) ++degree;
    }
    const double act = activation(*u);
    if (degree == 0 && act < med) v = {u->id, RedundancyClass::kIrrelevant, std::nullopt, {"chit_chat", act}};
  }

  out.verdicts.reserve(verdicts.size());
  for (auto& [id, v] : verdicts) out.verdicts.push_back(std::move(v));
  return out;
}

std::size_t live_tokens(const MemorySpace& space) {
  std::size_t n = 0;
  for (const auto& u : space.units()) {
    if (u.is_retrievable()) n += count_tokens(u.content);
  }
  return n;
}

std::size_t redundant_token_bound(const MemorySpace& space) {
  std::set<std::string> seen;
  std::size_t n = 0;
  for (const auto& u : space.units()) {
    if (!u.is_retrievable()) continue;
    if (u.kind == UnitKind::kAcknowledgment || !seen.insert(u.content).second) n += count_tokens(u.content);
  }
  return n;
}

std::set<std::string> live_fact_keys(const MemorySpace& space) {
  std::set<std::string> keys;
  for (const auto& u : space.units()) {
    if (!u.is_retrievable()) continue;
    for (const auto& f : u.anchors.facts) keys.insert(f.key);
  }
  return keys;
}

std::string compression_summary(const MemoryUnit& unit) {
  const std::string key = fact_key(unit);
  return (key.empty() ? unit.content : key) + " @" + std::to_string(unit.created_at.seconds);
}

void compress_unit(MemorySpace& space, UnitId id, std::optional<UnitId> superseded_by, Timestamp now,
                   const Embedder& embedder) {
  const MemoryUnit& u = space.unit(id);
  const std::string summary = compression_summary(u);
  const bool shorter = count_tokens(summary) < count_tokens(u.content);
  space.update_unit(id, [&](MemoryUnit& unit) {
    if (shorter) {
      unit.content = summary;
      unit.embedding = embedder.embed(summary);
    }
    if (superseded_by) unit.superseded_by = superseded_by;
  });
  space.retire_unit(id, LifecycleState::kCompressed, now);
}

PruneReport refine(const VerdictSet& verdicts, MemorySpace& space, Timestamp now, const Embedder& embedder) {
  if (verdicts.store_version != space.version()) {
    throw Error(ErrorCode::kStaleVerdicts, "space " + space.id() + " changed since classification (version " +
                                               std::to_string(verdicts.store_version) + " vs " +
                                               std::to_string(space.version()) + ")");
  }
  PruneReport report;
  report.tokens_before = live_tokens(space);

  // Merges first, so a compressed head is never overwritten by fusion.
  for (RedundancyClass phase : {RedundancyClass::kDuplicate, RedundancyClass::kOutdated, RedundancyClass::kIrrelevant}) {
    for (const auto& v : verdicts.verdicts) {
      if (v.cls != phase) continue;
      const MemoryUnit* u = space.find_unit(v.unit);
      if (!u || !u->is_retrievable()) continue;
      switch (v.cls) {
        case RedundancyClass::kDuplicate: {
          const MemoryUnit& from = *u;
          const MemoryUnit& into = space.unit(*v.merge_target);
          if (count_tokens(from.content) > count_tokens(into.content)) {
            // Fusion keeps the longest phrasing.
            const auto content = from.content;
            const auto anchors = from.anchors;
            const auto embedding = from.embedding;
            space.update_unit(*v.merge_target, [&](MemoryUnit& t) {
              t.content = content;
              t.anchors = anchors;
              t.embedding = embedding;
            });
          }
          space.merge_unit_into(v.unit, *v.merge_target, now);
          ++report.units_merged;
          break;
        }
        case RedundancyClass::kOutdated:
          compress_unit(space, v.unit, v.merge_target, now, embedder);
          ++report.units_compressed;
          break;
        case RedundancyClass::kIrrelevant:
          space.retire_unit(v.unit, LifecycleState::kSoftDeleted, now);
          ++report.units_removed;
          break;
        case RedundancyClass::kKeep:
          break;
      }
    }
  }
  report.tokens_after = live_tokens(space);
  return report;
}

}  // namespace engram
