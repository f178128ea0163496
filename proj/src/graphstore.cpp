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

#include "engram/graphstore.hpp"

#include <algorithm>
#include <cmath>
#include <regex>

#include "engram/activation.hpp"
#include "engram/error.hpp"
#include "engram/text.hpp"

namespace engram {
namespace {

template <typename Record, typename IdT>
auto find_by_id(std::vector<Record>& records, IdT id) {
  auto it = std::lower_bound(records.begin(), records.end(), id,
                             [](const Record& r, IdT v) { return r.id < v; });
  return (it != records.end() && it->id == id) ? it : records.end();
}

template <typename Record, typename IdT>
auto find_by_id(const std::vector<Record>& records, IdT id) {
  auto it = std::lower_bound(records.begin(), records.end(), id,
                             [](const Record& r, IdT v) { return r.id < v; });
  return (it != records.end() && it->id == id) ? it : records.end();
}

template <typename Record>
void insert_sorted(std::vector<Record>& records, Record r) {
  auto it = std::lower_bound(records.begin(), records.end(), r.id,
                             [](const Record& x, const auto& v) { return x.id < v; });
  if (it != records.end() && it->id == r.id) {
    *it = std::move(r);
  } else {
    records.insert(it, std::move(r));
  }
}

template <typename T>
void erase_value(std::vector<T>& v, const T& x) {
  v.erase(std::remove(v.begin(), v.end(), x), v.end());
}

int validity_rank(EdgeValidity v) {
  switch (v) {
    case EdgeValidity::kValid: return 0;
    case EdgeValidity::kWeakened: return 1;
    case EdgeValidity::kFailed: return 2;
  }
  return 2;
}

}  // namespace

std::string_view to_string(NodeKind kind) { return kind == NodeKind::kEntity ? "entity" : "event"; }

std::optional<NodeKind> parse_node_kind(std::string_view name) {
  if (name == "entity") return NodeKind::kEntity;
  if (name == "event") return NodeKind::kEvent;
  return std::nullopt;
}

std::string_view to_string(EdgeValidity validity) {
  switch (validity) {
    case EdgeValidity::kValid: return "valid";
    case EdgeValidity::kWeakened: return "weakened";
    case EdgeValidity::kFailed: return "failed";
  }
  return "unknown";
}

std::optional<EdgeValidity> parse_edge_validity(std::string_view name) {
  if (name == "valid") return EdgeValidity::kValid;
  if (name == "weakened") return EdgeValidity::kWeakened;
  if (name == "failed") return EdgeValidity::kFailed;
  return std::nullopt;
}

bool is_event_label(std::string_view label) {
  static const std::set<std::string, std::less<>> kTimeWords = {
      "monday",   "tuesday",  "wednesday", "thursday", "friday",    "saturday", "sunday",
      "january",  "february", "march",     "april",    "may",       "june",     "july",
      "august",   "september", "october",  "november", "december",  "today",    "tomorrow",
      "yesterday", "tonight", "weekend"};
  static const std::regex kDate(R"(^\d{4}-\d{2}-\d{2}$|^\d{1,2}:\d{2}$|^\d{1,2}/\d{1,2}(/\d{2,4})?$)");
  for (const auto& w : split_whitespace(label)) {
    if (kTimeWords.count(w) || std::regex_match(w, kDate)) return true;
  }
  return false;
}

MemorySpace::MemorySpace(std::string id, GraphConfig config)
    : id_(std::move(id)), config_(std::move(config)) {
  if (id_.empty()) throw Error(ErrorCode::kInvalidArgument, "space id is empty");
}

void MemorySpace::validate_unit(const MemoryUnit& u) const {
  if (u.provenance.empty()) throw Error(ErrorCode::kInvalidArgument, "unit has no provenance");
  if (u.content.empty()) throw Error(ErrorCode::kInvalidArgument, "unit content is empty");
  if (u.trace.recent.empty()) throw Error(ErrorCode::kInvalidArgument, "unit has no retrieval trace");
  if (u.embedding.size() != config_.embedding_dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                "embedding has " + std::to_string(u.embedding.size()) + " components, expected " +
                    std::to_string(config_.embedding_dim));
  }
  double sq = 0.0;
  for (float x : u.embedding) sq += static_cast<double>(x) * x;
  if (std::abs(std::sqrt(sq) - 1.0) > 1e-6) {
    throw Error(ErrorCode::kInvalidArgument, "embedding is not unit norm");
  }
  if (!(u.emotion_weight >= 0.0 && u.emotion_weight <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "emotion weight outside [0,1]");
  }
}

UnitId MemorySpace::insert_unit(MemoryUnit unit) {
  unit.space_id = id_;
  validate_unit(unit);
  unit.id = UnitId{next_unit_++};
  const UnitId id = unit.id;
  by_content_[unit.content].push_back(id);
  units_.push_back(std::move(unit));
  index_graph(units_.back());
  touch_unit(id);
  touch_meta();
  return id;
}

UnitId MemorySpace::upsert_unit(MemoryUnit unit) {
  if (auto it = by_content_.find(unit.content); it != by_content_.end()) {
    for (UnitId existing : it->second) {
      const MemoryUnit* u = find_unit(existing);
      if (!u || !u->is_retrievable()) continue;
      update_unit(existing, [&](MemoryUnit& target) {
        for (const auto& ref : unit.provenance) {
          if (std::find(target.provenance.begin(), target.provenance.end(), ref) ==
              target.provenance.end()) {
            target.provenance.push_back(ref);
          }
        }
      });
      return existing;
    }
  }
  return insert_unit(std::move(unit));
}

const MemoryUnit* MemorySpace::find_unit(UnitId id) const {
  auto it = find_by_id(units_, id);
  return it == units_.end() ? nullptr : &*it;
}

const MemoryUnit& MemorySpace::unit(UnitId id) const {
  if (const auto* u = find_unit(id)) return *u;
  throw Error(ErrorCode::kUnknownUnit, "unknown unit " + std::to_string(id.value));
}

MemoryUnit& MemorySpace::mutable_unit(UnitId id) {
  auto it = find_by_id(units_, id);
  if (it == units_.end()) throw Error(ErrorCode::kUnknownUnit, "unknown unit " + std::to_string(id.value));
  return *it;
}

GraphNode& MemorySpace::mutable_node(NodeId id) {
  auto it = find_by_id(nodes_, id);
  if (it == nodes_.end()) throw Error(ErrorCode::kUnknownNode, "unknown node " + std::to_string(id.value));
  return *it;
}

GraphEdge& MemorySpace::mutable_edge(EdgeId id) {
  auto it = find_by_id(edges_, id);
  if (it == edges_.end()) throw Error(ErrorCode::kInvalidArgument, "unknown edge " + std::to_string(id.value));
  return *it;
}

void MemorySpace::touch_unit(UnitId id) {
  ++version_;
  changes_.units.insert(id);
}
void MemorySpace::touch_node(NodeId id) {
  ++version_;
  changes_.nodes.insert(id);
}
void MemorySpace::touch_edge(EdgeId id) {
  ++version_;
  changes_.edges.insert(id);
}
void MemorySpace::touch_meta() {
  ++version_;
  changes_.meta = true;
}

void MemorySpace::reindex_content(UnitId id, const std::string& before, const std::string& after) {
  if (auto it = by_content_.find(before); it != by_content_.end()) {
    erase_value(it->second, id);
    if (it->second.empty()) by_content_.erase(it);
  }
  by_content_[after].push_back(id);
}

void MemorySpace::set_state(UnitId id, LifecycleState to, Timestamp now) {
  MemoryUnit& u = mutable_unit(id);
  if (u.state == to) return;
  if (!is_valid_transition(u.state, to)) {
    throw Error(ErrorCode::kInvalidArgument, "unit " + std::to_string(id.value) + ": " +
                                                 std::string(to_string(u.state)) + " -> " +
                                                 std::string(to_string(to)) + " is not allowed");
  }
  u.state = to;
  if (to == LifecycleState::kPendingForget) {
    u.pending_since = now;
  } else if (to == LifecycleState::kActive) {
    u.pending_since.reset();
  }
  touch_unit(id);
}

void MemorySpace::retire_unit(UnitId id, LifecycleState to, Timestamp now) {
  if (unit(id).state == LifecycleState::kActive) set_state(id, LifecycleState::kPendingForget, now);
  set_state(id, to, now);
}

void MemorySpace::merge_unit_into(UnitId from, UnitId into, Timestamp now) {
  if (from == into) return;
  const MemoryUnit source = unit(from);
  update_unit(into, [&](MemoryUnit& target) {
    for (const auto& ref : source.provenance) {
      if (std::find(target.provenance.begin(), target.provenance.end(), ref) == target.provenance.end()) {
        target.provenance.push_back(ref);
      }
    }
    std::sort(target.provenance.begin(), target.provenance.end(),
              [](const SourceRef& a, const SourceRef& b) { return std::tie(a.turn, a.id) < std::tie(b.turn, b.id); });
    target.trace = merge_traces(target.trace, source.trace, now);
    target.preference_tags.insert(source.preference_tags.begin(), source.preference_tags.end());
    target.emotion_weight = std::max(target.emotion_weight, source.emotion_weight);
  });
  for (auto& n : nodes_) {
    if (n.unit_refs.erase(from)) {
      n.unit_refs.insert(into);
      touch_node(n.id);
    }
  }
  for (auto& e : edges_) {
    if (e.sources.erase(from)) {
      e.sources.insert(into);
      touch_edge(e.id);
    }
  }
  retire_unit(from, LifecycleState::kSoftDeleted, now);
  update_unit(from, [&](MemoryUnit& u) { u.superseded_by = into; });
}

void MemorySpace::remove_unit(UnitId id) {
  auto it = find_by_id(units_, id);
  if (it == units_.end()) throw Error(ErrorCode::kUnknownUnit, "unknown unit " + std::to_string(id.value));
  if (auto c = by_content_.find(it->content); c != by_content_.end()) {
    erase_value(c->second, id);
    if (c->second.empty()) by_content_.erase(c);
  }
  units_.erase(it);
  changes_.units.erase(id);
  changes_.removed_units.insert(id);
  ++version_;

  std::vector<EdgeId> dead_edges;
  for (auto& e : edges_) {
    if (e.sources.erase(id)) {
      touch_edge(e.id);
      if (e.sources.empty()) dead_edges.push_back(e.id);
    }
  }
  for (EdgeId e : dead_edges) {
    const GraphEdge edge = this->edge(e);
    erase_edge_record(e);
    erase_value(adjacency_[edge.head], e);
    erase_value(adjacency_[edge.tail], e);
    edge_index_.erase({edge.head, edge.relation_label, edge.tail});
    changes_.edges.erase(e);
    changes_.removed_edges.insert(e);
  }
  std::vector<NodeId> dead_nodes;
  for (auto& n : nodes_) {
    if (n.unit_refs.erase(id)) {
      touch_node(n.id);
      if (n.unit_refs.empty()) dead_nodes.push_back(n.id);
    }
  }
  for (NodeId n : dead_nodes) {
    // Any remaining incident edge keeps the node alive.
    if (!incident_edges(n).empty()) continue;
    by_label_.erase(node(n).label);
    for (auto a = aliases_.begin(); a != aliases_.end();) {
      a = a->second == n ? aliases_.erase(a) : std::next(a);
    }
    erase_node_record(n);
    adjacency_.erase(n);
    changes_.nodes.erase(n);
    changes_.removed_nodes.insert(n);
    changes_.meta = true;
  }
}

const GraphNode* MemorySpace::find_node(NodeId id) const {
  auto it = find_by_id(nodes_, id);
  return it == nodes_.end() ? nullptr : &*it;
}

const GraphNode& MemorySpace::node(NodeId id) const {
  if (const auto* n = find_node(id)) return *n;
  throw Error(ErrorCode::kUnknownNode, "unknown node " + std::to_string(id.value));
}

std::optional<NodeId> MemorySpace::resolve(std::string_view label) const {
  const std::string key(label);
  if (auto it = by_label_.find(key); it != by_label_.end()) return it->second;
  if (auto it = aliases_.find(key); it != aliases_.end()) return it->second;
  return std::nullopt;
}

const GraphEdge* MemorySpace::find_edge(EdgeId id) const {
  auto it = find_by_id(edges_, id);
  return it == edges_.end() ? nullptr : &*it;
}

const GraphEdge& MemorySpace::edge(EdgeId id) const {
  if (const auto* e = find_edge(id)) return *e;
  throw Error(ErrorCode::kInvalidArgument, "unknown edge " + std::to_string(id.value));
}

const std::vector<EdgeId>& MemorySpace::incident_edges(NodeId id) const {
  static const std::vector<EdgeId> kNone;
  auto it = adjacency_.find(id);
  return it == adjacency_.end() ? kNone : it->second;
}

NodeId MemorySpace::ensure_node(const std::string& label, Timestamp created_at, UnitId unit) {
  if (auto existing = resolve(label)) {
    GraphNode& n = mutable_node(*existing);
    if (n.unit_refs.insert(unit).second) touch_node(n.id);
    return n.id;
  }
  GraphNode n;
  n.id = NodeId{next_node_++};
  n.label = label;
  n.kind = is_event_label(label) ? NodeKind::kEvent : NodeKind::kEntity;
  n.unit_refs = {unit};
  n.created_at = created_at;
  by_label_[label] = n.id;
  const NodeId id = n.id;
  nodes_.push_back(std::move(n));
  touch_node(id);
  touch_meta();
  return id;
}

void MemorySpace::index_graph(const MemoryUnit& u) {
  for (const auto& e : u.anchors.entities) {
    if (e.kind == EntityKind::kStrong) ensure_node(e.surface, u.created_at, u.id);
  }
  for (const auto& r : u.anchors.relations) {
    const NodeId head = ensure_node(r.head, u.created_at, u.id);
    const NodeId tail = ensure_node(r.tail, u.created_at, u.id);
    const auto key = std::make_tuple(head, r.label, tail);
    if (auto it = edge_index_.find(key); it != edge_index_.end()) {
      update_edge(it->second, [&](GraphEdge& e) {
        e.sources.insert(u.id);
        e.timestamp = std::max(e.timestamp, u.created_at);
        e.emotion_weight = std::max(e.emotion_weight, u.emotion_weight);
        if (e.validity == EdgeValidity::kFailed) {
          e.validity = EdgeValidity::kValid;
          e.strength = 1.0;
          e.last_weakened.reset();
        }
      });
      continue;
    }
    GraphEdge e;
    e.id = EdgeId{next_edge_++};
    e.head = head;
    e.tail = tail;
    e.relation_label = r.label;
    e.sources = {u.id};
    e.timestamp = u.created_at;
    e.emotion_weight = u.emotion_weight;
    edge_index_[key] = e.id;
    adjacency_[head].push_back(e.id);
    if (tail != head) adjacency_[tail].push_back(e.id);
    const EdgeId id = e.id;
    edges_.push_back(std::move(e));
    touch_edge(id);
    touch_meta();
  }
}

std::vector<MergeAction> MemorySpace::merge_similar_nodes(double threshold, const Embedder& embedder) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "merge threshold must lie in (0, 1]");
  }
  std::vector<Embedding> vecs;
  vecs.reserve(nodes_.size());
  for (const auto& n : nodes_) vecs.push_back(embedder.embed(n.label));

  struct Pair {
    double sim;
    std::size_t a, b;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes_.size(); ++j) {
      if (nodes_[i].kind != nodes_[j].kind) continue;
      const double sim = dot(vecs[i], vecs[j]);
      if (sim >= threshold - 1e-12) pairs.push_back({sim, i, j});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [&](const Pair& x, const Pair& y) {
    if (x.sim != y.sim) return x.sim > y.sim;
    return std::tie(nodes_[x.a].id, nodes_[x.b].id) < std::tie(nodes_[y.a].id, nodes_[y.b].id);
  });

  std::vector<std::pair<NodeId, NodeId>> plan;  // (survivor, merged), ids
  std::vector<MergeAction> actions;
  std::set<NodeId> gone;
  for (const auto& p : pairs) {
    const GraphNode& a = nodes_[p.a];
    const GraphNode& b = nodes_[p.b];
    if (gone.count(a.id) || gone.count(b.id)) continue;
    const bool a_first = std::tie(a.created_at, a.id) < std::tie(b.created_at, b.id);
    const NodeId survivor = a_first ? a.id : b.id;
    const NodeId merged = a_first ? b.id : a.id;
    gone.insert(merged);
    actions.push_back({survivor, merged, p.sim});
  }

  for (const auto& act : actions) {
    GraphNode victim = node(act.merged);
    GraphNode& keep = mutable_node(act.survivor);
    keep.unit_refs.insert(victim.unit_refs.begin(), victim.unit_refs.end());
    touch_node(keep.id);
    aliases_[victim.label] = keep.id;
    for (auto& [label, target] : aliases_) {
      if (target == victim.id) target = keep.id;
    }
    by_label_.erase(victim.label);
    for (EdgeId eid : std::vector<EdgeId>(incident_edges(victim.id))) {
      GraphEdge& e = mutable_edge(eid);
      edge_index_.erase({e.head, e.relation_label, e.tail});
      if (e.head == victim.id) e.head = keep.id;
      if (e.tail == victim.id) e.tail = keep.id;
      auto& adj = adjacency_[keep.id];
      if (std::find(adj.begin(), adj.end(), eid) == adj.end()) adj.push_back(eid);
      touch_edge(eid);
    }
    adjacency_.erase(victim.id);
    erase_node_record(victim.id);
    changes_.nodes.erase(victim.id);
    changes_.removed_nodes.insert(victim.id);
    fold_duplicate_edges(keep.id);
    touch_meta();
  }
  return actions;
}

void MemorySpace::fold_duplicate_edges(NodeId n) {
  std::map<std::tuple<NodeId, std::string, NodeId>, std::vector<EdgeId>> groups;
  for (EdgeId eid : incident_edges(n)) {
    const GraphEdge& e = edge(eid);
    groups[{e.head, e.relation_label, e.tail}].push_back(eid);
  }
  for (auto& [key, ids] : groups) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    const EdgeId keeper = ids.front();
    edge_index_[key] = keeper;
    for (std::size_t i = 1; i < ids.size(); ++i) {
      const GraphEdge dup = edge(ids[i]);
      update_edge(keeper, [&](GraphEdge& k) {
        k.sources.insert(dup.sources.begin(), dup.sources.end());
        k.timestamp = std::max(k.timestamp, dup.timestamp);
        k.emotion_weight = std::max(k.emotion_weight, dup.emotion_weight);
        k.path_uses += dup.path_uses;
        if (validity_rank(dup.validity) < validity_rank(k.validity) ||
            (dup.validity == k.validity && dup.strength > k.strength)) {
          k.validity = dup.validity;
          k.strength = dup.strength;
          k.last_weakened = dup.last_weakened;
        }
      });
      erase_value(adjacency_[dup.head], dup.id);
      erase_value(adjacency_[dup.tail], dup.id);
      erase_edge_record(dup.id);
      changes_.edges.erase(dup.id);
      changes_.removed_edges.insert(dup.id);
    }
  }
}

namespace {

using FunctionalGroups = std::map<std::pair<NodeId, std::string>, std::vector<const GraphEdge*>>;

// Older edges of each (head, functional label) group whose tail differs from
// the newest edge's tail.
std::vector<EdgeId> superseded_edges(const FunctionalGroups& groups) {
  std::vector<EdgeId> out;
  for (const auto& [key, group] : groups) {
    if (group.size() < 2) continue;
    const GraphEdge* newest = *std::max_element(group.begin(), group.end(), [](const GraphEdge* a, const GraphEdge* b) {
      return std::tie(a->timestamp, a->id) < std::tie(b->timestamp, b->id);
    });
    for (const GraphEdge* e : group) {
      if (e != newest && e->tail != newest->tail) out.push_back(e->id);
    }
  }
  return out;
}

}  // namespace

void MemorySpace::fail_edge(EdgeId id) {
  update_edge(id, [](GraphEdge& e) {
    e.validity = EdgeValidity::kFailed;
    e.strength = 0.0;
  });
}

std::vector<EdgeId> MemorySpace::detect_failed_edges(Timestamp now) {
  std::vector<EdgeId> failed;
  // (b) every source unit SoftDeleted.
  for (const auto& e : edges_) {
    if (e.validity == EdgeValidity::kFailed) continue;
    const bool all_deleted = std::all_of(e.sources.begin(), e.sources.end(), [&](UnitId u) {
      const MemoryUnit* unit = find_unit(u);
      return !unit || unit->state == LifecycleState::kSoftDeleted;
    });
    if (all_deleted) failed.push_back(e.id);
  }
  for (EdgeId id : failed) fail_edge(id);
  // (a) latest-wins over functional relations.
  FunctionalGroups groups;
  for (const auto& e : edges_) {
    if (e.validity == EdgeValidity::kFailed || !config_.is_functional(e.relation_label)) continue;
    groups[{e.head, e.relation_label}].push_back(&e);
  }
  for (EdgeId id : superseded_edges(groups)) {
    fail_edge(id);
    failed.push_back(id);
  }
  std::sort(failed.begin(), failed.end());
  return failed;
}

std::vector<EdgeId> MemorySpace::detect_failed_edges(Timestamp now, std::span<const UnitId> fresh) {
  // Fresh units are live, so only rule (a) can fire, and only in the
  // (head, label) groups their relations touch.
  FunctionalGroups groups;
  for (UnitId id : fresh) {
    for (const auto& r : unit(id).anchors.relations) {
      if (!config_.is_functional(r.label)) continue;
      const auto head = resolve(r.head);
      if (!head) continue;
      groups.try_emplace({*head, r.label});
    }
  }
  for (auto& [key, group] : groups) {
    for (EdgeId id : incident_edges(key.first)) {
      const GraphEdge& e = edge(id);
      if (e.head == key.first && e.relation_label == key.second && e.validity != EdgeValidity::kFailed) {
        group.push_back(&e);
      }
    }
  }
  std::vector<EdgeId> failed = superseded_edges(groups);
  for (EdgeId id : failed) fail_edge(id);
  std::sort(failed.begin(), failed.end());
  return failed;
}

void MemorySpace::bump_generation() {
  ++generation_;
  touch_meta();
}

std::int64_t MemorySpace::next_turn() {
  touch_meta();
  return next_turn_++;
}

void MemorySpace::push_context(std::string utterance) {
  context_.push_back(std::move(utterance));
  while (context_.size() > config_.context_window) context_.erase(context_.begin());
  touch_meta();
}

void MemorySpace::mark_envelope_applied(std::string envelope_id) {
  applied_envelopes_.insert(std::move(envelope_id));
  touch_meta();
}

void MemorySpace::set_last_reflection(Timestamp t) {
  last_reflection_ = t;
  touch_meta();
}

ChangeSet MemorySpace::take_changes() {
  ChangeSet out = std::move(changes_);
  changes_ = {};
  return out;
}

void MemorySpace::restore_unit(MemoryUnit unit) { insert_sorted(units_, std::move(unit)); }
void MemorySpace::restore_node(GraphNode node) { insert_sorted(nodes_, std::move(node)); }
void MemorySpace::restore_edge(GraphEdge edge) { insert_sorted(edges_, std::move(edge)); }

void MemorySpace::erase_unit_record(UnitId id) {
  if (auto it = find_by_id(units_, id); it != units_.end()) units_.erase(it);
}
void MemorySpace::erase_node_record(NodeId id) {
  if (auto it = find_by_id(nodes_, id); it != nodes_.end()) nodes_.erase(it);
}
void MemorySpace::erase_edge_record(EdgeId id) {
  if (auto it = find_by_id(edges_, id); it != edges_.end()) edges_.erase(it);
}

MemorySpace::Meta MemorySpace::meta() const {
  return Meta{next_unit_, next_node_,  next_edge_,          generation_, next_turn_,
              context_,   applied_envelopes_, last_reflection_, aliases_};
}

void MemorySpace::restore_meta(const Meta& m) {
  next_unit_ = m.next_unit;
  next_node_ = m.next_node;
  next_edge_ = m.next_edge;
  generation_ = m.generation;
  next_turn_ = m.next_turn;
  context_ = m.context;
  applied_envelopes_ = m.applied_envelopes;
  last_reflection_ = m.last_reflection;
  aliases_ = m.aliases;
}

void MemorySpace::rebuild_indexes() {
  by_content_.clear();
  by_label_.clear();
  adjacency_.clear();
  edge_index_.clear();
  for (const auto& u : units_) {
    by_content_[u.content].push_back(u.id);
    next_unit_ = std::max(next_unit_, u.id.value + 1);
  }
  for (const auto& n : nodes_) {
    by_label_[n.label] = n.id;
    next_node_ = std::max(next_node_, n.id.value + 1);
  }
  for (const auto& e : edges_) {
    edge_index_[{e.head, e.relation_label, e.tail}] = e.id;
    adjacency_[e.head].push_back(e.id);
    if (e.tail != e.head) adjacency_[e.tail].push_back(e.id);
    next_edge_ = std::max(next_edge_, e.id.value + 1);
  }
}

bool MemorySpace::same_contents(const MemorySpace& other) const {
  return id_ == other.id_ && units_ == other.units_ && nodes_ == other.nodes_ &&
         edges_ == other.edges_ && aliases_ == other.aliases_ && generation_ == other.generation_ &&
         next_turn_ == other.next_turn_ && context_ == other.context_ &&
         applied_envelopes_ == other.applied_envelopes_ && last_reflection_ == other.last_reflection_;
}

MemorySpace& GraphStore::create_space(const std::string& id) {
  auto it = spaces_.find(id);
  if (it == spaces_.end()) it = spaces_.emplace(id, MemorySpace(id, config_)).first;
  return it->second;
}

MemorySpace& GraphStore::space(const std::string& id) {
  auto it = spaces_.find(id);
  if (it == spaces_.end()) throw Error(ErrorCode::kSpaceUnknown, "unknown space " + id);
  return it->second;
}

const MemorySpace& GraphStore::space(const std::string& id) const {
  auto it = spaces_.find(id);
  if (it == spaces_.end()) throw Error(ErrorCode::kSpaceUnknown, "unknown space " + id);
  return it->second;
}

std::vector<std::string> GraphStore::space_ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : spaces_) out.push_back(id);
  return out;
}

UnitId GraphStore::upsert_unit(MemoryUnit unit) { return space(unit.space_id).upsert_unit(std::move(unit)); }

}  // namespace engram
