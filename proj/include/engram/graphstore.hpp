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

// The memory knowledge graph of one memory space: unit storage, entity nodes,
// attributed relation edges, node merging, edge-failure detection and
// persistence.
//
// Only Strong entities become nodes; Weak entities stay inside unit anchors.
// Edges carry the set of units asserting them; re-asserting an edge updates
// its timestamp (latest assertion) and revalidates it if it had failed.
// Every mutation bumps version() and is recorded for the journal.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "engram/core.hpp"
#include "engram/embedding.hpp"

namespace engram {

enum class NodeKind { kEntity, kEvent };
enum class EdgeValidity { kValid, kWeakened, kFailed };

std::string_view to_string(NodeKind kind);
std::optional<NodeKind> parse_node_kind(std::string_view name);
std::string_view to_string(EdgeValidity validity);
std::optional<EdgeValidity> parse_edge_validity(std::string_view name);

struct GraphNode {
  NodeId id;
  std::string label;
  NodeKind kind = NodeKind::kEntity;
  std::set<UnitId> unit_refs;
  Timestamp created_at;

  bool operator==(const GraphNode&) const = default;
};

struct GraphEdge {
  EdgeId id;
  NodeId head;
  NodeId tail;
  std::string relation_label;
  std::set<UnitId> sources;
  Timestamp timestamp;  // latest assertion
  double emotion_weight = 0.0;
  double strength = 1.0;
  EdgeValidity validity = EdgeValidity::kValid;
  std::optional<Timestamp> last_weakened;
  std::uint64_t path_uses = 0;  // retrieval traversals since the last reflection

  bool operator==(const GraphEdge&) const = default;
};

struct GraphConfig {
  std::size_t embedding_dim = kDefaultDimension;
  std::set<std::string> functional_relations = {
      "lives_in",       "works_at",         "located_in", "reports_to", "warranty_period",
      "return_window",  "price",            "support_tier", "home_city", "account_manager",
      "headquarters_city"};
  double weaken_ceiling = 1.0;  // Weakened edges sit strictly below this
  double fail_below = 0.01;     // weakened strength under this fails the edge
  std::size_t context_window = 4;  // prior utterances kept for annotation

  bool is_functional(std::string_view label) const {
    return functional_relations.count(std::string(label)) > 0;
  }
};

struct MergeAction {
  NodeId survivor;
  NodeId merged;
  double similarity = 0.0;
};

// Ids of everything touched since the last take_changes().
struct ChangeSet {
  std::set<UnitId> units;
  std::set<NodeId> nodes;
  std::set<EdgeId> edges;
  std::set<UnitId> removed_units;
  std::set<NodeId> removed_nodes;
  std::set<EdgeId> removed_edges;
  bool meta = false;

  bool empty() const {
    return units.empty() && nodes.empty() && edges.empty() && removed_units.empty() &&
           removed_nodes.empty() && removed_edges.empty() && !meta;
  }
};

class MemorySpace {
 public:
  explicit MemorySpace(std::string id, GraphConfig config = {});

  const std::string& id() const { return id_; }
  const GraphConfig& config() const { return config_; }
  void set_config(GraphConfig config) { config_ = std::move(config); }

  // Stores the unit under a fresh id, indexing its Strong entities as nodes
  // and its relations as edges. Throws kInvalidArgument when the unit breaks
  // a core invariant (empty provenance, wrong dimension, non-unit embedding).
  UnitId insert_unit(MemoryUnit unit);
  // Like insert_unit, but identical normalized content in a live unit of
  // this space returns that unit's id and merges provenance instead.
  UnitId upsert_unit(MemoryUnit unit);

  const std::vector<MemoryUnit>& units() const { return units_; }
  const MemoryUnit* find_unit(UnitId id) const;
  const MemoryUnit& unit(UnitId id) const;  // throws kUnknownUnit
  std::size_t size() const { return units_.size(); }

  // Applies `fn` to a stored unit. Content changes are reindexed.
  template <typename F>
  void update_unit(UnitId id, F&& fn) {
    MemoryUnit& u = mutable_unit(id);
    const std::string before = u.content;
    fn(u);
    if (u.content != before) reindex_content(id, before, u.content);
    touch_unit(id);
  }
  // Validated lifecycle step; entering PendingForget stamps pending_since.
  void set_state(UnitId id, LifecycleState to, Timestamp now);
  // Walks Active -> PendingForget -> `to` as needed for SoftDeleted/Compressed.
  void retire_unit(UnitId id, LifecycleState to, Timestamp now);
  // Folds `from` into `into`: provenance and traces unioned, node and edge
  // references re-pointed, `from` SoftDeleted with superseded_by = into.
  void merge_unit_into(UnitId from, UnitId into, Timestamp now);
  // Hard removal, for explicit purge only.
  void remove_unit(UnitId id);

  const std::vector<GraphNode>& nodes() const { return nodes_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  const GraphNode* find_node(NodeId id) const;
  const GraphNode& node(NodeId id) const;  // throws kUnknownNode
  // Node for a normalized label or a recorded alias.
  std::optional<NodeId> resolve(std::string_view label) const;
  const std::map<std::string, NodeId>& aliases() const { return aliases_; }
  const GraphEdge* find_edge(EdgeId id) const;
  const GraphEdge& edge(EdgeId id) const;
  const std::vector<EdgeId>& incident_edges(NodeId id) const;

  template <typename F>
  void update_edge(EdgeId id, F&& fn) {
    fn(mutable_edge(id));
    touch_edge(id);
  }

  // Merges same-kind node pairs whose label embeddings have cosine >=
  // threshold, into the earlier-created node, processing pairs by
  // (similarity desc, ids asc). Throws kInvalidArgument unless threshold in (0,1].
  std::vector<MergeAction> merge_similar_nodes(double threshold, const Embedder& embedder);

  // Fails older edges of functional relations contradicted by a newer edge
  // with the same head, and edges whose source units are all SoftDeleted.
  // Returns the newly failed edges.
  std::vector<EdgeId> detect_failed_edges(Timestamp now);
  // The same, limited to what inserting `fresh` units can change; ingest
  // uses this to stay linear.
  std::vector<EdgeId> detect_failed_edges(Timestamp now, std::span<const UnitId> fresh);

  // Space metadata.
  std::uint64_t version() const { return version_; }
  std::uint64_t generation() const { return generation_; }
  void bump_generation();
  std::int64_t next_turn();
  std::int64_t turn_count() const { return next_turn_; }
  const std::vector<std::string>& recent_context() const { return context_; }
  void push_context(std::string utterance);
  const std::set<std::string>& applied_envelopes() const { return applied_envelopes_; }
  void mark_envelope_applied(std::string envelope_id);
  std::optional<Timestamp> last_reflection() const { return last_reflection_; }
  void set_last_reflection(Timestamp t);

  ChangeSet take_changes();
  const ChangeSet& pending_changes() const { return changes_; }

  // Persistence hooks: raw record placement without graph indexing side
  // effects. Used by snapshot/journal replay.
  void restore_unit(MemoryUnit unit);
  void restore_node(GraphNode node);
  void restore_edge(GraphEdge edge);
  void erase_unit_record(UnitId id);
  void erase_node_record(NodeId id);
  void erase_edge_record(EdgeId id);
  void restore_alias(std::string label, NodeId id) { aliases_[std::move(label)] = id; }

  struct Meta {
    std::uint64_t next_unit = 1;
    std::uint64_t next_node = 1;
    std::uint64_t next_edge = 1;
    std::uint64_t generation = 0;
    std::int64_t next_turn = 0;
    std::vector<std::string> context;
    std::set<std::string> applied_envelopes;
    std::optional<Timestamp> last_reflection;
    std::map<std::string, NodeId> aliases;
  };
  Meta meta() const;
  void restore_meta(const Meta& meta);
  // Rebuilds every derived index from the stored records.
  void rebuild_indexes();

  // Observational equality: records and metadata, ignoring change tracking.
  bool same_contents(const MemorySpace& other) const;

 private:
  MemoryUnit& mutable_unit(UnitId id);
  GraphEdge& mutable_edge(EdgeId id);
  GraphNode& mutable_node(NodeId id);
  void touch_unit(UnitId id);
  void touch_node(NodeId id);
  void touch_edge(EdgeId id);
  void touch_meta();
  void fail_edge(EdgeId id);
  void validate_unit(const MemoryUnit& unit) const;
  void index_graph(const MemoryUnit& unit);
  NodeId ensure_node(const std::string& label, Timestamp created_at, UnitId unit);
  void reindex_content(UnitId id, const std::string& before, const std::string& after);
  void fold_duplicate_edges(NodeId node);

  std::string id_;
  GraphConfig config_;
  std::vector<MemoryUnit> units_;  // ascending id
  std::vector<GraphNode> nodes_;   // ascending id
  std::vector<GraphEdge> edges_;   // ascending id
  std::unordered_map<std::string, std::vector<UnitId>> by_content_;
  std::unordered_map<std::string, NodeId> by_label_;
  std::map<std::string, NodeId> aliases_;
  std::unordered_map<NodeId, std::vector<EdgeId>> adjacency_;
  std::map<std::tuple<NodeId, std::string, NodeId>, EdgeId> edge_index_;

  std::uint64_t next_unit_ = 1;
  std::uint64_t next_node_ = 1;
  std::uint64_t next_edge_ = 1;
  std::uint64_t version_ = 0;
  std::uint64_t generation_ = 0;
  std::int64_t next_turn_ = 0;
  std::vector<std::string> context_;
  std::set<std::string> applied_envelopes_;
  std::optional<Timestamp> last_reflection_;
  ChangeSet changes_;
};

// Several spaces keyed by id.
class GraphStore {
 public:
  explicit GraphStore(GraphConfig config = {}) : config_(std::move(config)) {}

  MemorySpace& create_space(const std::string& id);  // returns existing if present
  MemorySpace& space(const std::string& id);         // throws kSpaceUnknown
  const MemorySpace& space(const std::string& id) const;
  bool has_space(const std::string& id) const { return spaces_.count(id) > 0; }
  std::vector<std::string> space_ids() const;
  // Routes by unit.space_id. Throws kSpaceUnknown.
  UnitId upsert_unit(MemoryUnit unit);

 private:
  GraphConfig config_;
  std::map<std::string, MemorySpace> spaces_;
};

// True when the label names a date or time ("monday", "2024-05-01", ...).
bool is_event_label(std::string_view label);

// Snapshot directory layout:
//   manifest.json          {"format": "engram-snapshot", "version": 1, "epoch": e,
//                           "records_file": "records-<e>.jsonl", "records": n,
//                           "sha256": <hex of the records file>, "space": id,
//                           "generation": g}
//   records-<e>.jsonl      one {"type": "meta"|"unit"|"node"|"edge", ...} per line
//   journal.jsonl          upserts/removals since the snapshot, tagged with the
//                          epoch they apply to
inline constexpr int kSnapshotVersion = 1;

// Writes a compacted snapshot (atomically, via rename) and empties the journal.
void save_snapshot(const MemorySpace& space, const std::filesystem::path& dir);
// Loads snapshot + journal. Throws kCorruptSnapshot on checksum or parse
// failure (a torn final journal line is ignored), kVersionUnsupported on an
// unknown manifest version.
MemorySpace load_snapshot(const std::filesystem::path& dir, GraphConfig config = {});
// Appends the given changes to the journal.
void append_journal(const MemorySpace& space, const ChangeSet& changes,
                    const std::filesystem::path& dir);

// Canonical export: a {"type": "space", ...} header line, then meta, units,
// nodes and edges in ascending id order, keys sorted. Importing an export and
// exporting again reproduces it byte for byte.
std::string export_jsonl(const MemorySpace& space);
// Throws kCorruptSnapshot on malformed input.
MemorySpace import_jsonl(std::string_view text, GraphConfig config = {});

}  // namespace engram
