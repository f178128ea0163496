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
// The engine: memory spaces, the annotation pipeline, maintenance and the hub
// behind one thread-safe facade. The HTTP service and the CLI are thin
// layers over this class.
//
// Locking: a registry lock guards the space map; every space has its own
// shared_mutex. Reads (query scoring, stats, export, share) take it shared,
// mutations (ingest, access recording, maintenance, import, purge, apply)
// exclusively, so writes to one space are serialized while other spaces
// proceed.
//
// Persistence (when a data directory is configured): <data_dir>/<space>/ holds
// a snapshot plus journal; every mutation appends to the journal and
// maintenance, import and purge write a compacted snapshot. Agents live in
// <data_dir>/hub.json.

#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <type_traits>
#include <vector>

#include "engram/config.hpp"
#include "engram/forget.hpp"
#include "engram/hub.hpp"
#include "engram/prune.hpp"
#include "engram/reflect.hpp"

namespace engram {

struct IngestRequest {
  std::string utterance;
  std::string speaker = "user";
  std::optional<Timestamp> ts;  // defaults to the wall clock
};

struct IngestResult {
  std::int64_t turn = 0;
  std::vector<UnitId> units;
  std::vector<EdgeId> edges_failed;
};

struct QueryRequest {
  std::string text;
  std::optional<std::size_t> k;  // defaults to retrieval.default_k
  TagSet tags;
  std::optional<Timestamp> ts;
  std::optional<ScoreWeights> weights;
  bool record_access = true;
};

struct QueryHit {
  UnitId unit;
  double score = 0.0;
  std::string content;
  std::optional<Fact> fact;
  LifecycleState state = LifecycleState::kActive;
  std::vector<EdgeId> path;
};

struct QueryResult {
  std::vector<QueryHit> hits;  // score >= retrieval.score_floor, best first
  std::size_t tokens = 0;      // tokens of the returned contents
};

enum class Pass { kPrune, kForget, kReflect };
std::string_view to_string(Pass p);
std::optional<Pass> parse_pass(std::string_view name);

struct MaintainRequest {
  std::vector<Pass> passes;
  std::optional<Timestamp> ts;
  bool dry_run = false;
  std::vector<FeedbackEntry> feedback;  // reflect only
};

struct MaintainResult {
  bool dry_run = false;
  std::optional<VerdictSet> verdicts;
  std::optional<PruneReport> prune;
  std::optional<ForgetReport> forget;
  std::optional<ReflectionReport> reflect;
  std::uint64_t generation = 0;
};

struct SpaceStats {
  std::string id;
  std::map<std::string, std::size_t> units_by_state;
  std::map<std::string, std::size_t> edges_by_validity;
  std::size_t units = 0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t live_tokens = 0;
  std::size_t fact_keys = 0;
  std::int64_t turns = 0;
  std::uint64_t version = 0;
  std::uint64_t generation = 0;
  std::optional<Timestamp> last_reflection;
};

struct ShareRequest {
  std::string agent_id;
  TagSet topic;
  Permissions permissions;
  std::optional<Timestamp> ts;
};

struct ApplyRequest {
  ShareEnvelope envelope;
  std::string agent_id;
  std::optional<Timestamp> ts;
};

Timestamp wall_clock();

class MemoryEngine {
 public:
  // Loads every space (and the hub registry) found under the configured
  // data_dir when `persist` is set. Throws kCorruptSnapshot and friends.
  explicit MemoryEngine(EngineConfig config, bool persist = false);
  ~MemoryEngine();
  MemoryEngine(const MemoryEngine&) = delete;
  MemoryEngine& operator=(const MemoryEngine&) = delete;

  const EngineConfig& config() const { return config_; }
  const Embedder& embedder() const { return *embedder_; }
  const AnchorSource& annotator() const { return *anchor_source_; }

  // Creates the space on first use. Throws kEmptyUtterance.
  IngestResult ingest(const std::string& space, const IngestRequest& req);

  // Throws kSpaceUnknown, kInvalidArgument (k = 0, bad weights).
  QueryResult query(const std::string& space, const QueryRequest& req);

  // Runs the passes in the order given. A dry run works on a copy and never
  // touches the store or disk.
  MaintainResult maintain(const std::string& space, const MaintainRequest& req);

  SpaceStats stats(const std::string& space) const;
  std::vector<std::string> spaces() const;
  bool has_space(const std::string& space) const;

  // Canonical JSONL of one space.
  std::string export_space(const std::string& space) const;
  // Creates or replaces the space named in the export; returns its id.
  std::string import_space(std::string_view jsonl);

  // Physically removes SoftDeleted units. Throws kInvalidArgument unless
  // confirmed. Returns the number of units removed.
  std::size_t purge(const std::string& space, bool confirm);

  // Hub. Registering an agent creates its space.
  void register_agent(const AgentProfile& profile);
  std::vector<AgentProfile> agents() const;
  std::string route(const TagSet& tags) const;
  ShareEnvelope share(const ShareRequest& req);
  ApplyReport apply(const ApplyRequest& req);

  // Bumped by every committed mutation, across all spaces.
  std::uint64_t generation() const { return generation_.load(); }

  // Read access to a space under its shared lock, for tests and tools.
  template <typename F>
  auto inspect(const std::string& space, F&& fn) const {
    const Slot& s = slot(space);
    std::shared_lock lock(s.mu);
    return fn(static_cast<const MemorySpace&>(s.space));
  }

  // Direct mutation under the space's exclusive lock; changes are journaled
  // like any other write. For tools and tests that drive single passes.
  template <typename F>
  auto modify(const std::string& space, F&& fn) {
    Slot& s = slot(space);
    std::unique_lock lock(s.mu);
    if constexpr (std::is_void_v<decltype(fn(s.space))>) {
      fn(s.space);
      commit(s);
    } else {
      auto result = fn(s.space);
      commit(s);
      return result;
    }
  }

 private:
  struct Slot {
    explicit Slot(MemorySpace sp) : space(std::move(sp)) {}
    mutable std::shared_mutex mu;
    MemorySpace space;
  };

  Slot& slot(const std::string& space);
  const Slot& slot(const std::string& space) const;
  Slot& slot_or_create(const std::string& space);
  std::filesystem::path dir_of(const std::string& space) const;
  void commit(Slot& s);            // journal the pending changes
  void commit_snapshot(Slot& s);   // compacted snapshot
  void save_hub() const;
  Timestamp now_or(const std::optional<Timestamp>& ts) const;

  EngineConfig config_;
  bool persist_;
  std::unique_ptr<Embedder> embedder_;
  std::unique_ptr<Annotator> annotator_;
  std::unique_ptr<AnchorSource> adapter_;
  const AnchorSource* anchor_source_ = nullptr;

  mutable std::shared_mutex registry_mu_;
  std::map<std::string, std::unique_ptr<Slot>> slots_;

  mutable std::mutex hub_mu_;
  MemoryHub hub_;

  std::atomic<std::uint64_t> generation_{0};
};

}  // namespace engram
