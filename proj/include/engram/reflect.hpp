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

// Offline reflection over one memory space.
//
//   temporal  advisory findings: creation times out of dialogue order, and
//             fact-key chains whose timeline runs backwards (a Future
//             statement recorded after a Past one)
//   factual   functional-relation conflicts: the newest value replaces older
//             ones outside the ambiguity window; inside it the values are
//             fused into one unit flagged conflict_unresolved
//   logical   path reinforcement from retrieval traversals, dangling chains
//             (a node left with one usable edge after another failed) and
//             cycles among functional relations
//
// run_reflection_cycle chains the three passes with prune and a forgetting
// sweep on a copy of the space and swaps it in only when every pass
// succeeded.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "engram/activation.hpp"
#include "engram/forget.hpp"
#include "engram/graphstore.hpp"
#include "engram/prune.hpp"

namespace engram {

struct ReflectConfig {
  Duration ambiguity_window = kHour;
  double reinforce_delta = 0.1;
  double strength_cap = 10.0;
  // Node alias merge threshold for the logical pass; 0 disables merging.
  double node_merge_threshold = 0.9;
};

struct TemporalFinding {
  enum class Kind { kOrdering, kInversion };
  Kind kind;
  UnitId unit;
  UnitId reference;  // the earlier unit it disagrees with
  std::string detail;
};
std::string_view to_string(TemporalFinding::Kind kind);

std::vector<TemporalFinding> reflect_temporal(const MemorySpace& space);

struct Resolution {
  enum class Kind { kReplacement, kFusion };
  Kind kind;
  std::string key;
  UnitId kept;
  std::vector<UnitId> superseded;
};
std::string_view to_string(Resolution::Kind kind);

std::vector<Resolution> reflect_factual(MemorySpace& space, Timestamp now, const ReflectConfig& cfg,
                                        const Embedder& embedder);

struct Reinforcement {
  EdgeId edge;
  double before = 0.0;
  double after = 0.0;
};

struct LogicalFindings {
  std::vector<Reinforcement> reinforced;
  std::vector<NodeId> dangling;
  std::vector<std::vector<NodeId>> functional_cycles;  // each sorted, list sorted
};

LogicalFindings reflect_logical(MemorySpace& space, const ReflectConfig& cfg);

struct FeedbackEntry {
  UnitId unit;
  double delta = 0.0;
};

// JSON lines of {"unit_id": n, "delta": x}; blank lines skipped. Throws kIo
// when unreadable, kInvalidArgument on a malformed line.
std::vector<FeedbackEntry> load_feedback(const std::filesystem::path& path);

struct MaintenanceSettings {
  ActivationParams activation;
  PruneConfig prune;
  ForgetConfig forget;
  ReflectConfig reflect;
};

struct ReflectionReport {
  std::uint64_t generation = 0;
  std::vector<UnitId> feedback_applied;
  std::vector<UnitId> feedback_unknown;
  std::vector<TemporalFinding> temporal;
  std::vector<Resolution> resolutions;
  std::vector<EdgeId> edges_failed;
  std::vector<MergeAction> node_merges;
  LogicalFindings logical;
  PruneReport prune;
  ForgetReport forget;

  // True when the cycle changed anything besides the generation counter.
  bool mutated() const;
};

ReflectionReport run_reflection_cycle(MemorySpace& space, Timestamp now, const MaintenanceSettings& settings,
                                      const Embedder& embedder, const std::vector<FeedbackEntry>& feedback = {});

}  // namespace engram
