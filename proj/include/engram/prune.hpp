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

// Semantic pruning: association mapping, redundancy classification and
// refinement.
//
// Classification, in precedence order:
//   Duplicate   cosine >= dup_threshold with an earlier distinct content of
//               the same unit kind; fact units must also share the fact key
//               and agree on every number and named entity in the value.
//               Acknowledgments never count as duplicates.
//   Outdated    a newer unit holds a conflicting value for the same fact key,
//               and this unit's relation edge has failed or its retention is
//               below outdated_threshold.
//   Irrelevant  acknowledgments; and other non-fact turns with no entity or
//               question-answer link to a fact unit, no tags, and activation
//               strictly below the median activation of fact units.
// Activations are evaluated as if duplicate groups were already merged, so a
// second classify+refine pass over the result is a no-op.

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "engram/activation.hpp"
#include "engram/graphstore.hpp"

namespace engram {

enum class LinkKind { kSharedEntity, kQuestionAnswer, kAnswerConfirmation };
std::string_view to_string(LinkKind kind);

struct AssociationLink {
  UnitId a;  // a < b
  UnitId b;
  LinkKind kind;

  auto operator<=>(const AssociationLink&) const = default;
};

class AssociationMap {
 public:
  // Units linked to `u`, with the kind of each link. Shared-entity links are
  // reported once per neighbour even when several nodes are shared.
  std::map<UnitId, std::set<LinkKind>> links_of(UnitId u) const;
  bool linked(UnitId a, UnitId b) const;
  // Every link, sorted. Quadratic in node fan-out; meant for inspection.
  std::vector<AssociationLink> all_links() const;

 private:
  friend AssociationMap build_association_map(const MemorySpace& space);
  std::map<UnitId, std::set<NodeId>> nodes_of_;
  std::map<NodeId, std::vector<UnitId>> units_of_;
  std::map<UnitId, std::map<UnitId, std::set<LinkKind>>> chain_;
};

// Links between live units (Active or PendingForget) sharing a Strong-entity
// node, plus dialogue-chain links by turn adjacency: a question to the fact
// units of the next turn, and an answer to an acknowledgment in the turn
// after it.
AssociationMap build_association_map(const MemorySpace& space);

enum class RedundancyClass { kDuplicate, kIrrelevant, kOutdated, kKeep };
std::string_view to_string(RedundancyClass c);

struct Evidence {
  std::string rule;
  double value = 0.0;  // similarity, activation or retention, per rule
};

struct RedundancyVerdict {
  UnitId unit;
  RedundancyClass cls = RedundancyClass::kKeep;
  std::optional<UnitId> merge_target;  // Duplicate: group head; Outdated: superseding unit
  Evidence evidence;
};

struct PruneConfig {
  double dup_threshold = 0.92;
  double outdated_threshold = 0.35;
};

struct VerdictSet {
  std::uint64_t store_version = 0;
  std::vector<RedundancyVerdict> verdicts;  // one per live unit, ascending id

  std::size_t count(RedundancyClass c) const;
};

VerdictSet classify_redundancy(const MemorySpace& space, const AssociationMap& map, Timestamp now,
                               const PruneConfig& cfg, const ActivationParams& params);

struct PruneReport {
  std::size_t units_removed = 0;     // Irrelevant -> SoftDeleted
  std::size_t units_merged = 0;      // Duplicate -> merged into target
  std::size_t units_compressed = 0;  // Outdated -> Compressed
  std::size_t tokens_before = 0;
  std::size_t tokens_after = 0;

  bool empty() const { return units_removed == 0 && units_merged == 0 && units_compressed == 0; }
};

// Applies verdicts. Throws kStaleVerdicts when the space changed since
// classification. Merged groups keep the longest member's content.
PruneReport refine(const VerdictSet& verdicts, MemorySpace& space, Timestamp now,
                   const Embedder& embedder);

// Whitespace tokens over live units.
std::size_t live_tokens(const MemorySpace& space);

// Tokens a perfect deduplicator could drop: live acknowledgments plus every
// live unit whose content repeats an earlier live unit's content.
std::size_t redundant_token_bound(const MemorySpace& space);

// Distinct fact keys over live units.
std::set<std::string> live_fact_keys(const MemorySpace& space);

// One-line summary left behind by compression: "<fact key> @<created_at>".
std::string compression_summary(const MemoryUnit& unit);

// Compresses a unit in place: summary content (when shorter), supersession
// pointer, Compressed state.
void compress_unit(MemorySpace& space, UnitId id, std::optional<UnitId> superseded_by, Timestamp now,
                   const Embedder& embedder);

// True when two fact values agree on every number and named entity.
bool values_compatible(const MemoryUnit& a, const MemoryUnit& b);

}  // namespace engram
