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

// Domain value types shared by every module: time, identifiers, semantic
// anchors, activation traces and memory units. All of these are plain values;
// mutation of stored units happens only inside MemorySpace.

#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace engram {

// Integer seconds since the epoch.
struct Timestamp {
  std::int64_t seconds = 0;

  auto operator<=>(const Timestamp&) const = default;
};

using Duration = std::int64_t;  // seconds

inline Duration operator-(Timestamp a, Timestamp b) { return a.seconds - b.seconds; }
inline Timestamp operator+(Timestamp t, Duration d) { return Timestamp{t.seconds + d}; }
inline Timestamp operator-(Timestamp t, Duration d) { return Timestamp{t.seconds - d}; }

inline constexpr Duration kMinute = 60;
inline constexpr Duration kHour = 60 * kMinute;
inline constexpr Duration kDay = 24 * kHour;

// Identifiers are distinct types so a node id can never be passed as a unit id.
template <typename Tag>
struct Id {
  std::uint64_t value = 0;

  auto operator<=>(const Id&) const = default;
};

struct UnitTag {};
struct NodeTag {};
struct EdgeTag {};
using UnitId = Id<UnitTag>;
using NodeId = Id<NodeTag>;
using EdgeId = Id<EdgeTag>;

using TagSet = std::set<std::string>;

enum class EmotionLabel { kNeutral, kPositive, kNegative, kAnxious, kFrustrated, kExcited };

std::string_view to_string(EmotionLabel label);
std::optional<EmotionLabel> parse_emotion_label(std::string_view name);

struct EmotionTag {
  EmotionLabel label = EmotionLabel::kNeutral;
  double intensity = 0.0;  // [0,1]; zero when neutral

  bool operator==(const EmotionTag&) const = default;
};

enum class EntityKind { kStrong, kWeak };

struct Entity {
  std::string surface;  // normalized
  EntityKind kind = EntityKind::kWeak;

  bool operator==(const Entity&) const = default;
};

struct Triple {
  std::string subject;
  std::string predicate;
  std::string object;

  bool operator==(const Triple&) const = default;
};

struct Relation {
  std::string head;
  std::string label;
  std::string tail;

  bool operator==(const Relation&) const = default;
};

// One extracted fact. `key` names the slot ("warranty period of kovalen"),
// `value` its filler, `label` the relation label used for functional checks.
struct Fact {
  std::string key;
  std::string value;
  std::string label;
  std::string statement;  // "key = value", or the bare key when value is empty

  bool operator==(const Fact&) const = default;
};

enum class TemporalClass { kPast, kPresent, kFuture, kRecurring, kAtemporal };

std::string_view to_string(TemporalClass tc);
std::optional<TemporalClass> parse_temporal_class(std::string_view name);

enum class UtteranceKind { kStatement, kQuestion, kAcknowledgment };

std::string_view to_string(UtteranceKind kind);
std::optional<UtteranceKind> parse_utterance_kind(std::string_view name);

struct SemanticAnchorSet {
  std::vector<Entity> entities;
  std::vector<Triple> triples;
  std::vector<Fact> facts;
  std::vector<Relation> relations;
  TemporalClass temporal_class = TemporalClass::kAtemporal;
  EmotionTag emotion;
  UtteranceKind utterance_kind = UtteranceKind::kStatement;
  TagSet tags;  // preference / topic / control tags found in the text

  bool operator==(const SemanticAnchorSet&) const = default;

  bool has_strong(std::string_view surface) const;
  std::vector<std::string> strong_entities() const;
};

// A run of folded retrieval events, treated as evenly spaced from `first` to
// `last`.
struct FoldedSpan {
  std::uint64_t count = 0;
  Timestamp first;
  Timestamp last;

  bool operator==(const FoldedSpan&) const = default;
};

// Retrieval history. Creation counts as the first retrieval. The most recent
// kMaxRecentEvents timestamps are kept exactly; older ones are folded into at
// most kMaxFoldedSpans evenly-spaced runs.
struct ActivationTrace {
  static constexpr std::size_t kMaxRecentEvents = 64;
  static constexpr std::size_t kMaxFoldedSpans = 16;

  std::vector<Timestamp> recent;  // ascending, never empty for a live unit
  std::uint64_t total_count = 0;
  std::vector<FoldedSpan> folded;  // ascending by first

  static ActivationTrace created_at(Timestamp t) { return ActivationTrace{{t}, 1, {}}; }

  Timestamp last_access() const { return recent.back(); }
  Timestamp first_access() const { return folded.empty() ? recent.front() : folded.front().first; }
  std::uint64_t folded_count() const { return total_count - recent.size(); }

  bool operator==(const ActivationTrace&) const = default;
};

enum class LifecycleState { kActive, kPendingForget, kSoftDeleted, kCompressed };

std::string_view to_string(LifecycleState state);
std::optional<LifecycleState> parse_lifecycle_state(std::string_view name);

// True when `to` is reachable from `from` in one lifecycle step.
bool is_valid_transition(LifecycleState from, LifecycleState to);

enum class UnitKind { kFact, kQuestion, kAcknowledgment, kRemark };

std::string_view to_string(UnitKind kind);
std::optional<UnitKind> parse_unit_kind(std::string_view name);

struct SourceRef {
  std::string id;         // utterance id, or an opaque foreign unit id
  std::int64_t turn = -1;  // dialogue position inside the space, -1 if foreign

  auto operator<=>(const SourceRef&) const = default;
};

inline constexpr std::string_view kPinnedTag = "pinned";
inline constexpr std::string_view kPrivateTag = "private";

struct MemoryUnit {
  UnitId id;
  std::string space_id;
  std::string content;  // normalized
  SemanticAnchorSet anchors;
  std::vector<float> embedding;
  Timestamp created_at;
  ActivationTrace trace;
  double emotion_weight = 0.0;
  TagSet preference_tags;
  LifecycleState state = LifecycleState::kActive;
  std::vector<SourceRef> provenance;

  UnitKind kind = UnitKind::kRemark;
  std::string speaker;
  std::optional<Timestamp> pending_since;
  std::optional<UnitId> superseded_by;
  bool conflict_unresolved = false;

  bool operator==(const MemoryUnit&) const = default;

  const Fact* primary_fact() const {
    return anchors.facts.empty() ? nullptr : &anchors.facts.front();
  }
  bool is_retrievable() const {
    return state == LifecycleState::kActive || state == LifecycleState::kPendingForget;
  }
  bool has_tag(std::string_view tag) const { return preference_tags.count(std::string(tag)) > 0; }
  std::int64_t first_turn() const;
};

// Whitespace token count; the engine's model-agnostic token proxy.
std::size_t count_tokens(std::string_view text);

}  // namespace engram

template <typename Tag>
struct std::hash<engram::Id<Tag>> {
  std::size_t operator()(const engram::Id<Tag>& id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value);
  }
};
