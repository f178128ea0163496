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

#include "engram/core.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "engram/error.hpp"
#include "engram/text.hpp"

namespace engram {
namespace {

template <typename Enum, std::size_t N>
std::string_view name_of(const std::array<std::pair<Enum, std::string_view>, N>& table, Enum e) {
  for (const auto& [value, name] : table) {
    if (value == e) return name;
  }
  return "unknown";
}

template <typename Enum, std::size_t N>
std::optional<Enum> parse_of(const std::array<std::pair<Enum, std::string_view>, N>& table,
                             std::string_view s) {
  for (const auto& [value, name] : table) {
    if (name == s) return value;
  }
  return std::nullopt;
}

constexpr std::array<std::pair<EmotionLabel, std::string_view>, 6> kEmotionNames{{
    {EmotionLabel::kNeutral, "neutral"},
    {EmotionLabel::kPositive, "positive"},
    {EmotionLabel::kNegative, "negative"},
    {EmotionLabel::kAnxious, "anxious"},
    {EmotionLabel::kFrustrated, "frustrated"},
    {EmotionLabel::kExcited, "excited"},
}};

constexpr std::array<std::pair<TemporalClass, std::string_view>, 5> kTemporalNames{{
    {TemporalClass::kPast, "past"},
    {TemporalClass::kPresent, "present"},
    {TemporalClass::kFuture, "future"},
    {TemporalClass::kRecurring, "recurring"},
    {TemporalClass::kAtemporal, "atemporal"},
}};

constexpr std::array<std::pair<UtteranceKind, std::string_view>, 3> kUtteranceNames{{
    {UtteranceKind::kStatement, "statement"},
    {UtteranceKind::kQuestion, "question"},
    {UtteranceKind::kAcknowledgment, "acknowledgment"},
}};

constexpr std::array<std::pair<LifecycleState, std::string_view>, 4> kStateNames{{
    {LifecycleState::kActive, "active"},
    {LifecycleState::kPendingForget, "pending_forget"},
    {LifecycleState::kSoftDeleted, "soft_deleted"},
    {LifecycleState::kCompressed, "compressed"},
}};

constexpr std::array<std::pair<UnitKind, std::string_view>, 4> kUnitKindNames{{
    {UnitKind::kFact, "fact"},
    {UnitKind::kQuestion, "question"},
    {UnitKind::kAcknowledgment, "acknowledgment"},
    {UnitKind::kRemark, "remark"},
}};

}  // namespace

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kEmptyText: return "EmptyText";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kEmptyHistory: return "EmptyHistory";
    case ErrorCode::kClockSkew: return "ClockSkew";
    case ErrorCode::kEmptyUtterance: return "EmptyUtterance";
    case ErrorCode::kSpaceUnknown: return "SpaceUnknown";
    case ErrorCode::kUnknownUnit: return "UnknownUnit";
    case ErrorCode::kUnknownNode: return "UnknownNode";
    case ErrorCode::kCorruptSnapshot: return "CorruptSnapshot";
    case ErrorCode::kVersionUnsupported: return "VersionUnsupported";
    case ErrorCode::kStaleVerdicts: return "StaleVerdicts";
    case ErrorCode::kNotSoftDeleted: return "NotSoftDeleted";
    case ErrorCode::kDuplicateAgent: return "DuplicateAgent";
    case ErrorCode::kUnknownAgent: return "UnknownAgent";
    case ErrorCode::kNoAgents: return "NoAgents";
    case ErrorCode::kEmptySelection: return "EmptySelection";
    case ErrorCode::kPermissionDenied: return "PermissionDenied";
    case ErrorCode::kExpired: return "Expired";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kBindFailure: return "BindFailure";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

std::string_view to_string(EmotionLabel label) { return name_of(kEmotionNames, label); }
std::optional<EmotionLabel> parse_emotion_label(std::string_view s) {
  return parse_of(kEmotionNames, s);
}

std::string_view to_string(TemporalClass tc) { return name_of(kTemporalNames, tc); }
std::optional<TemporalClass> parse_temporal_class(std::string_view s) {
  return parse_of(kTemporalNames, s);
}

std::string_view to_string(UtteranceKind kind) { return name_of(kUtteranceNames, kind); }
std::optional<UtteranceKind> parse_utterance_kind(std::string_view s) {
  return parse_of(kUtteranceNames, s);
}

std::string_view to_string(LifecycleState state) { return name_of(kStateNames, state); }
std::optional<LifecycleState> parse_lifecycle_state(std::string_view s) {
  return parse_of(kStateNames, s);
}

std::string_view to_string(UnitKind kind) { return name_of(kUnitKindNames, kind); }
std::optional<UnitKind> parse_unit_kind(std::string_view s) { return parse_of(kUnitKindNames, s); }

bool is_valid_transition(LifecycleState from, LifecycleState to) {
  using S = LifecycleState;
  switch (from) {
    case S::kActive: return to == S::kPendingForget;
    case S::kPendingForget:
      return to == S::kActive || to == S::kSoftDeleted || to == S::kCompressed;
    // Restore is the only way back from soft deletion; compression is terminal.
    case S::kSoftDeleted: return to == S::kActive;
    case S::kCompressed: return false;
  }
  return false;
}

bool SemanticAnchorSet::has_strong(std::string_view surface) const {
  return std::any_of(entities.begin(), entities.end(), [&](const Entity& e) {
    return e.kind == EntityKind::kStrong && e.surface == surface;
  });
}

std::vector<std::string> SemanticAnchorSet::strong_entities() const {
  std::vector<std::string> out;
  for (const auto& e : entities) {
    if (e.kind == EntityKind::kStrong) out.push_back(e.surface);
  }
  return out;
}

std::int64_t MemoryUnit::first_turn() const {
  std::int64_t best = -1;
  for (const auto& ref : provenance) {
    if (ref.turn >= 0 && (best < 0 || ref.turn < best)) best = ref.turn;
  }
  return best;
}

std::size_t count_tokens(std::string_view text) { return split_whitespace(text).size(); }

}  // namespace engram
