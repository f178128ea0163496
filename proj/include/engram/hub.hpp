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

// Multi-agent coordination: agents declare responsibility domains (topic
// tags), requests are routed by tag overlap, and memories travel between
// spaces only as summary envelopes built on demand.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "engram/graphstore.hpp"

namespace engram {

struct AgentProfile {
  std::string agent_id;
  TagSet responsibility_domain;  // never empty
  std::set<std::string> behavior_interface;
  std::string space_id;

  bool operator==(const AgentProfile&) const = default;
};

enum class SharePermission { kPublic, kDomainRestricted, kPrivate };
std::string_view to_string(SharePermission p);
std::optional<SharePermission> parse_share_permission(std::string_view name);

struct Permissions {
  SharePermission kind = SharePermission::kPublic;
  TagSet tags;  // DomainRestricted only

  bool operator==(const Permissions&) const = default;
};

// One line per fact key: the newest value, phrased no longer than the unit
// it came from.
struct SummaryUnit {
  std::string fact_key;
  std::string value;
  std::string text;
  Embedding embedding;
  std::vector<Relation> relations;
  std::vector<std::string> strong_entities;
  TagSet tags;
  std::vector<std::string> origin_refs;  // "<space>:<unit id>" for every unit folded in
  Timestamp asserted_at;                 // creation of the newest unit

  bool operator==(const SummaryUnit&) const = default;
};

inline constexpr std::string_view kEnvelopeSchema = "engram.envelope/1";

struct ShareEnvelope {
  std::string schema = std::string(kEnvelopeSchema);
  std::string envelope_id;  // sha256 of the canonical JSON of everything else
  std::string origin_agent;
  TagSet topic_tags;
  std::vector<SummaryUnit> summary_units;
  Timestamp created_at;
  Timestamp valid_until;
  Permissions permissions;

  bool operator==(const ShareEnvelope&) const = default;
};

// Content hash for an envelope; ignores envelope_id.
std::string envelope_digest(const ShareEnvelope& env);

struct ApplyReport {
  std::vector<UnitId> accepted;
  std::size_t rejected_expired = 0;
  std::vector<std::string> rejected_conflict;  // fact keys
  bool already_applied = false;
};

class MemoryHub {
 public:
  explicit MemoryHub(Duration envelope_ttl = kDay) : ttl_(envelope_ttl) {}

  // Throws kDuplicateAgent, kInvalidArgument for an empty id or domain.
  void register_agent(AgentProfile profile);
  const AgentProfile& agent(const std::string& id) const;  // throws kUnknownAgent
  const std::map<std::string, AgentProfile>& agents() const { return agents_; }

  // Agent with the largest Jaccard overlap between `tags` and its domain,
  // ties to the smallest id. The query text is accepted for interface
  // symmetry and does not influence the choice. Throws kNoAgents.
  const std::string& route(const TagSet& tags, std::string_view query = {}) const;

  // Builds an envelope from the agent's own space: Active fact units sharing
  // a topic tag, private units excluded, one summary per fact key. Throws
  // kUnknownAgent, kPermissionDenied when the space is not the agent's,
  // kEmptySelection when nothing qualifies.
  ShareEnvelope summarize_for_share(const std::string& agent_id, const MemorySpace& space, const TagSet& topic,
                                    const Permissions& permissions, Timestamp now, const Embedder& embedder) const;

  // Inserts the envelope's summaries into the target agent's space unless
  // that space holds a newer unit for the same key. Expired envelopes are
  // rejected whole (counted in rejected_expired); an envelope is applied at
  // most once per space. Throws kPermissionDenied (private, or domain
  // mismatch, or space not the agent's), kInvalidArgument on a tampered id
  // or unknown schema, kUnknownAgent.
  ApplyReport apply_shared(const ShareEnvelope& env, const std::string& target_agent, MemorySpace& target,
                           Timestamp now, const Embedder& embedder) const;

  Duration envelope_ttl() const { return ttl_; }

 private:
  Duration ttl_;
  std::map<std::string, AgentProfile> agents_;
};

}  // namespace engram
