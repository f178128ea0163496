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

#include "engram/hub.hpp"

#include <algorithm>
#include <map>

#include "engram/api_json.hpp"
#include "engram/error.hpp"
#include "engram/retrieve.hpp"
#include "engram/text.hpp"

namespace engram {
namespace {

bool intersects(const TagSet& a, const TagSet& b) {
  return std::any_of(a.begin(), a.end(), [&](const std::string& t) { return b.count(t) > 0; });
}

void check_admitted(const ShareEnvelope& env, const AgentProfile& target) {
  switch (env.permissions.kind) {
    case SharePermission::kPublic:
      return;
    case SharePermission::kDomainRestricted:
      if (intersects(env.permissions.tags, target.responsibility_domain)) return;
      throw Error(ErrorCode::kPermissionDenied,
                  "envelope is restricted to domains agent " + target.agent_id + " does not serve");
    case SharePermission::kPrivate:
      throw Error(ErrorCode::kPermissionDenied, "private envelopes cannot be applied");
  }
}

}  // namespace

std::string_view to_string(SharePermission p) {
  switch (p) {
    case SharePermission::kPublic: return "public";
    case SharePermission::kDomainRestricted: return "domain_restricted";
    case SharePermission::kPrivate: return "private";
  }
  return "?";
}

std::optional<SharePermission> parse_share_permission(std::string_view name) {
  for (auto p : {SharePermission::kPublic, SharePermission::kDomainRestricted, SharePermission::kPrivate}) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

std::string envelope_digest(const ShareEnvelope& env) {
  Json j = env;
  j.erase("envelope_id");
  return sha256_hex(j.dump());  // nlohmann objects are key-sorted, so this is canonical
}

void MemoryHub::register_agent(AgentProfile profile) {
  if (profile.agent_id.empty()) throw Error(ErrorCode::kInvalidArgument, "agent id must not be empty");
  if (profile.responsibility_domain.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "agent " + profile.agent_id + " needs a responsibility domain");
  }
  if (agents_.count(profile.agent_id)) throw Error(ErrorCode::kDuplicateAgent, "agent " + profile.agent_id + " exists");
  const std::string id = profile.agent_id;
  agents_.emplace(id, std::move(profile));
}

const AgentProfile& MemoryHub::agent(const std::string& id) const {
  auto it = agents_.find(id);
  if (it == agents_.end()) throw Error(ErrorCode::kUnknownAgent, "unknown agent " + id);
  return it->second;
}

const std::string& MemoryHub::route(const TagSet& tags, std::string_view) const {
  if (agents_.empty()) throw Error(ErrorCode::kNoAgents, "no agents registered");
  const AgentProfile* best = nullptr;
  double best_score = -1.0;
  for (const auto& [id, a] : agents_) {  // ascending id, so ties keep the first
    const double s = jaccard(tags, a.responsibility_domain);
    if (s > best_score) {
      best = &a;
      best_score = s;
    }
  }
  return best->agent_id;
}

ShareEnvelope MemoryHub::summarize_for_share(const std::string& agent_id, const MemorySpace& space,
                                             const TagSet& topic, const Permissions& permissions, Timestamp now,
                                             const Embedder& embedder) const {
  const AgentProfile& owner = agent(agent_id);
  if (owner.space_id != space.id()) {
    throw Error(ErrorCode::kPermissionDenied, "agent " + agent_id + " does not own space " + space.id());
  }
  std::map<std::string, std::vector<const MemoryUnit*>> by_key;
  for (const auto& u : space.units()) {
    if (u.state != LifecycleState::kActive || u.has_tag(kPrivateTag) || !u.primary_fact()) continue;
    if (!intersects(u.preference_tags, topic)) continue;
    by_key[u.primary_fact()->key].push_back(&u);
  }
  if (by_key.empty()) throw Error(ErrorCode::kEmptySelection, "no shareable units for the requested topics");

  ShareEnvelope env;
  env.origin_agent = agent_id;
  env.topic_tags = topic;
  env.created_at = now;
  env.valid_until = now + ttl_;
  env.permissions = permissions;
  for (const auto& [key, units] : by_key) {
    const MemoryUnit* newest = *std::max_element(units.begin(), units.end(), [](const auto* a, const auto* b) {
      return std::tie(a->created_at, a->id) < std::tie(b->created_at, b->id);
    });
    const Fact& f = *newest->primary_fact();
    SummaryUnit s;
    s.fact_key = key;
    s.value = f.value;
    // Never longer than the unit it summarizes.
    s.text = count_tokens(f.statement) <= count_tokens(newest->content) ? f.statement : newest->content;
    s.embedding = embedder.embed(s.text);
    s.relations = newest->anchors.relations;
    s.strong_entities = newest->anchors.strong_entities();
    s.tags = newest->preference_tags;
    s.asserted_at = newest->created_at;
    for (const auto* u : units) s.origin_refs.push_back(space.id() + ":" + std::to_string(u->id.value));
    env.summary_units.push_back(std::move(s));
  }
  env.envelope_id = envelope_digest(env);
  return env;
}

ApplyReport MemoryHub::apply_shared(const ShareEnvelope& env, const std::string& target_agent, MemorySpace& target,
                                    Timestamp now, const Embedder& embedder) const {
  if (env.schema != kEnvelopeSchema) throw Error(ErrorCode::kInvalidArgument, "unknown envelope schema " + env.schema);
  if (env.envelope_id != envelope_digest(env)) {
    throw Error(ErrorCode::kInvalidArgument, "envelope id does not match its content");
  }
  const AgentProfile& profile = agent(target_agent);
  if (profile.space_id != target.id()) {
    throw Error(ErrorCode::kPermissionDenied, "agent " + target_agent + " does not own space " + target.id());
  }
  check_admitted(env, profile);

  ApplyReport report;
  if (target.applied_envelopes().count(env.envelope_id)) {
    report.already_applied = true;
    return report;
  }
  if (now > env.valid_until) {
    report.rejected_expired = env.summary_units.size();
    return report;
  }

  std::map<std::string, Timestamp> newest_local;
  for (const auto& u : target.units()) {
    if (!u.is_retrievable()) continue;
    for (const auto& f : u.anchors.facts) {
      auto [it, fresh] = newest_local.try_emplace(f.key, u.created_at);
      if (!fresh) it->second = std::max(it->second, u.created_at);
    }
  }
  for (const auto& s : env.summary_units) {
    if (auto it = newest_local.find(s.fact_key); it != newest_local.end() && it->second > s.asserted_at) {
      report.rejected_conflict.push_back(s.fact_key);
      continue;
    }
    MemoryUnit u;
    u.space_id = target.id();
    u.content = normalize_text(s.text);
    u.embedding = s.embedding.size() == embedder.dimension() ? s.embedding : embedder.embed(u.content);
    u.created_at = s.asserted_at;
    u.trace = ActivationTrace::created_at(std::max(now, s.asserted_at));
    u.kind = UnitKind::kFact;
    u.speaker = env.origin_agent;
    u.preference_tags = s.tags;
    u.anchors.facts.push_back({s.fact_key, s.value, s.relations.empty() ? "" : s.relations.front().label,
                               s.value.empty() ? s.fact_key : s.fact_key + " = " + s.value});
    u.anchors.relations = s.relations;
    for (const auto& e : s.strong_entities) u.anchors.entities.push_back({e, EntityKind::kStrong});
    for (const auto& ref : s.origin_refs) u.provenance.push_back({ref, -1});
    report.accepted.push_back(target.upsert_unit(std::move(u)));
  }
  target.mark_envelope_applied(env.envelope_id);
  return report;
}

}  // namespace engram
