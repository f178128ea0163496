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

#include "engram/api_json.hpp"

namespace engram {

void to_json(Json& j, const PruneReport& r) {
  j = Json{{"units_removed", r.units_removed},
           {"units_merged", r.units_merged},
           {"units_compressed", r.units_compressed},
           {"tokens_before", r.tokens_before},
           {"tokens_after", r.tokens_after}};
}

void to_json(Json& j, const ForgetReport& r) {
  j = Json{{"to_pending", r.to_pending},
           {"to_soft_deleted", r.to_soft_deleted},
           {"to_compressed", r.to_compressed},
           {"edges_weakened", r.edges_weakened},
           {"edges_failed", r.edges_failed}};
}

void to_json(Json& j, const TemporalFinding& f) {
  j = Json{{"kind", to_string(f.kind)}, {"unit", f.unit}, {"reference", f.reference}, {"detail", f.detail}};
}

void to_json(Json& j, const Resolution& r) {
  j = Json{{"kind", to_string(r.kind)}, {"key", r.key}, {"kept", r.kept}, {"superseded", r.superseded}};
}

void to_json(Json& j, const LogicalFindings& f) {
  Json reinforced = Json::array();
  for (const auto& r : f.reinforced) reinforced.push_back({{"edge", r.edge}, {"before", r.before}, {"after", r.after}});
  j = Json{{"reinforced", reinforced}, {"dangling", f.dangling}, {"functional_cycles", f.functional_cycles}};
}

void to_json(Json& j, const ReflectionReport& r) {
  Json node_merges = Json::array();
  for (const auto& m : r.node_merges) {
    node_merges.push_back({{"survivor", m.survivor}, {"merged", m.merged}, {"similarity", m.similarity}});
  }
  j = Json{{"generation", r.generation},
           {"mutated", r.mutated()},
           {"feedback_applied", r.feedback_applied},
           {"feedback_unknown", r.feedback_unknown},
           {"temporal", r.temporal},
           {"resolutions", r.resolutions},
           {"edges_failed", r.edges_failed},
           {"node_merges", node_merges},
           {"logical", r.logical},
           {"prune", r.prune},
           {"forget", r.forget}};
}

void to_json(Json& j, const RedundancyVerdict& v) {
  j = Json{{"unit", v.unit},
           {"class", to_string(v.cls)},
           {"merge_target", v.merge_target ? Json(*v.merge_target) : Json(nullptr)},
           {"evidence", {{"rule", v.evidence.rule}, {"value", v.evidence.value}}}};
}

void to_json(Json& j, const RetrievalHit& h) { j = Json{{"unit", h.unit}, {"score", h.score}, {"path", h.path}}; }

void to_json(Json& j, const AgentProfile& a) {
  j = Json{{"agent_id", a.agent_id},
           {"responsibility_domain", a.responsibility_domain},
           {"behavior_interface", a.behavior_interface},
           {"space_id", a.space_id}};
}
void from_json(const Json& j, AgentProfile& a) {
  a.agent_id = j.at("agent_id").get<std::string>();
  a.responsibility_domain = j.at("responsibility_domain").get<TagSet>();
  a.behavior_interface = j.value("behavior_interface", std::set<std::string>{});
  a.space_id = j.at("space_id").get<std::string>();
}

void to_json(Json& j, const Permissions& p) { j = Json{{"kind", to_string(p.kind)}, {"tags", p.tags}}; }
void from_json(const Json& j, Permissions& p) {
  auto kind = parse_share_permission(j.at("kind").get<std::string>());
  if (!kind) throw Error(ErrorCode::kInvalidArgument, "unknown permission " + j.at("kind").dump());
  p.kind = *kind;
  p.tags = j.value("tags", TagSet{});
}

void to_json(Json& j, const SummaryUnit& s) {
  j = Json{{"fact_key", s.fact_key},
           {"value", s.value},
           {"text", s.text},
           {"embedding_b64", encode_embedding(s.embedding)},
           {"relations", s.relations},
           {"strong_entities", s.strong_entities},
           {"tags", s.tags},
           {"origin_refs", s.origin_refs},
           {"asserted_at", s.asserted_at}};
}
void from_json(const Json& j, SummaryUnit& s) {
  s.fact_key = j.at("fact_key").get<std::string>();
  s.value = j.at("value").get<std::string>();
  s.text = j.at("text").get<std::string>();
  s.embedding = decode_embedding(j.at("embedding_b64").get<std::string>(), ErrorCode::kInvalidArgument);
  s.relations = j.value("relations", std::vector<Relation>{});
  s.strong_entities = j.value("strong_entities", std::vector<std::string>{});
  s.tags = j.value("tags", TagSet{});
  s.origin_refs = j.at("origin_refs").get<std::vector<std::string>>();
  s.asserted_at = j.at("asserted_at").get<Timestamp>();
}

void to_json(Json& j, const ShareEnvelope& e) {
  j = Json{{"schema", e.schema},
           {"envelope_id", e.envelope_id},
           {"origin_agent", e.origin_agent},
           {"topic_tags", e.topic_tags},
           {"summary_units", e.summary_units},
           {"created_at", e.created_at},
           {"valid_until", e.valid_until},
           {"permissions", e.permissions}};
}
void from_json(const Json& j, ShareEnvelope& e) {
  e.schema = j.at("schema").get<std::string>();
  e.envelope_id = j.at("envelope_id").get<std::string>();
  e.origin_agent = j.at("origin_agent").get<std::string>();
  e.topic_tags = j.value("topic_tags", TagSet{});
  e.summary_units = j.at("summary_units").get<std::vector<SummaryUnit>>();
  e.created_at = j.at("created_at").get<Timestamp>();
  e.valid_until = j.at("valid_until").get<Timestamp>();
  e.permissions = j.at("permissions").get<Permissions>();
}

void to_json(Json& j, const ApplyReport& r) {
  j = Json{{"accepted", r.accepted},
           {"rejected_expired", r.rejected_expired},
           {"rejected_conflict", r.rejected_conflict},
           {"already_applied", r.already_applied}};
}

namespace {

template <typename T>
void optional_field(const Json& j, const char* key, std::optional<T>& out) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) out = it->get<T>();
}

}  // namespace

void from_json(const Json& j, IngestRequest& r) {
  r.utterance = j.at("utterance").get<std::string>();
  r.speaker = j.value("speaker", std::string("user"));
  optional_field(j, "ts", r.ts);
}

void from_json(const Json& j, ScoreWeights& w) {
  w.w_sim = j.value("w_sim", w.w_sim);
  w.w_act = j.value("w_act", w.w_act);
  w.w_pref = j.value("w_pref", w.w_pref);
  w.w_emo = j.value("w_emo", w.w_emo);
  w.hop_decay = j.value("hop_decay", w.hop_decay);
  w.max_hops = j.value("max_hops", w.max_hops);
}

void from_json(const Json& j, QueryRequest& r) {
  r.text = j.at("text").get<std::string>();
  optional_field(j, "k", r.k);
  r.tags = j.value("tags", TagSet{});
  optional_field(j, "ts", r.ts);
  optional_field(j, "weights", r.weights);
  r.record_access = j.value("record_access", true);
}

void from_json(const Json& j, MaintainRequest& r) {
  r.passes.clear();
  for (const auto& name : j.at("passes")) {
    const auto p = parse_pass(name.get<std::string>());
    if (!p) throw Error(ErrorCode::kInvalidArgument, "unknown pass " + name.dump());
    r.passes.push_back(*p);
  }
  optional_field(j, "ts", r.ts);
  r.dry_run = j.value("dry_run", false);
  r.feedback.clear();
  if (auto it = j.find("feedback"); it != j.end()) {
    for (const auto& f : *it) r.feedback.push_back({f.at("unit_id").get<UnitId>(), f.at("delta").get<double>()});
  }
}

void from_json(const Json& j, ShareRequest& r) {
  r.agent_id = j.at("agent_id").get<std::string>();
  r.topic = j.at("topic").get<TagSet>();
  if (auto it = j.find("permissions"); it != j.end()) r.permissions = it->get<Permissions>();
  optional_field(j, "ts", r.ts);
}

void from_json(const Json& j, ApplyRequest& r) {
  r.envelope = j.at("envelope").get<ShareEnvelope>();
  r.agent_id = j.at("agent_id").get<std::string>();
  optional_field(j, "ts", r.ts);
}

void to_json(Json& j, const IngestResult& r) {
  j = Json{{"turn", r.turn}, {"units", r.units}, {"edges_failed", r.edges_failed}};
}

void to_json(Json& j, const QueryHit& h) {
  j = Json{{"unit", h.unit},
           {"score", h.score},
           {"content", h.content},
           {"state", to_string(h.state)},
           {"path", h.path}};
  if (h.fact) {
    j["fact_key"] = h.fact->key;
    j["value"] = h.fact->value;
  }
}

void to_json(Json& j, const QueryResult& r) { j = Json{{"hits", r.hits}, {"tokens", r.tokens}}; }

void to_json(Json& j, const MaintainResult& r) {
  j = Json{{"dry_run", r.dry_run}, {"generation", r.generation}};
  if (r.verdicts) {
    j["verdict_counts"] = {{"duplicate", r.verdicts->count(RedundancyClass::kDuplicate)},
                           {"irrelevant", r.verdicts->count(RedundancyClass::kIrrelevant)},
                           {"outdated", r.verdicts->count(RedundancyClass::kOutdated)},
                           {"keep", r.verdicts->count(RedundancyClass::kKeep)}};
  }
  if (r.prune) j["prune"] = *r.prune;
  if (r.forget) j["forget"] = *r.forget;
  if (r.reflect) j["reflect"] = *r.reflect;
}

void to_json(Json& j, const SpaceStats& s) {
  j = Json{{"id", s.id},
           {"units", s.units},
           {"units_by_state", s.units_by_state},
           {"nodes", s.nodes},
           {"edges", s.edges},
           {"edges_by_validity", s.edges_by_validity},
           {"live_tokens", s.live_tokens},
           {"fact_keys", s.fact_keys},
           {"turns", s.turns},
           {"version", s.version},
           {"generation", s.generation},
           {"last_reflection", s.last_reflection ? Json(*s.last_reflection) : Json(nullptr)}};
}

}  // namespace engram
