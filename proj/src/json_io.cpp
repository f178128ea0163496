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

#include "engram/json_io.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstring>

#include "engram/error.hpp"

namespace engram {
namespace {

static_assert(std::endian::native == std::endian::little, "embedding encoding assumes little endian");

template <typename Enum, typename Parse>
Enum enum_from(const Json& j, Parse parse, const char* what) {
  auto v = parse(j.get<std::string>());
  if (!v) throw Error(ErrorCode::kInvalidArgument, std::string("unknown ") + what + ": " + j.dump());
  return *v;
}

}  // namespace

std::string encode_embedding(const std::vector<float>& v) {
  if (v.empty()) return {};
  const auto* bytes = reinterpret_cast<const unsigned char*>(v.data());
  const int n = static_cast<int>(v.size() * sizeof(float));
  std::string out(4 * ((n + 2) / 3), '\0');
  const int written = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes, n);
  out.resize(static_cast<std::size_t>(written));
  return out;
}

std::vector<float> decode_embedding(const std::string& s, ErrorCode on_error) {
  if (s.empty()) return {};
  std::string raw(3 * s.size() / 4, '\0');
  const int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(raw.data()),
                                reinterpret_cast<const unsigned char*>(s.data()),
                                static_cast<int>(s.size()));
  if (n < 0) throw Error(on_error, "bad embedding encoding");
  // EVP_DecodeBlock counts '=' padding as zero bytes; trim them.
  std::size_t len = static_cast<std::size_t>(n);
  for (auto it = s.rbegin(); it != s.rend() && *it == '='; ++it) --len;
  if (len % sizeof(float) != 0) throw Error(on_error, "bad embedding length");
  std::vector<float> out(len / sizeof(float));
  std::memcpy(out.data(), raw.data(), len);
  return out;
}

void to_json(Json& j, const Timestamp& t) { j = t.seconds; }
void from_json(const Json& j, Timestamp& t) { t.seconds = j.get<std::int64_t>(); }

void to_json(Json& j, const EmotionTag& e) {
  j = Json{{"label", to_string(e.label)}, {"intensity", e.intensity}};
}
void from_json(const Json& j, EmotionTag& e) {
  e.label = enum_from<EmotionLabel>(j.at("label"), parse_emotion_label, "emotion label");
  e.intensity = j.at("intensity").get<double>();
}

void to_json(Json& j, const Entity& e) {
  j = Json{{"surface", e.surface}, {"kind", e.kind == EntityKind::kStrong ? "strong" : "weak"}};
}
void from_json(const Json& j, Entity& e) {
  e.surface = j.at("surface").get<std::string>();
  const auto kind = j.at("kind").get<std::string>();
  if (kind != "strong" && kind != "weak") {
    throw Error(ErrorCode::kInvalidArgument, "unknown entity kind: " + kind);
  }
  e.kind = kind == "strong" ? EntityKind::kStrong : EntityKind::kWeak;
}

void to_json(Json& j, const Triple& t) {
  j = Json{{"subject", t.subject}, {"predicate", t.predicate}, {"object", t.object}};
}
void from_json(const Json& j, Triple& t) {
  t.subject = j.at("subject").get<std::string>();
  t.predicate = j.at("predicate").get<std::string>();
  t.object = j.at("object").get<std::string>();
}

void to_json(Json& j, const Relation& r) {
  j = Json{{"head", r.head}, {"label", r.label}, {"tail", r.tail}};
}
void from_json(const Json& j, Relation& r) {
  r.head = j.at("head").get<std::string>();
  r.label = j.at("label").get<std::string>();
  r.tail = j.at("tail").get<std::string>();
}

void to_json(Json& j, const Fact& f) {
  j = Json{{"key", f.key}, {"value", f.value}, {"label", f.label}, {"statement", f.statement}};
}
void from_json(const Json& j, Fact& f) {
  f.key = j.at("key").get<std::string>();
  f.value = j.value("value", std::string());
  f.label = j.value("label", std::string());
  f.statement = j.value("statement", f.value.empty() ? f.key : f.key + " = " + f.value);
}

void to_json(Json& j, const SemanticAnchorSet& a) {
  j = Json{{"entities", a.entities},
           {"triples", a.triples},
           {"facts", a.facts},
           {"relations", a.relations},
           {"temporal_class", to_string(a.temporal_class)},
           {"emotion", a.emotion},
           {"utterance_kind", to_string(a.utterance_kind)},
           {"tags", a.tags}};
}
void from_json(const Json& j, SemanticAnchorSet& a) {
  a.entities = j.value("entities", std::vector<Entity>{});
  a.triples = j.value("triples", std::vector<Triple>{});
  a.facts = j.value("facts", std::vector<Fact>{});
  a.relations = j.value("relations", std::vector<Relation>{});
  a.temporal_class = enum_from<TemporalClass>(j.value("temporal_class", Json("atemporal")),
                                              parse_temporal_class, "temporal class");
  a.emotion = j.contains("emotion") ? j.at("emotion").get<EmotionTag>() : EmotionTag{};
  a.utterance_kind = enum_from<UtteranceKind>(j.value("utterance_kind", Json("statement")),
                                              parse_utterance_kind, "utterance kind");
  a.tags = j.value("tags", TagSet{});
}

void to_json(Json& j, const FoldedSpan& s) {
  j = Json{{"count", s.count}, {"first", s.first}, {"last", s.last}};
}
void from_json(const Json& j, FoldedSpan& s) {
  s.count = j.at("count").get<std::uint64_t>();
  s.first = j.at("first").get<Timestamp>();
  s.last = j.at("last").get<Timestamp>();
}

void to_json(Json& j, const ActivationTrace& t) {
  j = Json{{"recent", t.recent}, {"total_count", t.total_count}, {"folded", t.folded}};
}
void from_json(const Json& j, ActivationTrace& t) {
  t.recent = j.at("recent").get<std::vector<Timestamp>>();
  t.total_count = j.at("total_count").get<std::uint64_t>();
  t.folded = j.value("folded", std::vector<FoldedSpan>{});
  std::uint64_t folded = 0;
  for (const auto& s : t.folded) folded += s.count;
  if (t.recent.empty() || t.total_count != t.recent.size() + folded) {
    throw Error(ErrorCode::kInvalidArgument, "inconsistent activation trace");
  }
}

void to_json(Json& j, const SourceRef& s) { j = Json{{"id", s.id}, {"turn", s.turn}}; }
void from_json(const Json& j, SourceRef& s) {
  s.id = j.at("id").get<std::string>();
  s.turn = j.value("turn", std::int64_t{-1});
}

void to_json(Json& j, const MemoryUnit& u) {
  j = Json{{"id", u.id},
           {"space_id", u.space_id},
           {"content", u.content},
           {"anchors", u.anchors},
           {"embedding_b64", encode_embedding(u.embedding)},
           {"created_at", u.created_at},
           {"trace", u.trace},
           {"emotion_weight", u.emotion_weight},
           {"preference_tags", u.preference_tags},
           {"state", to_string(u.state)},
           {"provenance", u.provenance},
           {"kind", to_string(u.kind)},
           {"speaker", u.speaker},
           {"conflict_unresolved", u.conflict_unresolved}};
  j["pending_since"] = u.pending_since ? Json(*u.pending_since) : Json(nullptr);
  j["superseded_by"] = u.superseded_by ? Json(*u.superseded_by) : Json(nullptr);
}

void from_json(const Json& j, MemoryUnit& u) {
  u.id = j.at("id").get<UnitId>();
  u.space_id = j.at("space_id").get<std::string>();
  u.content = j.at("content").get<std::string>();
  u.anchors = j.at("anchors").get<SemanticAnchorSet>();
  u.embedding = decode_embedding(j.value("embedding_b64", std::string()));
  u.created_at = j.at("created_at").get<Timestamp>();
  u.trace = j.at("trace").get<ActivationTrace>();
  u.emotion_weight = j.value("emotion_weight", 0.0);
  u.preference_tags = j.value("preference_tags", TagSet{});
  u.state = enum_from<LifecycleState>(j.at("state"), parse_lifecycle_state, "lifecycle state");
  u.provenance = j.at("provenance").get<std::vector<SourceRef>>();
  u.kind = enum_from<UnitKind>(j.value("kind", Json("remark")), parse_unit_kind, "unit kind");
  u.speaker = j.value("speaker", std::string());
  u.conflict_unresolved = j.value("conflict_unresolved", false);
  if (j.contains("pending_since") && !j["pending_since"].is_null()) {
    u.pending_since = j["pending_since"].get<Timestamp>();
  }
  if (j.contains("superseded_by") && !j["superseded_by"].is_null()) {
    u.superseded_by = j["superseded_by"].get<UnitId>();
  }
}

void to_json(Json& j, const GraphNode& n) {
  j = Json{{"id", n.id},
           {"label", n.label},
           {"kind", to_string(n.kind)},
           {"unit_refs", n.unit_refs},
           {"created_at", n.created_at}};
}
void from_json(const Json& j, GraphNode& n) {
  n.id = j.at("id").get<NodeId>();
  n.label = j.at("label").get<std::string>();
  n.kind = enum_from<NodeKind>(j.at("kind"), parse_node_kind, "node kind");
  n.unit_refs = j.at("unit_refs").get<std::set<UnitId>>();
  n.created_at = j.at("created_at").get<Timestamp>();
}

void to_json(Json& j, const GraphEdge& e) {
  j = Json{{"id", e.id},
           {"head", e.head},
           {"tail", e.tail},
           {"relation_label", e.relation_label},
           {"sources", e.sources},
           {"timestamp", e.timestamp},
           {"emotion_weight", e.emotion_weight},
           {"strength", e.strength},
           {"validity", to_string(e.validity)},
           {"path_uses", e.path_uses}};
  j["last_weakened"] = e.last_weakened ? Json(*e.last_weakened) : Json(nullptr);
}
void from_json(const Json& j, GraphEdge& e) {
  e.id = j.at("id").get<EdgeId>();
  e.head = j.at("head").get<NodeId>();
  e.tail = j.at("tail").get<NodeId>();
  e.relation_label = j.at("relation_label").get<std::string>();
  e.sources = j.at("sources").get<std::set<UnitId>>();
  e.timestamp = j.at("timestamp").get<Timestamp>();
  e.emotion_weight = j.value("emotion_weight", 0.0);
  e.strength = j.at("strength").get<double>();
  e.validity = enum_from<EdgeValidity>(j.at("validity"), parse_edge_validity, "edge validity");
  e.path_uses = j.value("path_uses", std::uint64_t{0});
  if (j.contains("last_weakened") && !j["last_weakened"].is_null()) {
    e.last_weakened = j["last_weakened"].get<Timestamp>();
  }
}

void to_json(Json& j, const MemorySpace::Meta& m) {
  Json aliases = Json::object();
  for (const auto& [label, id] : m.aliases) aliases[label] = id;
  j = Json{{"next_unit", m.next_unit},
           {"next_node", m.next_node},
           {"next_edge", m.next_edge},
           {"generation", m.generation},
           {"next_turn", m.next_turn},
           {"context", m.context},
           {"applied_envelopes", m.applied_envelopes},
           {"aliases", aliases}};
  j["last_reflection"] = m.last_reflection ? Json(*m.last_reflection) : Json(nullptr);
}
void from_json(const Json& j, MemorySpace::Meta& m) {
  m.next_unit = j.at("next_unit").get<std::uint64_t>();
  m.next_node = j.at("next_node").get<std::uint64_t>();
  m.next_edge = j.at("next_edge").get<std::uint64_t>();
  m.generation = j.at("generation").get<std::uint64_t>();
  m.next_turn = j.at("next_turn").get<std::int64_t>();
  m.context = j.value("context", std::vector<std::string>{});
  m.applied_envelopes = j.value("applied_envelopes", std::set<std::string>{});
  m.aliases.clear();
  for (const auto& [label, id] : j.value("aliases", Json::object()).items()) {
    m.aliases[label] = id.get<NodeId>();
  }
  if (j.contains("last_reflection") && !j["last_reflection"].is_null()) {
    m.last_reflection = j["last_reflection"].get<Timestamp>();
  }
}

}  // namespace engram
