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

// JSON mappings for the value types. Enums serialize as lowercase names, ids
// as integers, embeddings as base64 of little-endian float32 bytes.

#pragma once

#include <json.hpp>

#include "engram/core.hpp"
#include "engram/error.hpp"
#include "engram/graphstore.hpp"

namespace engram {

using Json = nlohmann::json;

// Embeddings travel as base64 of the raw float32 bytes: exact and compact.
std::string encode_embedding(const std::vector<float>& v);
std::vector<float> decode_embedding(const std::string& s, ErrorCode on_error = ErrorCode::kCorruptSnapshot);

void to_json(Json& j, const Timestamp& t);
void from_json(const Json& j, Timestamp& t);

template <typename Tag>
void to_json(Json& j, const Id<Tag>& id) {
  j = id.value;
}
template <typename Tag>
void from_json(const Json& j, Id<Tag>& id) {
  id.value = j.get<std::uint64_t>();
}

void to_json(Json& j, const EmotionTag& e);
void from_json(const Json& j, EmotionTag& e);
void to_json(Json& j, const Entity& e);
void from_json(const Json& j, Entity& e);
void to_json(Json& j, const Triple& t);
void from_json(const Json& j, Triple& t);
void to_json(Json& j, const Relation& r);
void from_json(const Json& j, Relation& r);
void to_json(Json& j, const Fact& f);
void from_json(const Json& j, Fact& f);
void to_json(Json& j, const SemanticAnchorSet& a);
void from_json(const Json& j, SemanticAnchorSet& a);
void to_json(Json& j, const FoldedSpan& s);
void from_json(const Json& j, FoldedSpan& s);
void to_json(Json& j, const ActivationTrace& t);
void from_json(const Json& j, ActivationTrace& t);
void to_json(Json& j, const SourceRef& s);
void from_json(const Json& j, SourceRef& s);
void to_json(Json& j, const MemoryUnit& u);
void from_json(const Json& j, MemoryUnit& u);
void to_json(Json& j, const GraphNode& n);
void from_json(const Json& j, GraphNode& n);
void to_json(Json& j, const GraphEdge& e);
void from_json(const Json& j, GraphEdge& e);
void to_json(Json& j, const MemorySpace::Meta& m);
void from_json(const Json& j, MemorySpace::Meta& m);

}  // namespace engram
