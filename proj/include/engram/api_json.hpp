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

// JSON shapes of the reports and exchange types served by the CLI and the
// HTTP API.

#pragma once

#include "engram/engine.hpp"
#include "engram/forget.hpp"
#include "engram/hub.hpp"
#include "engram/json_io.hpp"
#include "engram/prune.hpp"
#include "engram/reflect.hpp"
#include "engram/retrieve.hpp"

namespace engram {

void to_json(Json& j, const PruneReport& r);
void to_json(Json& j, const ForgetReport& r);
void to_json(Json& j, const TemporalFinding& f);
void to_json(Json& j, const Resolution& r);
void to_json(Json& j, const LogicalFindings& f);
void to_json(Json& j, const ReflectionReport& r);
void to_json(Json& j, const RedundancyVerdict& v);
void to_json(Json& j, const RetrievalHit& h);

void to_json(Json& j, const AgentProfile& a);
void from_json(const Json& j, AgentProfile& a);
void to_json(Json& j, const Permissions& p);
void from_json(const Json& j, Permissions& p);
void to_json(Json& j, const SummaryUnit& s);
void from_json(const Json& j, SummaryUnit& s);
void to_json(Json& j, const ShareEnvelope& e);
void from_json(const Json& j, ShareEnvelope& e);
void to_json(Json& j, const ApplyReport& r);

// Engine requests. Missing optional fields keep their defaults; "ts" is Unix
// seconds. Type errors surface as Json exceptions.
void from_json(const Json& j, IngestRequest& r);
void from_json(const Json& j, QueryRequest& r);
void from_json(const Json& j, MaintainRequest& r);  // throws kInvalidArgument on an unknown pass
void from_json(const Json& j, ShareRequest& r);
void from_json(const Json& j, ApplyRequest& r);
void from_json(const Json& j, ScoreWeights& w);

void to_json(Json& j, const IngestResult& r);
void to_json(Json& j, const QueryHit& h);
void to_json(Json& j, const QueryResult& r);
void to_json(Json& j, const MaintainResult& r);
void to_json(Json& j, const SpaceStats& s);

}  // namespace engram
