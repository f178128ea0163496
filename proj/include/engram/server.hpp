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
// HTTP/JSON front end over MemoryEngine.
//
//   POST /spaces/{id}/ingest     {utterance, speaker?, ts?}        -> {turn, units, edges_failed}
//   POST /spaces/{id}/query      {text, k?, tags?, ts?, weights?, record_access?}
//                                                                   -> {hits: [...], tokens}
//   POST /spaces/{id}/maintain   {passes: ["prune"|"forget"|"reflect"], dry_run?, ts?, feedback?}
//   GET  /spaces/{id}/stats
//   GET  /spaces/{id}/export     canonical JSONL
//   POST /hub/agents             AgentProfile                      -> 201
//   GET  /hub/agents
//   POST /hub/route              {tags}                            -> {agent_id}
//   POST /hub/share              {agent_id, topic, permissions?, ts?} -> envelope
//   POST /hub/apply              {envelope, agent_id, ts?}         -> apply report
//   GET  /healthz                {status: "ok", generation, spaces}
//
// Errors are {"code": <error name, e.g. "SpaceUnknown">, "message": ...}: 400 for
// bad input, 403 permission denied, 404 unknown space/unit/node/agent/route,
// 409 duplicate agent or stale verdicts, 410 expired, 500 otherwise.

#pragma once

#include <memory>
#include <string>

#include "engram/engine.hpp"
#include "engram/error.hpp"

namespace engram {

int http_status(ErrorCode code);

class HttpService {
 public:
  explicit HttpService(MemoryEngine& engine);
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  // Binds host:port (port 0 picks a free one) and returns the bound port.
  // Throws kBindFailure.
  int bind(const std::string& host, int port);
  // Serves until stop(); call after bind().
  void listen();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace engram
