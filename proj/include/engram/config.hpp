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
// Engine configuration: one INI-style file holding every tunable constant.
//
//   [activation]  decay lambda offset forget_threshold time_unit_seconds
//   [retrieval]   w_sim w_act w_pref w_emo hop_decay max_hops score_floor default_k
//   [prune]       dup_threshold
//   [forget]      grace_seconds weaken_interval_seconds compress_emotion
//   [reflect]     ambiguity_window_seconds reinforce_delta strength_cap
//                 node_merge_threshold
//   [graph]       functional_relations (comma list) fail_below weaken_ceiling
//                 context_window embedding_dim
//   [annotate]    gazetteer lexicon acknowledgments   (paths; empty = built in)
//                 http_endpoint (host:port/path; empty = rule annotator)
//                 http_timeout_ms http_fallback
//   [hub]         envelope_ttl_seconds
//   [service]     host port data_dir threads
//
// Lines starting with '#' or ';' are comments; values may be double-quoted.
// Unknown sections or keys are rejected so typos do not pass silently.
// prune's outdated threshold is the activation forget_threshold.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "engram/annotate.hpp"
#include "engram/graphstore.hpp"
#include "engram/reflect.hpp"
#include "engram/retrieve.hpp"

namespace engram {

struct RetrievalConfig {
  ScoreWeights weights;
  double score_floor = 0.3;
  std::size_t default_k = 5;
};

struct AnnotateConfig {
  std::string gazetteer;
  std::string lexicon;
  std::string acknowledgments;
  std::optional<HttpAnnotatorAdapter::Options> http;
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir = "engram-data";
  int threads = 8;
};

struct EngineConfig {
  ActivationParams activation;
  RetrievalConfig retrieval;
  PruneConfig prune;
  ForgetConfig forget;
  ReflectConfig reflect;
  GraphConfig graph;
  AnnotateConfig annotate;
  Duration envelope_ttl = kDay;
  ServiceConfig service;

  MaintenanceSettings maintenance() const;
  // Throws kConfigInvalid.
  void validate() const;
};

// Throws kConfigInvalid on syntax errors, unknown keys or bad values.
EngineConfig parse_config(std::string_view text);
// Throws kConfigInvalid (including an unreadable file).
EngineConfig load_config(const std::filesystem::path& path);

// ENGRAM_CONFIG names the file (else `fallback`, else defaults); ENGRAM_PORT
// overrides service.port.
EngineConfig load_config_from_env(const std::optional<std::filesystem::path>& fallback = {});

// The config rendered back as a file; parse_config(render_config(c)) == c.
std::string render_config(const EngineConfig& config);

}  // namespace engram
