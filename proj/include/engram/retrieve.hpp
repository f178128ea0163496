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

// Hybrid retrieval.
//
//   score = w_sim * max(0, cos(q, e))
//         + w_act * (sigmoid(B) + boost)
//         + w_pref * jaccard(prefs, tags)
//         + w_emo * emotion_weight
//
// boost comes from spreading activation seeded at the query's Strong
// entities: a seed has boost 1, each hop multiplies by hop_decay times the
// edge strength normalized by the strongest non-failed edge at the node it
// leaves, and a node keeps its best path. A unit's boost is the sum over the
// distinct nodes it references. Edges are traversed in both directions;
// Failed edges never.

#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "engram/activation.hpp"
#include "engram/annotate.hpp"
#include "engram/graphstore.hpp"

namespace engram {

struct ScoreWeights {
  double w_sim = 0.55;
  double w_act = 0.25;
  double w_pref = 0.10;
  double w_emo = 0.10;
  double hop_decay = 0.5;
  int max_hops = 2;

  // Throws kInvalidArgument: negative weights, sum != 1 (1e-9), hop_decay
  // outside (0,1), negative max_hops.
  void validate() const;
};

// |a ∩ b| / |a ∪ b|; 0 when both are empty.
double jaccard(const TagSet& a, const TagSet& b);

// Score of one unit; `boost` is its spreading-activation boost.
double score_unit(std::span<const float> query_vec, const MemoryUnit& unit, Timestamp now,
                  const ScoreWeights& w, const TagSet& prefs, const ActivationParams& params,
                  double boost = 0.0);

struct SpreadResult {
  std::map<NodeId, double> boost;
  std::map<NodeId, std::vector<EdgeId>> path;  // best path from a seed, seed first
};

// Throws kUnknownNode for a seed that is not in the space.
SpreadResult spread(const MemorySpace& space, const std::set<NodeId>& seeds, const ScoreWeights& w);

// All simple paths of at most max_hops edges between the nodes for two
// labels, shortest first, then by edge ids. a == b gives one empty path.
// Throws kUnknownNode when a label does not resolve.
std::vector<std::vector<EdgeId>> multi_hop_path(const MemorySpace& space, std::string_view entity_a,
                                                std::string_view entity_b, int max_hops);

struct RetrievalHit {
  UnitId unit;
  double score = 0.0;
  std::vector<EdgeId> path;  // empty for direct hits
};

struct Query {
  std::string text;
  Embedding embedding;
  std::set<NodeId> seeds;
  TagSet prefs;
};

// Embeds the text and resolves its Strong entities to seed nodes.
Query make_query(const MemorySpace& space, std::string_view text, const TagSet& prefs,
                 const AnchorSource& annotator, const Embedder& embedder);

// The k best retrievable units, ties broken by later last access then lower
// id. Pure; pair with apply_accesses to record the retrieval.
std::vector<RetrievalHit> retrieve_topk(const MemorySpace& space, const Query& query, std::size_t k,
                                        Timestamp now, const ScoreWeights& w,
                                        const ActivationParams& params);

// Records an access at `now` for every hit (once per unit and timestamp),
// re-activates PendingForget units and counts path-edge traversals.
void apply_accesses(MemorySpace& space, std::span<const RetrievalHit> hits, Timestamp now);

}  // namespace engram
