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

// Forgetting sweeps.
//
// One pass over a space:
//   Active, retention < forget_threshold        -> PendingForget
//   PendingForget for at least `grace`          -> Compressed when the unit was
//       heard more than once or carries emotion_weight >= compress_emotion,
//       SoftDeleted otherwise
//   edge whose source units all left Active     -> strength halved, at most once
//       per weaken_interval; Failed below GraphConfig::fail_below
// Pinned units are never moved. Nothing is hard-deleted.

#pragma once

#include <vector>

#include "engram/activation.hpp"
#include "engram/graphstore.hpp"

namespace engram {

struct ForgetConfig {
  Duration grace = 7 * kDay;
  Duration weaken_interval = kDay;
  double compress_emotion = 0.5;
};

struct ForgetReport {
  std::vector<UnitId> to_pending;
  std::vector<UnitId> to_soft_deleted;
  std::vector<UnitId> to_compressed;
  std::vector<EdgeId> edges_weakened;
  std::vector<EdgeId> edges_failed;  // subset of edges_weakened

  bool empty() const {
    return to_pending.empty() && to_soft_deleted.empty() && to_compressed.empty() && edges_weakened.empty();
  }
};

ForgetReport sweep(MemorySpace& space, Timestamp now, const ActivationParams& params, const ForgetConfig& cfg,
                   const Embedder& embedder);

// The report sweep would produce, leaving the space untouched.
ForgetReport sweep_dry_run(const MemorySpace& space, Timestamp now, const ActivationParams& params,
                           const ForgetConfig& cfg, const Embedder& embedder);

// SoftDeleted -> Active, with an access recorded at `now`. Throws
// kNotSoftDeleted for any other state (Compressed is terminal), kUnknownUnit.
void restore(MemorySpace& space, UnitId id, Timestamp now);

}  // namespace engram
