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

#include "engram/forget.hpp"

#include "engram/error.hpp"
#include "engram/prune.hpp"

namespace engram {

ForgetReport sweep(MemorySpace& space, Timestamp now, const ActivationParams& params, const ForgetConfig& cfg,
                   const Embedder& embedder) {
  ForgetReport report;
  std::vector<UnitId> ids;
  ids.reserve(space.size());
  for (const auto& u : space.units()) ids.push_back(u.id);

  for (UnitId id : ids) {
    const MemoryUnit& u = space.unit(id);
    if (u.has_tag(kPinnedTag)) continue;
    if (u.state == LifecycleState::kActive) {
      const double r = trace_retention(u.trace, now, params);
      if (classify_state(r, params) == ActivationState::kPendingForget) {
        space.set_state(id, LifecycleState::kPendingForget, now);
        report.to_pending.push_back(id);
      }
      continue;
    }
    if (u.state != LifecycleState::kPendingForget) continue;
    const Timestamp since = u.pending_since.value_or(now);
    if (now - since < cfg.grace) continue;
    if (u.provenance.size() > 1 || u.emotion_weight >= cfg.compress_emotion) {
      compress_unit(space, id, std::nullopt, now, embedder);
      report.to_compressed.push_back(id);
    } else {
      space.set_state(id, LifecycleState::kSoftDeleted, now);
      report.to_soft_deleted.push_back(id);
    }
  }

  const double fail_below = space.config().fail_below;
  std::vector<EdgeId> edge_ids;
  for (const auto& e : space.edges()) edge_ids.push_back(e.id);
  for (EdgeId id : edge_ids) {
    const GraphEdge& e = space.edge(id);
    if (e.validity == EdgeValidity::kFailed) continue;
    if (e.last_weakened && now - *e.last_weakened < cfg.weaken_interval) continue;
    bool all_left = true;
    for (UnitId s : e.sources) {
      const MemoryUnit* u = space.find_unit(s);
      if (u && u->state == LifecycleState::kActive) {
        all_left = false;
        break;
      }
    }
    if (!all_left) continue;
    bool failed = false;
    space.update_edge(id, [&](GraphEdge& edge) {
      edge.strength *= 0.5;
      edge.last_weakened = now;
      edge.validity = EdgeValidity::kWeakened;
      if (edge.strength < fail_below) {
        edge.validity = EdgeValidity::kFailed;
        failed = true;
      }
    });
    report.edges_weakened.push_back(id);
    if (failed) report.edges_failed.push_back(id);
  }
  return report;
}

ForgetReport sweep_dry_run(const MemorySpace& space, Timestamp now, const ActivationParams& params,
                           const ForgetConfig& cfg, const Embedder& embedder) {
  MemorySpace scratch = space;
  return sweep(scratch, now, params, cfg, embedder);
}

void restore(MemorySpace& space, UnitId id, Timestamp now) {
  const MemoryUnit& u = space.unit(id);
  if (u.state != LifecycleState::kSoftDeleted) {
    throw Error(ErrorCode::kNotSoftDeleted, "unit " + std::to_string(id.value) + " is " +
                                                std::string(to_string(u.state)) + ", not soft_deleted");
  }
  space.update_unit(id, [&](MemoryUnit& unit) {
    unit.trace = record_access(unit.trace, std::max(now, unit.trace.last_access()));
    unit.superseded_by.reset();
  });
  space.set_state(id, LifecycleState::kActive, now);
}

}  // namespace engram
