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

#include "engram/reflect.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/strong_components.hpp>

#include "engram/error.hpp"
#include "engram/json_io.hpp"
#include "engram/text.hpp"

namespace engram {
namespace {

std::vector<const MemoryUnit*> live_units(const MemorySpace& space) {
  std::vector<const MemoryUnit*> out;
  for (const auto& u : space.units()) {
    if (u.is_retrievable()) out.push_back(&u);
  }
  return out;
}

bool dialogue_order(const MemoryUnit* a, const MemoryUnit* b) {
  return std::tuple(a->first_turn(), a->created_at, a->id) < std::tuple(b->first_turn(), b->created_at, b->id);
}

bool creation_order(const MemoryUnit* a, const MemoryUnit* b) {
  return std::tie(a->created_at, a->id) < std::tie(b->created_at, b->id);
}

}  // namespace

std::string_view to_string(TemporalFinding::Kind kind) {
  return kind == TemporalFinding::Kind::kOrdering ? "ordering" : "inversion";
}

std::string_view to_string(Resolution::Kind kind) {
  return kind == Resolution::Kind::kReplacement ? "replacement" : "fusion";
}

std::vector<TemporalFinding> reflect_temporal(const MemorySpace& space) {
  std::vector<TemporalFinding> out;
  auto units = live_units(space);
  std::erase_if(units, [](const MemoryUnit* u) { return u->first_turn() < 0; });
  std::sort(units.begin(), units.end(), dialogue_order);

  const MemoryUnit* latest = nullptr;
  for (const MemoryUnit* u : units) {
    if (latest && u->created_at < latest->created_at) {
      out.push_back({TemporalFinding::Kind::kOrdering, u->id, latest->id,
                     "created " + std::to_string(latest->created_at - u->created_at) +
                         "s before an earlier turn"});
    }
    if (!latest || u->created_at > latest->created_at) latest = u;
  }

  std::map<std::string, std::vector<const MemoryUnit*>> chains;
  for (const MemoryUnit* u : units) {
    if (const Fact* f = u->primary_fact()) chains[f->key].push_back(u);
  }
  for (const auto& [key, chain] : chains) {
    const MemoryUnit* past = nullptr;
    for (const MemoryUnit* u : chain) {
      if (u->anchors.temporal_class == TemporalClass::kFuture && past) {
        out.push_back({TemporalFinding::Kind::kInversion, u->id, past->id, "future after past for \"" + key + "\""});
      }
      if (!past && u->anchors.temporal_class == TemporalClass::kPast) past = u;
    }
  }
  return out;
}

std::vector<Resolution> reflect_factual(MemorySpace& space, Timestamp now, const ReflectConfig& cfg,
                                        const Embedder& embedder) {
  std::map<std::string, std::vector<const MemoryUnit*>> groups;
  for (const MemoryUnit* u : live_units(space)) {
    const Fact* f = u->primary_fact();
    if (u->kind == UnitKind::kFact && f && space.config().is_functional(f->label)) groups[f->key].push_back(u);
  }

  struct Plan {
    std::string key;
    UnitId newest;
    std::vector<UnitId> replace;
    std::vector<UnitId> fuse;
  };
  std::vector<Plan> plans;
  for (auto& [key, units] : groups) {
    std::sort(units.begin(), units.end(), creation_order);
    const MemoryUnit* newest = units.back();
    Plan plan{key, newest->id, {}, {}};
    for (const MemoryUnit* u : units) {
      if (u == newest || u->primary_fact()->value == newest->primary_fact()->value) continue;
      (newest->created_at - u->created_at > cfg.ambiguity_window ? plan.replace : plan.fuse).push_back(u->id);
    }
    if (!plan.replace.empty() || !plan.fuse.empty()) plans.push_back(std::move(plan));
  }

  std::vector<Resolution> out;
  for (const auto& plan : plans) {
    for (UnitId id : plan.replace) compress_unit(space, id, plan.newest, now, embedder);
    if (!plan.replace.empty()) out.push_back({Resolution::Kind::kReplacement, plan.key, plan.newest, plan.replace});
    if (plan.fuse.empty()) continue;

    // Fused content lists every value, oldest first.
    std::vector<std::string> values;
    std::vector<Fact> older;
    for (UnitId id : plan.fuse) {
      const Fact& f = *space.unit(id).primary_fact();
      if (std::find(values.begin(), values.end(), f.value) == values.end()) {
        values.push_back(f.value);
        older.push_back(f);
      }
    }
    values.push_back(space.unit(plan.newest).primary_fact()->value);
    const std::string content = plan.key + " = " + join(values, " / ");
    space.update_unit(plan.newest, [&](MemoryUnit& u) {
      u.content = content;
      u.embedding = embedder.embed(content);
      u.anchors.facts.insert(u.anchors.facts.end(), older.begin(), older.end());
      u.conflict_unresolved = true;
    });
    for (UnitId id : plan.fuse) space.merge_unit_into(id, plan.newest, now);
    out.push_back({Resolution::Kind::kFusion, plan.key, plan.newest, plan.fuse});
  }
  return out;
}

LogicalFindings reflect_logical(MemorySpace& space, const ReflectConfig& cfg) {
  LogicalFindings out;
  std::vector<EdgeId> used;
  for (const auto& e : space.edges()) {
    if (e.path_uses > 0) used.push_back(e.id);
  }
  for (EdgeId id : used) {
    Reinforcement r{id, space.edge(id).strength, 0.0};
    space.update_edge(id, [&](GraphEdge& e) {
      e.strength = std::min(cfg.strength_cap, e.strength + cfg.reinforce_delta * static_cast<double>(e.path_uses));
      e.path_uses = 0;
      if (e.validity == EdgeValidity::kWeakened && e.strength >= space.config().weaken_ceiling) {
        e.validity = EdgeValidity::kValid;
        e.last_weakened.reset();
      }
      r.after = e.strength;
    });
    out.reinforced.push_back(r);
  }

  for (const auto& n : space.nodes()) {
    std::size_t usable = 0;
    std::size_t failed = 0;
    for (EdgeId id : space.incident_edges(n.id)) {
      (space.edge(id).validity == EdgeValidity::kFailed ? failed : usable) += 1;
    }
    if (usable == 1 && failed >= 1) out.dangling.push_back(n.id);
  }

  // Functional relations should form a forest; a strongly connected group
  // means some assertion is wrong.
  using Graph = boost::adjacency_list<boost::vecS, boost::vecS, boost::directedS>;
  std::map<NodeId, std::size_t> index;
  std::vector<NodeId> node_of;
  auto vertex = [&](NodeId n) {
    auto [it, fresh] = index.try_emplace(n, node_of.size());
    if (fresh) node_of.push_back(n);
    return it->second;
  };
  std::vector<std::pair<std::size_t, std::size_t>> arcs;
  std::set<NodeId> self_loops;
  for (const auto& e : space.edges()) {
    if (e.validity == EdgeValidity::kFailed || !space.config().is_functional(e.relation_label)) continue;
    if (e.head == e.tail) self_loops.insert(e.head);
    arcs.emplace_back(vertex(e.head), vertex(e.tail));
  }
  Graph g(node_of.size());
  for (const auto& [a, b] : arcs) boost::add_edge(a, b, g);
  std::vector<std::size_t> component(node_of.size());
  const std::size_t count = node_of.empty() ? 0 : boost::strong_components(g, component.data());
  std::vector<std::vector<NodeId>> groups(count);
  for (std::size_t v = 0; v < node_of.size(); ++v) groups[component[v]].push_back(node_of[v]);
  for (auto& group : groups) {
    if (group.size() < 2 && !(group.size() == 1 && self_loops.count(group[0]))) continue;
    std::sort(group.begin(), group.end());
    out.functional_cycles.push_back(std::move(group));
  }
  std::sort(out.functional_cycles.begin(), out.functional_cycles.end());
  return out;
}

std::vector<FeedbackEntry> load_feedback(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read feedback file " + path.string());
  std::vector<FeedbackEntry> out;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const Json j = Json::parse(line);
      FeedbackEntry e{UnitId{j.at("unit_id").get<std::uint64_t>()}, j.at("delta").get<double>()};
      if (!std::isfinite(e.delta)) throw Error(ErrorCode::kInvalidArgument, "non-finite delta");
      out.push_back(e);
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kInvalidArgument,
                  path.string() + ":" + std::to_string(n) + ": " + std::string(e.what()));
    }
  }
  return out;
}

bool ReflectionReport::mutated() const {
  return !feedback_applied.empty() || !resolutions.empty() || !edges_failed.empty() || !node_merges.empty() ||
         !logical.reinforced.empty() || !prune.empty() || !forget.empty();
}

ReflectionReport run_reflection_cycle(MemorySpace& space, Timestamp now, const MaintenanceSettings& settings,
                                      const Embedder& embedder, const std::vector<FeedbackEntry>& feedback) {
  MemorySpace work = space;
  ReflectionReport report;
  for (const auto& f : feedback) {
    if (!work.find_unit(f.unit)) {
      report.feedback_unknown.push_back(f.unit);
      continue;
    }
    work.update_unit(f.unit, [&](MemoryUnit& u) { u.emotion_weight = std::clamp(u.emotion_weight + f.delta, 0.0, 1.0); });
    report.feedback_applied.push_back(f.unit);
  }
  report.temporal = reflect_temporal(work);
  report.resolutions = reflect_factual(work, now, settings.reflect, embedder);
  report.edges_failed = work.detect_failed_edges(now);
  if (settings.reflect.node_merge_threshold > 0.0) {
    report.node_merges = work.merge_similar_nodes(settings.reflect.node_merge_threshold, embedder);
  }
  report.logical = reflect_logical(work, settings.reflect);
  const auto verdicts =
      classify_redundancy(work, build_association_map(work), now, settings.prune, settings.activation);
  report.prune = refine(verdicts, work, now, embedder);
  report.forget = sweep(work, now, settings.activation, settings.forget, embedder);
  work.bump_generation();
  work.set_last_reflection(now);
  report.generation = work.generation();
  space = std::move(work);
  return report;
}

}  // namespace engram
