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
#include "engram/engine.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include "engram/api_json.hpp"
#include "engram/error.hpp"
#include "engram/json_io.hpp"
#include "engram/retrieve.hpp"
#include "engram/text.hpp"

namespace engram {
namespace {

namespace fs = std::filesystem;

constexpr std::string_view kHubFile = "hub.json";

void check_space_id(const std::string& id) {
  const bool ok = !id.empty() && id.size() <= 64 && id != "." && id != ".." &&
                  std::all_of(id.begin(), id.end(), [](char c) {
                    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
                  });
  if (!ok) throw Error(ErrorCode::kInvalidArgument, "space id must be 1-64 characters of [A-Za-z0-9._-]");
}

}  // namespace

std::string_view to_string(Pass p) {
  switch (p) {
    case Pass::kPrune: return "prune";
    case Pass::kForget: return "forget";
    case Pass::kReflect: return "reflect";
  }
  return "?";
}

std::optional<Pass> parse_pass(std::string_view name) {
  for (Pass p : {Pass::kPrune, Pass::kForget, Pass::kReflect}) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

Timestamp wall_clock() {
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  return Timestamp{std::chrono::duration_cast<std::chrono::seconds>(now).count()};
}

MemoryEngine::MemoryEngine(EngineConfig config, bool persist)
    : config_(std::move(config)), persist_(persist), hub_(config_.envelope_ttl) {
  config_.validate();
  embedder_ = std::make_unique<HashingEmbedder>(config_.graph.embedding_dim);
  const auto& a = config_.annotate;
  annotator_ = std::make_unique<Annotator>(a.gazetteer.empty() && a.lexicon.empty() && a.acknowledgments.empty()
                                               ? RuleTables::defaults()
                                               : RuleTables::load(a.gazetteer, a.lexicon, a.acknowledgments));
  anchor_source_ = annotator_.get();
  if (a.http) {
    adapter_ = std::make_unique<HttpAnnotatorAdapter>(*a.http, *annotator_);
    anchor_source_ = adapter_.get();
  }
  if (!persist_) return;

  const fs::path root = config_.service.data_dir;
  fs::create_directories(root);
  for (const auto& entry : fs::directory_iterator(root)) {
    if (!entry.is_directory() || !fs::exists(entry.path() / "manifest.json")) continue;
    auto space = load_snapshot(entry.path(), config_.graph);
    const std::string id = space.id();
    slots_.emplace(id, std::make_unique<Slot>(std::move(space)));
  }
  if (fs::exists(root / kHubFile)) {
    std::ifstream in(root / kHubFile);
    try {
      const Json registry = Json::parse(in);
      for (const auto& j : registry.at("agents")) hub_.register_agent(j.get<AgentProfile>());
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kCorruptSnapshot, std::string("hub registry: ") + e.what());
    }
    for (const auto& [id, a] : hub_.agents()) {
      if (!slots_.count(a.space_id)) slots_.emplace(a.space_id, std::make_unique<Slot>(MemorySpace(a.space_id, config_.graph)));
    }
  }
}

MemoryEngine::~MemoryEngine() = default;

Timestamp MemoryEngine::now_or(const std::optional<Timestamp>& ts) const { return ts ? *ts : wall_clock(); }

fs::path MemoryEngine::dir_of(const std::string& space) const { return config_.service.data_dir / space; }

MemoryEngine::Slot& MemoryEngine::slot(const std::string& space) {
  return const_cast<Slot&>(static_cast<const MemoryEngine*>(this)->slot(space));
}

const MemoryEngine::Slot& MemoryEngine::slot(const std::string& space) const {
  std::shared_lock lock(registry_mu_);
  auto it = slots_.find(space);
  if (it == slots_.end()) throw Error(ErrorCode::kSpaceUnknown, "unknown space \"" + space + "\"");
  return *it->second;
}

MemoryEngine::Slot& MemoryEngine::slot_or_create(const std::string& space) {
  {
    std::shared_lock lock(registry_mu_);
    if (auto it = slots_.find(space); it != slots_.end()) return *it->second;
  }
  check_space_id(space);
  std::unique_lock lock(registry_mu_);
  auto& s = slots_[space];
  if (!s) s = std::make_unique<Slot>(MemorySpace(space, config_.graph));
  return *s;
}

bool MemoryEngine::has_space(const std::string& space) const {
  std::shared_lock lock(registry_mu_);
  return slots_.count(space) > 0;
}

std::vector<std::string> MemoryEngine::spaces() const {
  std::shared_lock lock(registry_mu_);
  std::vector<std::string> out;
  for (const auto& [id, s] : slots_) out.push_back(id);
  return out;
}

void MemoryEngine::commit(Slot& s) {
  const ChangeSet changes = s.space.take_changes();
  if (changes.empty()) return;
  if (persist_) append_journal(s.space, changes, dir_of(s.space.id()));
  ++generation_;
}

void MemoryEngine::commit_snapshot(Slot& s) {
  const ChangeSet changes = s.space.take_changes();
  if (persist_) save_snapshot(s.space, dir_of(s.space.id()));
  if (!changes.empty()) ++generation_;
}

IngestResult MemoryEngine::ingest(const std::string& space, const IngestRequest& req) {
  if (normalize_text(req.utterance).empty()) throw Error(ErrorCode::kEmptyUtterance, "utterance is empty");
  const Timestamp now = now_or(req.ts);
  Slot& s = slot_or_create(space);
  std::unique_lock lock(s.mu);
  MemorySpace& sp = s.space;

  const auto anchors = anchor_source_->annotate(req.utterance, sp.recent_context());
  IngestResult result;
  result.turn = sp.next_turn();
  const UtteranceRef ref{space + ":" + std::to_string(result.turn), result.turn, req.speaker};
  auto units = generate_units(anchors, req.utterance, now, space, ref, *embedder_);
  if (units.empty()) {
    if (auto t = generate_turn_unit(anchors, req.utterance, now, space, ref, *embedder_)) units.push_back(std::move(*t));
  }
  for (auto& u : units) result.units.push_back(sp.insert_unit(std::move(u)));
  result.edges_failed = sp.detect_failed_edges(now, result.units);
  sp.push_context(req.utterance);
  commit(s);
  return result;
}

QueryResult MemoryEngine::query(const std::string& space, const QueryRequest& req) {
  const ScoreWeights weights = req.weights ? *req.weights : config_.retrieval.weights;
  weights.validate();
  const std::size_t k = req.k ? *req.k : config_.retrieval.default_k;
  const Timestamp now = now_or(req.ts);
  Slot& s = slot(space);

  std::vector<RetrievalHit> hits;
  QueryResult result;
  {
    std::shared_lock lock(s.mu);
    const Query q = make_query(s.space, req.text, req.tags, *anchor_source_, *embedder_);
    hits = retrieve_topk(s.space, q, k, now, weights, config_.activation);
    std::erase_if(hits, [&](const RetrievalHit& h) { return h.score < config_.retrieval.score_floor; });
    for (const auto& h : hits) {
      const MemoryUnit& u = s.space.unit(h.unit);
      QueryHit out{h.unit, h.score, u.content, std::nullopt, u.state, h.path};
      if (const Fact* f = u.primary_fact()) out.fact = *f;
      result.tokens += count_tokens(u.content);
      result.hits.push_back(std::move(out));
    }
  }
  if (req.record_access && !hits.empty()) {
    std::unique_lock lock(s.mu);
    apply_accesses(s.space, hits, now);
    commit(s);
  }
  return result;
}

MaintainResult MemoryEngine::maintain(const std::string& space, const MaintainRequest& req) {
  const Timestamp now = now_or(req.ts);
  const MaintenanceSettings settings = config_.maintenance();
  Slot& s = slot(space);
  std::unique_lock lock(s.mu);

  // Passes run on a copy that replaces the store only when all succeeded.
  MemorySpace work = s.space;
  MaintainResult result;
  result.dry_run = req.dry_run;
  for (Pass p : req.passes) {
    switch (p) {
      case Pass::kPrune: {
        auto verdicts = classify_redundancy(work, build_association_map(work), now, settings.prune, settings.activation);
        result.prune = refine(verdicts, work, now, *embedder_);
        result.verdicts = std::move(verdicts);
        break;
      }
      case Pass::kForget:
        result.forget = sweep(work, now, settings.activation, settings.forget, *embedder_);
        break;
      case Pass::kReflect:
        result.reflect = run_reflection_cycle(work, now, settings, *embedder_, req.feedback);
        break;
    }
  }
  result.generation = work.generation();
  if (req.dry_run) return result;
  s.space = std::move(work);
  commit_snapshot(s);
  return result;
}

SpaceStats MemoryEngine::stats(const std::string& space) const {
  return inspect(space, [](const MemorySpace& sp) {
    SpaceStats st;
    st.id = sp.id();
    for (auto state : {LifecycleState::kActive, LifecycleState::kPendingForget, LifecycleState::kSoftDeleted,
                       LifecycleState::kCompressed}) {
      st.units_by_state[std::string(to_string(state))] = 0;
    }
    for (auto v : {EdgeValidity::kValid, EdgeValidity::kWeakened, EdgeValidity::kFailed}) {
      st.edges_by_validity[std::string(to_string(v))] = 0;
    }
    for (const auto& u : sp.units()) ++st.units_by_state[std::string(to_string(u.state))];
    for (const auto& e : sp.edges()) ++st.edges_by_validity[std::string(to_string(e.validity))];
    st.units = sp.units().size();
    st.nodes = sp.nodes().size();
    st.edges = sp.edges().size();
    st.live_tokens = live_tokens(sp);
    st.fact_keys = live_fact_keys(sp).size();
    st.turns = sp.turn_count();
    st.version = sp.version();
    st.generation = sp.generation();
    st.last_reflection = sp.last_reflection();
    return st;
  });
}

std::string MemoryEngine::export_space(const std::string& space) const {
  return inspect(space, [](const MemorySpace& sp) { return export_jsonl(sp); });
}

std::string MemoryEngine::import_space(std::string_view jsonl) {
  MemorySpace imported = import_jsonl(jsonl, config_.graph);
  const std::string id = imported.id();
  Slot& s = slot_or_create(id);
  std::unique_lock lock(s.mu);
  s.space = std::move(imported);
  if (persist_) save_snapshot(s.space, dir_of(id));
  ++generation_;
  return id;
}

std::size_t MemoryEngine::purge(const std::string& space, bool confirm) {
  if (!confirm) throw Error(ErrorCode::kInvalidArgument, "purge deletes data permanently; pass --confirm");
  Slot& s = slot(space);
  std::unique_lock lock(s.mu);
  std::vector<UnitId> doomed;
  for (const auto& u : s.space.units()) {
    if (u.state == LifecycleState::kSoftDeleted) doomed.push_back(u.id);
  }
  for (UnitId id : doomed) s.space.remove_unit(id);
  commit_snapshot(s);
  return doomed.size();
}

void MemoryEngine::save_hub() const {
  if (!persist_) return;
  Json agents = Json::array();
  for (const auto& [id, a] : hub_.agents()) agents.push_back(a);
  const fs::path path = config_.service.data_dir / kHubFile;
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << Json{{"agents", agents}}.dump(2) << "\n";
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

void MemoryEngine::register_agent(const AgentProfile& profile) {
  check_space_id(profile.space_id);
  std::lock_guard lock(hub_mu_);
  hub_.register_agent(profile);
  slot_or_create(profile.space_id);
  save_hub();
  ++generation_;
}

std::vector<AgentProfile> MemoryEngine::agents() const {
  std::lock_guard lock(hub_mu_);
  std::vector<AgentProfile> out;
  for (const auto& [id, a] : hub_.agents()) out.push_back(a);
  return out;
}

std::string MemoryEngine::route(const TagSet& tags) const {
  std::lock_guard lock(hub_mu_);
  return hub_.route(tags);
}

ShareEnvelope MemoryEngine::share(const ShareRequest& req) {
  const Timestamp now = now_or(req.ts);
  std::lock_guard hub_lock(hub_mu_);
  const Slot& s = slot(hub_.agent(req.agent_id).space_id);
  std::shared_lock lock(s.mu);
  return hub_.summarize_for_share(req.agent_id, s.space, req.topic, req.permissions, now, *embedder_);
}

ApplyReport MemoryEngine::apply(const ApplyRequest& req) {
  const Timestamp now = now_or(req.ts);
  std::lock_guard hub_lock(hub_mu_);
  Slot& s = slot(hub_.agent(req.agent_id).space_id);
  std::unique_lock lock(s.mu);
  MemorySpace work = s.space;
  const ApplyReport report = hub_.apply_shared(req.envelope, req.agent_id, work, now, *embedder_);
  s.space = std::move(work);
  commit(s);
  return report;
}

}  // namespace engram
