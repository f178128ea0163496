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

#include <fstream>
#include <optional>
#include <sstream>

#include "engram/error.hpp"
#include "engram/graphstore.hpp"
#include "engram/json_io.hpp"
#include "engram/text.hpp"

namespace engram {
namespace {

namespace fs = std::filesystem;

constexpr std::string_view kFormat = "engram-snapshot";
constexpr std::string_view kExportFormat = "engram-export";

std::string read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::kCorruptSnapshot, "cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomically(const fs::path& p, const std::string& data) {
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out << data;
    out.flush();
    if (!out) throw Error(ErrorCode::kIo, "short write to " + tmp.string());
  }
  fs::rename(tmp, p);
}

std::string line(const Json& j) { return j.dump() + "\n"; }

void apply_record(MemorySpace& space, const Json& rec) {
  const std::string type = rec.at("type").get<std::string>();
  const std::string op = rec.value("op", std::string("upsert"));
  if (type == "meta") {
    space.restore_meta(rec.at("data").get<MemorySpace::Meta>());
    return;
  }
  if (op == "remove") {
    const auto id = rec.at("id").get<std::uint64_t>();
    if (type == "unit") space.erase_unit_record(UnitId{id});
    else if (type == "node") space.erase_node_record(NodeId{id});
    else if (type == "edge") space.erase_edge_record(EdgeId{id});
    else throw Error(ErrorCode::kCorruptSnapshot, "unknown record type " + type);
    return;
  }
  if (type == "unit") space.restore_unit(rec.at("data").get<MemoryUnit>());
  else if (type == "node") space.restore_node(rec.at("data").get<GraphNode>());
  else if (type == "edge") space.restore_edge(rec.at("data").get<GraphEdge>());
  else throw Error(ErrorCode::kCorruptSnapshot, "unknown record type " + type);
}

Json read_manifest(const fs::path& dir) {
  Json m;
  try {
    m = Json::parse(read_all(dir / "manifest.json"));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kCorruptSnapshot, std::string("manifest: ") + e.what());
  }
  if (m.value("format", std::string()) != kFormat) {
    throw Error(ErrorCode::kCorruptSnapshot, "not an engram snapshot");
  }
  if (m.value("version", 0) != kSnapshotVersion) {
    throw Error(ErrorCode::kVersionUnsupported,
                "snapshot version " + m.value("version", Json(nullptr)).dump() + " is not supported");
  }
  return m;
}

}  // namespace

void save_snapshot(const MemorySpace& space, const fs::path& dir) {
  fs::create_directories(dir);
  std::uint64_t epoch = 1;
  if (fs::exists(dir / "manifest.json")) {
    try {
      epoch = read_manifest(dir).value("epoch", std::uint64_t{0}) + 1;
    } catch (const Error&) {
      // An unreadable old manifest is simply replaced.
    }
  }

  std::string records;
  std::size_t count = 0;
  records += line(Json{{"type", "meta"}, {"data", space.meta()}});
  ++count;
  for (const auto& u : space.units()) {
    records += line(Json{{"type", "unit"}, {"data", u}});
    ++count;
  }
  for (const auto& n : space.nodes()) {
    records += line(Json{{"type", "node"}, {"data", n}});
    ++count;
  }
  for (const auto& e : space.edges()) {
    records += line(Json{{"type", "edge"}, {"data", e}});
    ++count;
  }

  // Each epoch gets its own records file; the manifest rename is the commit
  // point, so a crash leaves either the old or the new snapshot intact.
  const std::string records_name = "records-" + std::to_string(epoch) + ".jsonl";
  write_atomically(dir / records_name, records);
  const Json manifest{{"format", kFormat},
                      {"version", kSnapshotVersion},
                      {"space", space.id()},
                      {"epoch", epoch},
                      {"records_file", records_name},
                      {"records", count},
                      {"sha256", sha256_hex(records)},
                      {"generation", space.generation()}};
  write_atomically(dir / "manifest.json", manifest.dump(2) + "\n");
  write_atomically(dir / "journal.jsonl", "");
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.starts_with("records-") && name != records_name) fs::remove(entry.path());
  }
}

MemorySpace load_snapshot(const fs::path& dir, GraphConfig config) {
  const Json manifest = read_manifest(dir);
  const auto epoch = manifest.value("epoch", std::uint64_t{0});
  const std::string records =
      read_all(dir / manifest.value("records_file", std::string("records.jsonl")));
  if (sha256_hex(records) != manifest.value("sha256", std::string())) {
    throw Error(ErrorCode::kCorruptSnapshot, "records checksum mismatch in " + dir.string());
  }

  MemorySpace space(manifest.at("space").get<std::string>(), std::move(config));
  std::size_t count = 0;
  {
    std::istringstream in(records);
    std::string text;
    while (std::getline(in, text)) {
      if (text.empty()) continue;
      try {
        apply_record(space, Json::parse(text));
      } catch (const Json::exception& e) {
        throw Error(ErrorCode::kCorruptSnapshot, std::string("bad record: ") + e.what());
      }
      ++count;
    }
  }
  if (count != manifest.value("records", std::size_t{0})) {
    throw Error(ErrorCode::kCorruptSnapshot, "record count mismatch");
  }

  if (fs::exists(dir / "journal.jsonl")) {
    const std::string journal = read_all(dir / "journal.jsonl");
    std::vector<std::string> lines;
    std::istringstream in(journal);
    for (std::string text; std::getline(in, text);) lines.push_back(text);
    const bool last_complete = !journal.empty() && journal.back() == '\n';
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      const bool last = i + 1 == lines.size();
      Json rec;
      try {
        rec = Json::parse(lines[i]);
      } catch (const Json::exception&) {
        if (last && !last_complete) break;  // torn tail from an interrupted append
        throw Error(ErrorCode::kCorruptSnapshot, "bad journal line " + std::to_string(i + 1));
      }
      if (rec.value("epoch", std::uint64_t{0}) != epoch) continue;
      try {
        apply_record(space, rec);
      } catch (const Json::exception& e) {
        throw Error(ErrorCode::kCorruptSnapshot, std::string("bad journal record: ") + e.what());
      }
    }
  }
  space.rebuild_indexes();
  space.take_changes();
  return space;
}

void append_journal(const MemorySpace& space, const ChangeSet& changes, const fs::path& dir) {
  if (changes.empty()) return;
  if (!fs::exists(dir / "manifest.json")) {
    save_snapshot(space, dir);
    return;
  }
  const auto epoch = read_manifest(dir).value("epoch", std::uint64_t{0});
  std::string out;
  auto upsert = [&](std::string_view type, Json data) {
    out += line(Json{{"epoch", epoch}, {"op", "upsert"}, {"type", type}, {"data", std::move(data)}});
  };
  auto remove = [&](std::string_view type, std::uint64_t id) {
    out += line(Json{{"epoch", epoch}, {"op", "remove"}, {"type", type}, {"id", id}});
  };
  for (UnitId id : changes.units) {
    if (const auto* u = space.find_unit(id)) upsert("unit", *u);
  }
  for (NodeId id : changes.nodes) {
    if (const auto* n = space.find_node(id)) upsert("node", *n);
  }
  for (EdgeId id : changes.edges) {
    if (const auto* e = space.find_edge(id)) upsert("edge", *e);
  }
  for (UnitId id : changes.removed_units) remove("unit", id.value);
  for (NodeId id : changes.removed_nodes) remove("node", id.value);
  for (EdgeId id : changes.removed_edges) remove("edge", id.value);
  if (changes.meta) out += line(Json{{"epoch", epoch}, {"type", "meta"}, {"data", space.meta()}});

  std::ofstream f(dir / "journal.jsonl", std::ios::binary | std::ios::app);
  if (!f) throw Error(ErrorCode::kIo, "cannot append to journal in " + dir.string());
  f << out;
  f.flush();
  if (!f) throw Error(ErrorCode::kIo, "journal append failed in " + dir.string());
}

std::string export_jsonl(const MemorySpace& space) {
  std::string out = line(Json{{"type", "space"}, {"format", kExportFormat}, {"version", kSnapshotVersion}, {"id", space.id()}});
  out += line(Json{{"type", "meta"}, {"data", space.meta()}});
  for (const auto& u : space.units()) out += line(Json{{"type", "unit"}, {"data", u}});
  for (const auto& n : space.nodes()) out += line(Json{{"type", "node"}, {"data", n}});
  for (const auto& e : space.edges()) out += line(Json{{"type", "edge"}, {"data", e}});
  return out;
}

MemorySpace import_jsonl(std::string_view text, GraphConfig config) {
  std::istringstream in{std::string(text)};
  std::optional<MemorySpace> space;
  std::size_t n = 0;
  for (std::string text_line; std::getline(in, text_line);) {
    ++n;
    if (text_line.empty()) continue;
    try {
      const Json rec = Json::parse(text_line);
      if (!space) {
        if (rec.value("type", std::string()) != "space" || rec.value("format", std::string()) != kExportFormat) {
          throw Error(ErrorCode::kCorruptSnapshot, "export must start with a space header");
        }
        if (rec.value("version", 0) != kSnapshotVersion) {
          throw Error(ErrorCode::kVersionUnsupported, "export version is not supported");
        }
        space.emplace(rec.at("id").get<std::string>(), config);
        continue;
      }
      apply_record(*space, rec);
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kCorruptSnapshot, "line " + std::to_string(n) + ": " + e.what());
    }
  }
  if (!space) throw Error(ErrorCode::kCorruptSnapshot, "empty export");
  space->rebuild_indexes();
  space->take_changes();
  return std::move(*space);
}

}  // namespace engram
