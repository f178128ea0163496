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
// engram: command-line front end.
//
// Every subcommand except gen-corpus and bench works on the persistent store
// under the configured data directory.

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "engram/api_json.hpp"
#include "engram/config.hpp"
#include "engram/corpus.hpp"
#include "engram/engine.hpp"
#include "engram/error.hpp"
#include "engram/server.hpp"

using namespace engram;

namespace {

struct Globals {
  std::string config_path;
  std::string data_dir;
  std::string space = "default";
  std::optional<std::int64_t> ts;
};

EngineConfig load(const Globals& g) {
  EngineConfig c = load_config_from_env(g.config_path.empty() ? std::nullopt
                                                               : std::optional<std::filesystem::path>(g.config_path));
  if (!g.data_dir.empty()) c.service.data_dir = g.data_dir;
  return c;
}

std::optional<Timestamp> ts_of(const Globals& g) {
  if (!g.ts) return std::nullopt;
  return Timestamp{*g.ts};
}

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
  if (path.empty() || path == "-") {
    std::cout << data;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << data;
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
}

void print(const Json& j) { std::cout << j.dump(2) << "\n"; }

double percentile(std::vector<double> xs, double p) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const auto idx = static_cast<std::size_t>(std::ceil(p * static_cast<double>(xs.size()))) - 1;
  return xs[std::min(idx, xs.size() - 1)];
}

HttpService* g_service = nullptr;

extern "C" void on_signal(int) {
  if (g_service) g_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"engram - long-term memory engine for conversational agents"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  Globals g;
  app.add_option("-c,--config", g.config_path, "config file (default: $ENGRAM_CONFIG)");
  app.add_option("-d,--data-dir", g.data_dir, "data directory (overrides service.data_dir)");
  app.add_option("-s,--space", g.space, "memory space id")->capture_default_str();
  app.add_option("--ts", g.ts, "logical time in Unix seconds (default: now)");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "ingest a JSONL file of {utterance, speaker, ts}");
  std::string ingest_file;
  ingest->add_option("file", ingest_file, "JSONL file, or - for stdin")->required();

  // query
  auto* query = app.add_subcommand("query", "retrieve the best memories for a text");
  std::string query_text;
  std::size_t query_k = 0;
  std::vector<std::string> query_tags;
  bool query_no_record = false;
  query->add_option("text", query_text)->required();
  query->add_option("-k", query_k, "number of hits (default: retrieval.default_k)");
  query->add_option("--tag", query_tags, "preference tags");
  query->add_flag("--no-record", query_no_record, "do not record the retrieval as an access");

  // maintenance
  bool dry_run = false;
  auto* sweep = app.add_subcommand("sweep", "forgetting sweep");
  sweep->add_flag("--dry-run", dry_run, "report without mutating");
  auto* prune = app.add_subcommand("prune", "semantic pruning pass");
  prune->add_flag("--dry-run", dry_run, "report without mutating");
  auto* reflect = app.add_subcommand("reflect", "full reflection cycle");
  std::string feedback_file;
  reflect->add_flag("--dry-run", dry_run, "report without mutating");
  reflect->add_option("--feedback", feedback_file, "JSONL of {unit_id, delta}");

  // export / import / purge
  auto* exp = app.add_subcommand("export", "canonical JSONL dump of a space");
  std::string export_out;
  exp->add_option("-o,--out", export_out, "output file (default: stdout)");
  auto* imp = app.add_subcommand("import", "load a space from an export (replaces it)");
  std::string import_file;
  imp->add_option("file", import_file, "export file, or - for stdin")->required();
  auto* purge = app.add_subcommand("purge", "permanently remove soft-deleted units");
  bool confirm = false;
  purge->add_flag("--confirm", confirm, "required: purge cannot be undone");

  // gen-corpus
  auto* gen = app.add_subcommand("gen-corpus", "synthetic dialogue with answer key");
  CorpusOptions copt;
  std::string gen_out, gen_probes;
  std::int64_t gen_start = copt.start.seconds;
  gen->add_option("--facts", copt.facts)->capture_default_str();
  gen->add_option("--dup", copt.dup, "statements per fact")->capture_default_str();
  gen->add_option("--ack-rate", copt.ack_rate)->capture_default_str();
  gen->add_option("--contradictions", copt.contradictions)->capture_default_str();
  gen->add_option("--filler", copt.filler, "chit-chat turns")->capture_default_str();
  gen->add_option("--seed", copt.seed)->capture_default_str();
  gen->add_option("--start", gen_start, "first timestamp")->capture_default_str();
  gen->add_option("-o,--out", gen_out, "dialogue JSONL (default: stdout)");
  gen->add_option("--probes", gen_probes, "probe/answer-key JSONL");

  // bench
  auto* bench = app.add_subcommand("bench", "retrieval latency and token-reduction report");
  CorpusOptions bopt;
  bopt.facts = 200;
  bopt.dup = 10;
  bopt.ack_rate = 0.5;
  std::size_t bench_k = 5;
  bench->add_option("--facts", bopt.facts)->capture_default_str();
  bench->add_option("--dup", bopt.dup)->capture_default_str();
  bench->add_option("--ack-rate", bopt.ack_rate)->capture_default_str();
  bench->add_option("--filler", bopt.filler)->capture_default_str();
  bench->add_option("--seed", bopt.seed)->capture_default_str();
  bench->add_option("-k", bench_k)->capture_default_str();

  // serve
  auto* serve = app.add_subcommand("serve", "run the HTTP API");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      copt.start = Timestamp{gen_start};
      const Corpus c = generate_corpus(copt);
      write_file(gen_out, turns_jsonl(c));
      if (!gen_probes.empty()) write_file(gen_probes, probes_jsonl(c));
      if (!gen_out.empty()) {
        print({{"turns", c.turns.size()}, {"facts", c.probes.size()}, {"total_tokens", c.total_tokens},
               {"redundant_tokens", c.redundant_tokens}});
      }
      return 0;
    }

    if (bench->parsed()) {
      EngineConfig cfg = load(g);
      MemoryEngine engine(cfg);
      const Corpus c = generate_corpus(bopt);
      for (const auto& t : c.turns) engine.ingest("bench", {t.utterance, t.speaker, t.ts});
      const Timestamp now = c.turns.back().ts + kMinute;
      auto run_probes = [&](Timestamp at) {
        std::vector<double> ms;
        std::size_t correct = 0, tokens = 0;
        for (const auto& p : c.probes) {
          QueryRequest q;
          q.text = p.question;
          q.k = bench_k;
          q.ts = at;
          q.record_access = false;
          const auto t0 = std::chrono::steady_clock::now();
          const auto r = engine.query("bench", q);
          ms.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
          tokens += r.tokens;
          correct += std::any_of(r.hits.begin(), r.hits.end(), [&](const QueryHit& h) {
            return h.fact && h.fact->key == p.key && h.fact->value == p.value;
          });
        }
        const double n = static_cast<double>(c.probes.size());
        return Json{{"p50_ms", percentile(ms, 0.5)},
                    {"p95_ms", percentile(ms, 0.95)},
                    {"accuracy", static_cast<double>(correct) / n},
                    {"tokens_retrieved_per_query", static_cast<double>(tokens) / n},
                    {"tokens_ratio", static_cast<double>(tokens) / n / static_cast<double>(c.total_tokens)}};
      };
      Json report{{"turns", c.turns.size()}, {"full_history_tokens", c.total_tokens},
                  {"injected_redundant_tokens", c.redundant_tokens}};
      const std::size_t bound = engine.inspect("bench", [](const MemorySpace& sp) { return redundant_token_bound(sp); });
      report["redundant_store_tokens"] = bound;
      report["before_prune"] = run_probes(now);
      MaintainRequest m;
      m.passes = {Pass::kPrune};
      m.ts = now;
      const auto pr = engine.maintain("bench", m);
      report["prune"] = *pr.prune;
      report["token_reduction_vs_bound"] =
          bound == 0 ? 0.0
                     : static_cast<double>(pr.prune->tokens_before - pr.prune->tokens_after) /
                           static_cast<double>(bound);
      report["after_prune"] = run_probes(now);
      print(report);
      return 0;
    }

    EngineConfig cfg = load(g);
    if (serve->parsed()) {
      MemoryEngine engine(cfg, true);
      HttpService service(engine);
      const int port = service.bind(cfg.service.host, cfg.service.port);
      g_service = &service;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      spdlog::info("engram listening on {}:{} (data in {})", cfg.service.host, port, cfg.service.data_dir.string());
      service.listen();
      g_service = nullptr;
      return 0;
    }

    MemoryEngine engine(cfg, true);
    if (ingest->parsed()) {
      std::istringstream in(read_file(ingest_file));
      std::size_t turns = 0, units = 0, lineno = 0;
      for (std::string line; std::getline(in, line);) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        IngestRequest req;
        try {
          req = Json::parse(line).get<IngestRequest>();
        } catch (const Json::exception& e) {
          throw Error(ErrorCode::kInvalidArgument, ingest_file + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (!req.ts) req.ts = ts_of(g);
        units += engine.ingest(g.space, req).units.size();
        ++turns;
      }
      print({{"space", g.space}, {"turns", turns}, {"units", units}});
    } else if (query->parsed()) {
      QueryRequest q;
      q.text = query_text;
      if (query_k > 0) q.k = query_k;
      q.tags = TagSet(query_tags.begin(), query_tags.end());
      q.ts = ts_of(g);
      q.record_access = !query_no_record;
      print(engine.query(g.space, q));
    } else if (sweep->parsed() || prune->parsed() || reflect->parsed()) {
      MaintainRequest m;
      m.passes = {sweep->parsed() ? Pass::kForget : prune->parsed() ? Pass::kPrune : Pass::kReflect};
      m.ts = ts_of(g);
      m.dry_run = dry_run;
      if (!feedback_file.empty()) m.feedback = load_feedback(feedback_file);
      const auto r = engine.maintain(g.space, m);
      if (r.prune && !r.reflect) {
        Json out = *r.prune;
        out["verdicts"] = Json(r)["verdict_counts"];
        out["dry_run"] = r.dry_run;
        print(out);
      } else if (r.forget && !r.reflect) {
        Json out = *r.forget;
        out["dry_run"] = r.dry_run;
        print(out);
      } else {
        Json out = *r.reflect;
        out["dry_run"] = r.dry_run;
        print(out);
      }
    } else if (exp->parsed()) {
      write_file(export_out, engine.export_space(g.space));
    } else if (imp->parsed()) {
      const std::string id = engine.import_space(read_file(import_file));
      print({{"space", id}, {"units", engine.stats(id).units}});
    } else if (purge->parsed()) {
      if (!confirm) {
        std::cerr << "engram: purge refused: pass --confirm to delete soft-deleted units permanently\n";
        return 1;
      }
      print({{"space", g.space}, {"purged", engine.purge(g.space, true)}});
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "engram: " << error_code_name(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "engram: " << e.what() << "\n";
    return 1;
  }
}
