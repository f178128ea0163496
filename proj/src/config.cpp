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
#include "engram/config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "engram/error.hpp"

namespace engram {
namespace {

namespace pt = boost::property_tree;

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::kConfigInvalid, what); }

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"activation", {"decay", "lambda", "offset", "forget_threshold", "time_unit_seconds"}},
      {"retrieval",
       {"w_sim", "w_act", "w_pref", "w_emo", "hop_decay", "max_hops", "score_floor", "default_k"}},
      {"prune", {"dup_threshold"}},
      {"forget", {"grace_seconds", "weaken_interval_seconds", "compress_emotion"}},
      {"reflect", {"ambiguity_window_seconds", "reinforce_delta", "strength_cap", "node_merge_threshold"}},
      {"graph", {"functional_relations", "fail_below", "weaken_ceiling", "context_window", "embedding_dim"}},
      {"annotate",
       {"gazetteer", "lexicon", "acknowledgments", "http_endpoint", "http_timeout_ms", "http_fallback"}},
      {"hub", {"envelope_ttl_seconds"}},
      {"service", {"host", "port", "data_dir", "threads"}},
  };
  return keys;
}

// Section/key -> raw value, quotes stripped.
class Values {
 public:
  explicit Values(const pt::ptree& tree) {
    for (const auto& [section, body] : tree) {
      auto known = known_keys().find(section);
      if (!body.data().empty()) invalid("key \"" + section + "\" outside any section");
      if (known == known_keys().end()) invalid("unknown section [" + section + "]");
      for (const auto& [key, value] : body) {
        if (!known->second.count(key)) invalid("unknown key " + section + "." + key);
        std::string v = boost::trim_copy(value.data());
        if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
        values_[section + "." + key] = v;
      }
    }
  }

  const std::string* raw(const std::string& key) const {
    auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
  }

  void real(const std::string& key, double& out) const {
    if (const auto* v = raw(key)) {
      double x = 0.0;
      auto [end, ec] = std::from_chars(v->data(), v->data() + v->size(), x);
      if (ec != std::errc() || end != v->data() + v->size()) invalid(key + ": not a number: " + *v);
      out = x;
    }
  }

  template <typename Int>
  void integer(const std::string& key, Int& out) const {
    if (const auto* v = raw(key)) {
      long long x = 0;
      auto [end, ec] = std::from_chars(v->data(), v->data() + v->size(), x);
      if (ec != std::errc() || end != v->data() + v->size()) invalid(key + ": not an integer: " + *v);
      if constexpr (std::is_unsigned_v<Int>) {
        if (x < 0) invalid(key + " must be non-negative");
      }
      out = static_cast<Int>(x);
    }
  }

  void boolean(const std::string& key, bool& out) const {
    if (const auto* v = raw(key)) {
      const std::string s = boost::to_lower_copy(*v);
      if (s == "true" || s == "1" || s == "yes") out = true;
      else if (s == "false" || s == "0" || s == "no") out = false;
      else invalid(key + ": not a boolean: " + *v);
    }
  }

  void text(const std::string& key, std::string& out) const {
    if (const auto* v = raw(key)) out = *v;
  }

 private:
  std::map<std::string, std::string> values_;
};

// "host:port/path" -> adapter options.
HttpAnnotatorAdapter::Options parse_endpoint(const std::string& s) {
  HttpAnnotatorAdapter::Options o;
  std::string rest = s;
  if (rest.starts_with("http://")) rest = rest.substr(7);
  const auto slash = rest.find('/');
  if (slash != std::string::npos) {
    o.path = rest.substr(slash);
    rest = rest.substr(0, slash);
  }
  const auto colon = rest.rfind(':');
  if (colon == std::string::npos || colon == 0) invalid("annotate.http_endpoint must be host:port[/path]");
  o.host = rest.substr(0, colon);
  const std::string port = rest.substr(colon + 1);
  auto [end, ec] = std::from_chars(port.data(), port.data() + port.size(), o.port);
  if (ec != std::errc() || end != port.data() + port.size()) invalid("annotate.http_endpoint: bad port");
  return o;
}

std::string num(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

}  // namespace

MaintenanceSettings EngineConfig::maintenance() const {
  MaintenanceSettings m;
  m.activation = activation;
  m.prune = prune;
  m.prune.outdated_threshold = activation.forget_threshold;
  m.forget = forget;
  m.reflect = reflect;
  return m;
}

void EngineConfig::validate() const {
  try {
    activation.validate();
    retrieval.weights.validate();
  } catch (const Error& e) {
    invalid(e.what());
  }
  auto unit_interval = [](double x, const char* what) {
    if (!(x > 0.0 && x <= 1.0)) invalid(std::string(what) + " must lie in (0, 1]");
  };
  unit_interval(prune.dup_threshold, "prune.dup_threshold");
  unit_interval(graph.weaken_ceiling, "graph.weaken_ceiling");
  unit_interval(graph.fail_below, "graph.fail_below");
  if (reflect.node_merge_threshold < 0.0 || reflect.node_merge_threshold > 1.0) {
    invalid("reflect.node_merge_threshold must lie in [0, 1]");
  }
  if (!(retrieval.score_floor >= 0.0)) invalid("retrieval.score_floor must be non-negative");
  if (retrieval.default_k == 0) invalid("retrieval.default_k must be at least 1");
  if (forget.grace < 0) invalid("forget.grace_seconds must be non-negative");
  if (forget.weaken_interval <= 0) invalid("forget.weaken_interval_seconds must be positive");
  if (reflect.ambiguity_window < 0) invalid("reflect.ambiguity_window_seconds must be non-negative");
  if (!(reflect.reinforce_delta >= 0.0)) invalid("reflect.reinforce_delta must be non-negative");
  if (!(reflect.strength_cap >= 1.0)) invalid("reflect.strength_cap must be at least 1");
  if (graph.embedding_dim == 0) invalid("graph.embedding_dim must be positive");
  if (envelope_ttl <= 0) invalid("hub.envelope_ttl_seconds must be positive");
  if (service.port < 0 || service.port > 65535) invalid("service.port out of range");
  if (service.threads < 1) invalid("service.threads must be at least 1");
}

EngineConfig parse_config(std::string_view text) {
  // Boost's INI reader only knows ';' comments.
  std::string cleaned;
  std::istringstream lines{std::string(text)};
  for (std::string line; std::getline(lines, line);) {
    if (boost::trim_copy(line).starts_with('#')) continue;
    cleaned += line + "\n";
  }
  pt::ptree tree;
  try {
    std::istringstream in(cleaned);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    invalid(std::string("config: ") + e.message() + " at line " + std::to_string(e.line()));
  }

  const Values v(tree);
  EngineConfig c;
  v.real("activation.decay", c.activation.decay);
  v.real("activation.lambda", c.activation.lambda);
  v.real("activation.offset", c.activation.offset);
  v.real("activation.forget_threshold", c.activation.forget_threshold);
  v.real("activation.time_unit_seconds", c.activation.time_unit_seconds);

  v.real("retrieval.w_sim", c.retrieval.weights.w_sim);
  v.real("retrieval.w_act", c.retrieval.weights.w_act);
  v.real("retrieval.w_pref", c.retrieval.weights.w_pref);
  v.real("retrieval.w_emo", c.retrieval.weights.w_emo);
  v.real("retrieval.hop_decay", c.retrieval.weights.hop_decay);
  v.integer("retrieval.max_hops", c.retrieval.weights.max_hops);
  v.real("retrieval.score_floor", c.retrieval.score_floor);
  v.integer("retrieval.default_k", c.retrieval.default_k);

  v.real("prune.dup_threshold", c.prune.dup_threshold);

  v.integer("forget.grace_seconds", c.forget.grace);
  v.integer("forget.weaken_interval_seconds", c.forget.weaken_interval);
  v.real("forget.compress_emotion", c.forget.compress_emotion);

  v.integer("reflect.ambiguity_window_seconds", c.reflect.ambiguity_window);
  v.real("reflect.reinforce_delta", c.reflect.reinforce_delta);
  v.real("reflect.strength_cap", c.reflect.strength_cap);
  v.real("reflect.node_merge_threshold", c.reflect.node_merge_threshold);

  if (const auto* rels = v.raw("graph.functional_relations")) {
    std::vector<std::string> parts;
    boost::split(parts, *rels, boost::is_any_of(","));
    c.graph.functional_relations.clear();
    for (auto& p : parts) {
      boost::trim(p);
      if (!p.empty()) c.graph.functional_relations.insert(p);
    }
  }
  v.real("graph.fail_below", c.graph.fail_below);
  v.real("graph.weaken_ceiling", c.graph.weaken_ceiling);
  v.integer("graph.context_window", c.graph.context_window);
  v.integer("graph.embedding_dim", c.graph.embedding_dim);

  v.text("annotate.gazetteer", c.annotate.gazetteer);
  v.text("annotate.lexicon", c.annotate.lexicon);
  v.text("annotate.acknowledgments", c.annotate.acknowledgments);
  if (const auto* ep = v.raw("annotate.http_endpoint"); ep && !ep->empty()) {
    c.annotate.http = parse_endpoint(*ep);
    v.integer("annotate.http_timeout_ms", c.annotate.http->timeout_ms);
    v.boolean("annotate.http_fallback", c.annotate.http->fallback_to_default);
  }

  v.integer("hub.envelope_ttl_seconds", c.envelope_ttl);

  v.text("service.host", c.service.host);
  v.integer("service.port", c.service.port);
  if (const auto* dir = v.raw("service.data_dir")) c.service.data_dir = *dir;
  v.integer("service.threads", c.service.threads);

  c.validate();
  return c;
}

EngineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) invalid("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

EngineConfig load_config_from_env(const std::optional<std::filesystem::path>& fallback) {
  EngineConfig c;
  if (const char* p = std::getenv("ENGRAM_CONFIG"); p && *p) {
    c = load_config(p);
  } else if (fallback) {
    c = load_config(*fallback);
  }
  if (const char* port = std::getenv("ENGRAM_PORT"); port && *port) {
    const std::string s(port);
    int value = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || end != s.data() + s.size()) invalid("ENGRAM_PORT is not a number: " + s);
    c.service.port = value;
    c.validate();
  }
  return c;
}

std::string render_config(const EngineConfig& c) {
  std::ostringstream o;
  o << "[activation]\n"
    << "decay = " << num(c.activation.decay) << "\n"
    << "lambda = " << num(c.activation.lambda) << "\n"
    << "offset = " << num(c.activation.offset) << "\n"
    << "forget_threshold = " << num(c.activation.forget_threshold) << "\n"
    << "time_unit_seconds = " << num(c.activation.time_unit_seconds) << "\n\n";
  const auto& w = c.retrieval.weights;
  o << "[retrieval]\n"
    << "w_sim = " << num(w.w_sim) << "\n"
    << "w_act = " << num(w.w_act) << "\n"
    << "w_pref = " << num(w.w_pref) << "\n"
    << "w_emo = " << num(w.w_emo) << "\n"
    << "hop_decay = " << num(w.hop_decay) << "\n"
    << "max_hops = " << w.max_hops << "\n"
    << "score_floor = " << num(c.retrieval.score_floor) << "\n"
    << "default_k = " << c.retrieval.default_k << "\n\n";
  o << "[prune]\n"
    << "dup_threshold = " << num(c.prune.dup_threshold) << "\n\n";
  o << "[forget]\n"
    << "grace_seconds = " << c.forget.grace << "\n"
    << "weaken_interval_seconds = " << c.forget.weaken_interval << "\n"
    << "compress_emotion = " << num(c.forget.compress_emotion) << "\n\n";
  o << "[reflect]\n"
    << "ambiguity_window_seconds = " << c.reflect.ambiguity_window << "\n"
    << "reinforce_delta = " << num(c.reflect.reinforce_delta) << "\n"
    << "strength_cap = " << num(c.reflect.strength_cap) << "\n"
    << "node_merge_threshold = " << num(c.reflect.node_merge_threshold) << "\n\n";
  o << "[graph]\n"
    << "functional_relations = " << quoted(boost::join(c.graph.functional_relations, ",")) << "\n"
    << "fail_below = " << num(c.graph.fail_below) << "\n"
    << "weaken_ceiling = " << num(c.graph.weaken_ceiling) << "\n"
    << "context_window = " << c.graph.context_window << "\n"
    << "embedding_dim = " << c.graph.embedding_dim << "\n\n";
  o << "[annotate]\n"
    << "gazetteer = " << quoted(c.annotate.gazetteer) << "\n"
    << "lexicon = " << quoted(c.annotate.lexicon) << "\n"
    << "acknowledgments = " << quoted(c.annotate.acknowledgments) << "\n";
  if (c.annotate.http) {
    const auto& h = *c.annotate.http;
    o << "http_endpoint = " << quoted(h.host + ":" + std::to_string(h.port) + h.path) << "\n"
      << "http_timeout_ms = " << h.timeout_ms << "\n"
      << "http_fallback = " << (h.fallback_to_default ? "true" : "false") << "\n";
  }
  o << "\n[hub]\n"
    << "envelope_ttl_seconds = " << c.envelope_ttl << "\n\n";
  o << "[service]\n"
    << "host = " << quoted(c.service.host) << "\n"
    << "port = " << c.service.port << "\n"
    << "data_dir = " << quoted(c.service.data_dir.string()) << "\n"
    << "threads = " << c.service.threads << "\n";
  return o.str();
}

}  // namespace engram
