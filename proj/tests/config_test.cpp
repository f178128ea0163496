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
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "engram/config.hpp"
#include "test_util.hpp"

using namespace engram;
using engram::testing::error_code_of;

TEST_CASE("an empty config yields the defaults") {
  const EngineConfig c = parse_config("");
  CHECK(c.activation.decay == 0.5);
  CHECK(c.activation.forget_threshold == 0.35);
  CHECK(c.retrieval.weights.w_sim == 0.55);
  CHECK(c.retrieval.default_k == 5);
  CHECK(c.graph.is_functional("warranty_period"));
  CHECK(c.envelope_ttl == kDay);
  CHECK(!c.annotate.http);
}

TEST_CASE("sections override defaults; comments and quotes are accepted") {
  const EngineConfig c = parse_config(R"(
# activation
[activation]
decay = 0.4
forget_threshold = 0.3
; retrieval
[retrieval]
w_sim = 0.7
w_act = 0.1
default_k = 8
[graph]
functional_relations = "lives_in, price"
[annotate]
http_endpoint = "localhost:9000/anchors"
http_fallback = false
[service]
port = 9191
data_dir = "/tmp/x"
)");
  CHECK(c.activation.decay == 0.4);
  CHECK(c.retrieval.weights.w_sim == 0.7);
  CHECK(c.retrieval.default_k == 8);
  CHECK(c.graph.functional_relations == std::set<std::string>{"lives_in", "price"});
  REQUIRE(c.annotate.http);
  CHECK(c.annotate.http->host == "localhost");
  CHECK(c.annotate.http->port == 9000);
  CHECK(c.annotate.http->path == "/anchors");
  CHECK_FALSE(c.annotate.http->fallback_to_default);
  CHECK(c.service.port == 9191);
  CHECK(c.service.data_dir == "/tmp/x");
  // prune's outdated threshold follows the forgetting threshold
  CHECK(c.maintenance().prune.outdated_threshold == 0.3);
}

TEST_CASE("bad configs are rejected with ConfigInvalid") {
  for (const char* text : {
           "[activation]\ndecay = abc\n",
           "[activation]\nunknown = 1\n",
           "[nope]\nx = 1\n",
           "[retrieval]\nw_sim = 0.9\n",  // weights no longer sum to 1
           "[retrieval]\ndefault_k = 0\n",
           "[prune]\ndup_threshold = 1.5\n",
           "[service]\nport = 70000\n",
           "[forget]\nweaken_interval_seconds = 0\n",
           "[annotate]\nhttp_endpoint = nohost\n",
           "[activation\n",
       }) {
    CHECK_MESSAGE(error_code_of([&] { parse_config(text); }) == ErrorCode::kConfigInvalid, text);
  }
  CHECK(error_code_of([] { load_config("/nonexistent/engram.ini"); }) == ErrorCode::kConfigInvalid);
}

TEST_CASE("render_config round-trips") {
  EngineConfig c;
  c.activation.lambda = 2.5;
  c.retrieval.weights = {0.4, 0.3, 0.2, 0.1, 0.25, 3};
  c.reflect.node_merge_threshold = 0.0;
  c.annotate.http = HttpAnnotatorAdapter::Options{};
  c.service.data_dir = "/var/lib/engram";
  const EngineConfig back = parse_config(render_config(c));
  CHECK(render_config(back) == render_config(c));
  CHECK(back.activation.lambda == 2.5);
  CHECK(back.retrieval.weights.max_hops == 3);
}

TEST_CASE("environment overrides the config path and port") {
  namespace fs = std::filesystem;
  const fs::path path = fs::temp_directory_path() / "engram_config_test.ini";
  {
    std::ofstream out(path);
    out << "[service]\nport = 7000\n[activation]\nlambda = 3\n";
  }
  ::setenv("ENGRAM_CONFIG", path.c_str(), 1);
  ::setenv("ENGRAM_PORT", "7100", 1);
  const EngineConfig c = load_config_from_env();
  CHECK(c.activation.lambda == 3.0);
  CHECK(c.service.port == 7100);
  ::setenv("ENGRAM_PORT", "x", 1);
  CHECK(error_code_of([] { load_config_from_env(); }) == ErrorCode::kConfigInvalid);
  ::unsetenv("ENGRAM_CONFIG");
  ::unsetenv("ENGRAM_PORT");
  CHECK(load_config_from_env().service.port == 8080);
  fs::remove(path);
}
