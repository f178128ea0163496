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

#include <httplib.h>

#include "engram/annotate.hpp"
#include "engram/error.hpp"
#include "engram/json_io.hpp"

namespace engram {

HttpAnnotatorAdapter::HttpAnnotatorAdapter(Options options, const Annotator& fallback)
    : options_(std::move(options)), fallback_(fallback) {}

SemanticAnchorSet HttpAnnotatorAdapter::annotate(std::string_view utterance,
                                                 const std::vector<std::string>& context) const {
  auto fail = [&](const std::string& why) -> SemanticAnchorSet {
    if (options_.fallback_to_default) return fallback_.annotate(utterance, context);
    throw Error(ErrorCode::kIo, "annotation service: " + why);
  };
  httplib::Client client(options_.host, options_.port);
  const auto secs = options_.timeout_ms / 1000;
  const auto usecs = (options_.timeout_ms % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  const Json body{{"utterance", std::string(utterance)}, {"context", context}};
  auto res = client.Post(options_.path, body.dump(), "application/json");
  if (!res) return fail(httplib::to_string(res.error()));
  if (res->status != 200) return fail("status " + std::to_string(res->status));
  try {
    return Json::parse(res->body).get<SemanticAnchorSet>();
  } catch (const std::exception& e) {
    return fail(std::string("malformed response: ") + e.what());
  }
}

}  // namespace engram
