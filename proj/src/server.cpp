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
#include "engram/server.hpp"

#include <spdlog/spdlog.h>

#include <atomic>
#include <chrono>

#include "engram/api_json.hpp"
#include "engram/error.hpp"
#include "httplib.h"

namespace engram {
namespace {

constexpr const char* kJson = "application/json";
constexpr const char* kSpace = "/spaces/([A-Za-z0-9._-]+)";

void reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void reply_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  reply(res, status, Json{{"code", code}, {"message", message}});
}

Json body_of(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  return Json::parse(req.body);
}

// Runs a handler, translating engine and JSON failures into error bodies.
template <typename F>
httplib::Server::Handler guarded(F fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      reply_error(res, http_status(e.code()), error_code_name(e.code()), e.what());
    } catch (const Json::exception& e) {
      reply_error(res, 400, "InvalidArgument", std::string("bad request body: ") + e.what());
    } catch (const std::exception& e) {
      reply_error(res, 500, "Internal", e.what());
    }
  };
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kEmptyText:
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kZeroVector:
    case ErrorCode::kEmptyHistory:
    case ErrorCode::kClockSkew:
    case ErrorCode::kEmptyUtterance:
    case ErrorCode::kEmptySelection:
    case ErrorCode::kNotSoftDeleted:
    case ErrorCode::kNoAgents:
    case ErrorCode::kConfigInvalid:
    case ErrorCode::kCorruptSnapshot:
    case ErrorCode::kVersionUnsupported:
      return 400;
    case ErrorCode::kPermissionDenied:
      return 403;
    case ErrorCode::kSpaceUnknown:
    case ErrorCode::kUnknownUnit:
    case ErrorCode::kUnknownNode:
    case ErrorCode::kUnknownAgent:
      return 404;
    case ErrorCode::kDuplicateAgent:
    case ErrorCode::kStaleVerdicts:
      return 409;
    case ErrorCode::kExpired:
      return 410;
    case ErrorCode::kBindFailure:
    case ErrorCode::kIo:
      return 500;
  }
  return 500;
}

struct HttpService::Impl {
  MemoryEngine& engine;
  httplib::Server server;
  std::atomic<bool> listening{false};

  explicit Impl(MemoryEngine& e) : engine(e) {
    const int threads = engine.config().service.threads;
    server.new_task_queue = [threads] { return new httplib::ThreadPool(static_cast<std::size_t>(threads)); };
    server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
      if (!res.body.empty()) return;
      if (res.status == 404) reply_error(res, 404, "NotFound", "no route for " + req.method + " " + req.path);
      else reply_error(res, res.status, "HttpError", httplib::status_message(res.status));
    });
    server.set_logger([](const httplib::Request& req, const httplib::Response& res) {
      spdlog::info("{} {} -> {}", req.method, req.path, res.status);
    });
    routes();
  }

  void routes() {
    const std::string space = kSpace;
    server.Post(space + "/ingest", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto r = engine.ingest(req.matches[1], body_of(req).get<IngestRequest>());
      reply(res, 200, r);
    }));
    server.Post(space + "/query", guarded([this](const httplib::Request& req, httplib::Response& res) {
      reply(res, 200, engine.query(req.matches[1], body_of(req).get<QueryRequest>()));
    }));
    server.Post(space + "/maintain", guarded([this](const httplib::Request& req, httplib::Response& res) {
      reply(res, 200, engine.maintain(req.matches[1], body_of(req).get<MaintainRequest>()));
    }));
    server.Get(space + "/stats", guarded([this](const httplib::Request& req, httplib::Response& res) {
      reply(res, 200, engine.stats(req.matches[1]));
    }));
    server.Get(space + "/export", guarded([this](const httplib::Request& req, httplib::Response& res) {
      res.set_content(engine.export_space(req.matches[1]), "application/x-ndjson");
    }));
    server.Post("/hub/agents", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto profile = body_of(req).get<AgentProfile>();
      engine.register_agent(profile);
      reply(res, 201, profile);
    }));
    server.Get("/hub/agents", guarded([this](const httplib::Request&, httplib::Response& res) {
      reply(res, 200, Json{{"agents", engine.agents()}});
    }));
    server.Post("/hub/route", guarded([this](const httplib::Request& req, httplib::Response& res) {
      reply(res, 200, Json{{"agent_id", engine.route(body_of(req).at("tags").get<TagSet>())}});
    }));
    server.Post("/hub/share", guarded([this](const httplib::Request& req, httplib::Response& res) {
      reply(res, 200, engine.share(body_of(req).get<ShareRequest>()));
    }));
    server.Post("/hub/apply", guarded([this](const httplib::Request& req, httplib::Response& res) {
      reply(res, 200, engine.apply(body_of(req).get<ApplyRequest>()));
    }));
    server.Get("/healthz", guarded([this](const httplib::Request&, httplib::Response& res) {
      reply(res, 200, Json{{"status", "ok"}, {"generation", engine.generation()}, {"spaces", engine.spaces().size()}});
    }));
  }
};

HttpService::HttpService(MemoryEngine& engine) : impl_(std::make_unique<Impl>(engine)) {}

HttpService::~HttpService() { stop(); }

int HttpService::bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) throw Error(ErrorCode::kBindFailure, "cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void HttpService::listen() {
  impl_->listening = true;
  impl_->server.listen_after_bind();
  impl_->listening = false;
}

void HttpService::stop() {
  if (impl_) impl_->server.stop();
}

bool HttpService::running() const { return impl_->server.is_running(); }

}  // namespace engram
