// Copyright 2026 The TraceGrid Authors
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

#include "tracegrid/http_server.h"

#include "httplib.h"
#include "json.hpp"
#include "tracegrid/api_json.h"
#include "tracegrid/error.h"

namespace tracegrid {

namespace {

constexpr const char* kJson = "application/json";
constexpr size_t kMaxPayloadBytes = 256u << 20;

constexpr const char* kFallbackIndex = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>tracegrid</title></head>
<body>
<h1>tracegrid</h1>
<p>No UI assets configured (start with <code>--ui-dir</code>). API endpoints:</p>
<ul>
<li><code>POST /api/v1/spans</code></li>
<li><code>GET /api/v1/heatmap?view=&amp;metric=&amp;codes=&amp;mode=&amp;lo=&amp;hi=&amp;from=&amp;to=&amp;step=</code></li>
<li><code>GET /api/v1/catalog?from=&amp;to=</code></li>
<li><code>GET /api/v1/status</code></li>
</ul>
</body></html>
)";

int StatusFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kMalformedPayload:
    case ErrorKind::kInvalidSpec:
    case ErrorKind::kMisalignedPlan:
      return 400;
    case ErrorKind::kStorageFailure:
      return 503;
    default:
      return 500;
  }
}

template <typename Handler>
void Guarded(httplib::Response& res, Handler&& handler) {
  try {
    handler();
  } catch (const Error& e) {
    res.status = StatusFor(e.kind());
    res.set_content(EncodeError(ErrorKindName(e.kind()), e.detail()), kJson);
  } catch (const std::exception& e) {
    res.status = 500;
    res.set_content(EncodeError("Internal", e.what()), kJson);
  }
}

ParamLookup LookupFor(const httplib::Request& req) {
  return [&req](std::string_view name) -> std::optional<std::string> {
    const std::string key(name);
    if (!req.has_param(key)) return std::nullopt;
    return req.get_param_value(key);
  };
}

int64_t RequiredInt(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) throw Error(ErrorKind::kInvalidSpec, std::string(name) + ": required");
  const std::string text = req.get_param_value(name);
  try {
    size_t used = 0;
    const int64_t v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::kInvalidSpec, std::string(name) + ": expected an integer");
  }
}

}  // namespace

struct HttpApiServer::Impl {
  explicit Impl(TelemetryService& s) : service(s) {}

  void Routes() {
    server.set_payload_max_length(kMaxPayloadBytes);

    server.Post("/api/v1/spans", [this](const httplib::Request& req, httplib::Response& res) {
      Guarded(res, [&] { res.set_content(EncodeIngestSummary(service.Ingest(req.body)), kJson); });
    });

    server.Post("/api/v1/tick", [this](const httplib::Request& req, httplib::Response& res) {
      Guarded(res, [&] {
        if (service.config().clock_mode != ClockMode::kManual) {
          res.status = 409;
          res.set_content(EncodeError("Conflict", "tick is only available with --clock manual"),
                          kJson);
          return;
        }
        const auto sealed = service.SealTick(RequiredInt(req, "now"));
        nlohmann::json starts = nlohmann::json::array();
        for (const auto& s : sealed) starts.push_back(s.interval_start);
        res.set_content(nlohmann::json{{"sealed", starts}}.dump(), kJson);
      });
    });

    server.Get("/api/v1/heatmap", [this](const httplib::Request& req, httplib::Response& res) {
      Guarded(res, [&] {
        const QuerySpec spec = DecodeQuerySpec(LookupFor(req), service.config().base_interval_ms);
        res.set_content(EncodeFrameSet(service.Heatmap(spec)), kJson);
      });
    });

    server.Get("/api/v1/catalog", [this](const httplib::Request& req, httplib::Response& res) {
      Guarded(res, [&] {
        const int64_t from = RequiredInt(req, "from");
        const int64_t to = RequiredInt(req, "to");
        if (from >= to) throw Error(ErrorKind::kInvalidSpec, "from: must precede to");
        res.set_content(EncodeCatalog(service.CatalogFor(from, to)), kJson);
      });
    });

    server.Get("/api/v1/status", [this](const httplib::Request&, httplib::Response& res) {
      Guarded(res, [&] {
        const auto totals = service.totals();
        const auto files = service.store().Files();
        nlohmann::json doc = {
            {"accepted", totals.accepted},
            {"skipped", totals.skipped},
            {"dropped_late", totals.dropped_late},
            {"buffered", service.buffered_spans()},
            {"interval_ms", service.config().base_interval_ms},
            {"clock", ClockModeName(service.config().clock_mode)},
            {"storage_failing", service.storage_failing()},
            {"files", files.size()},
            {"warnings", service.store().Warnings()},
        };
        if (!files.empty()) {
          doc["first_ts"] = files.front().first_ts;
          doc["last_ts"] = files.back().last_ts;
        }
        if (const auto open = service.open_from()) doc["open_from"] = *open;
        res.set_content(doc.dump(), kJson);
      });
    });

    const auto& ui_dir = service.config().ui_dir;
    if (ui_dir.empty() || !server.set_mount_point("/", ui_dir)) {
      server.Get("/", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(kFallbackIndex, "text/html; charset=utf-8");
      });
    }
  }

  TelemetryService& service;
  httplib::Server server;
};

HttpApiServer::HttpApiServer(TelemetryService& service) : impl_(std::make_unique<Impl>(service)) {
  impl_->Routes();
}

HttpApiServer::~HttpApiServer() { Stop(); }

int HttpApiServer::Bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpApiServer::ListenAfterBind() { return impl_->server.listen_after_bind(); }

void HttpApiServer::Stop() {
  if (impl_) impl_->server.stop();
}

bool HttpApiServer::is_running() const { return impl_->server.is_running(); }

struct HttpApiClient::Impl {
  Impl(const std::string& host, int port) : client(host, port) {
    client.set_read_timeout(120, 0);
    client.set_write_timeout(120, 0);
  }
  httplib::Client client;
};

HttpApiClient::HttpApiClient(const std::string& host, int port)
    : impl_(std::make_unique<Impl>(host, port)) {}

HttpApiClient::~HttpApiClient() = default;

HttpApiClient::Response HttpApiClient::Get(const std::string& path_and_query) {
  auto res = impl_->client.Get(path_and_query);
  if (!res) throw Error(ErrorKind::kStorageFailure, "GET " + path_and_query + ": " + httplib::to_string(res.error()));
  return {res->status, res->body};
}

HttpApiClient::Response HttpApiClient::Post(const std::string& path_and_query,
                                            const std::string& body) {
  auto res = impl_->client.Post(path_and_query, body, kJson);
  if (!res) throw Error(ErrorKind::kStorageFailure, "POST " + path_and_query + ": " + httplib::to_string(res.error()));
  return {res->status, res->body};
}

}  // namespace tracegrid
