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

#pragma once

// HTTP front end:
//
//   POST /api/v1/spans      Zipkin v2 JSON array -> {accepted, skipped, dropped_late}
//   POST /api/v1/tick?now=  manual clock only; seals closed intervals
//   GET  /api/v1/heatmap    view, metric, codes, mode, lo, hi, from, to, step
//   GET  /api/v1/catalog    from, to
//   GET  /api/v1/status
//   GET  /                  static UI assets when configured

#include <memory>
#include <string>

#include "tracegrid/service.h"

namespace tracegrid {

class HttpApiServer {
 public:
  explicit HttpApiServer(TelemetryService& service);
  ~HttpApiServer();

  HttpApiServer(const HttpApiServer&) = delete;
  HttpApiServer& operator=(const HttpApiServer&) = delete;

  // Returns the bound port, or -1. Port 0 picks a free one.
  int Bind(const std::string& host, int port);
  // Blocks until Stop().
  bool ListenAfterBind();
  void Stop();
  bool is_running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Minimal blocking client for the API above; used by `replay --target` and
// by the integration tests.
class HttpApiClient {
 public:
  HttpApiClient(const std::string& host, int port);
  ~HttpApiClient();

  struct Response {
    int status = 0;
    std::string body;
  };

  Response Get(const std::string& path_and_query);
  Response Post(const std::string& path_and_query, const std::string& body);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tracegrid
