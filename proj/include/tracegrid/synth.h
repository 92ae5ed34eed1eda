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

// Deterministic synthetic span workload with fault injection.
//
// Each minute, every edge deployed in a data center emits a Poisson number
// of spans at its configured rate. Durations are log-normal around the edge
// median. Return codes come from the edge's baseline distribution and are
// then overridden by whichever faults cover the span.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tracegrid/telemetry.h"

namespace tracegrid::synth {

inline constexpr int64_t kBatchMs = 60'000;

enum class FaultKind {
  kRateLimit429,   // call answered "429" with probability = magnitude
  kServerError5xx, // call answered "500" with probability = magnitude
  kLatencyDegrade, // latency median replaced by magnitude (ms)
  kNonHttpCode,    // call answered "-1" with probability = magnitude
  kLowTraffic,     // edge rate multiplied by magnitude
};

std::string_view FaultKindName(FaultKind kind);
std::optional<FaultKind> ParseFaultKind(std::string_view name);

struct Deployment {
  std::string data_center;
  std::string microservice;
};

struct Edge {
  std::string caller;
  std::string callee;
  double rate_per_min = 0;  // per data center
  double median_ms = 50;
  double sigma = 0.5;
  // Baseline return-code distribution; weights need not sum to one.
  std::map<std::string, double> codes{{"200", 1.0}};
};

struct Fault {
  FaultKind kind = FaultKind::kRateLimit429;
  std::string service;                     // callee the fault applies to
  std::optional<std::string> caller;       // restrict to one edge
  std::optional<std::string> data_center;  // restrict to one data center
  double magnitude = 0;
  int64_t start_offset_ms = 0;              // relative to scenario start
  std::optional<int64_t> end_offset_ms;     // default: scenario end
};

struct ScenarioSpec {
  uint64_t seed = 1;
  int64_t start_ms = 0;  // aligned to kBatchMs
  int64_t duration_ms = 0;
  std::string instance_tag_key{kDefaultInstanceTagKey};
  std::vector<Deployment> deployments;
  std::vector<Edge> edges;
  std::vector<Fault> faults;

  // Throws ErrorKind::kInvalidSpec.
  void Validate() const;
  // Data centers in first-appearance order.
  std::vector<std::string> DataCenters() const;
  bool Deployed(std::string_view data_center, std::string_view service) const;
};

struct MinuteBatch {
  int64_t minute_start_ms = 0;
  std::vector<TraceSpan> spans;  // ordered by start time, then span id
};

// Calls `sink` once per minute, in time order. Same spec, same output.
void Generate(const ScenarioSpec& spec, const std::function<void(MinuteBatch&&)>& sink);
std::vector<MinuteBatch> GenerateAll(const ScenarioSpec& spec);

// One Zipkin JSON array per line, one line per minute.
void WriteBatches(const ScenarioSpec& spec, std::ostream& out);

ScenarioSpec ScenarioFromJson(std::string_view text);
std::string ScenarioToJson(const ScenarioSpec& spec);

// Bundled scenarios. The demo has three data centers and twelve services
// with one instance of every fault kind; the others isolate one fault each.
ScenarioSpec DemoScenario(int64_t start_ms, double hours, uint64_t seed = 7);
ScenarioSpec RateLimitScenario(int64_t start_ms, double hours, uint64_t seed = 429);
ScenarioSpec DeadServiceScenario(int64_t start_ms, double hours, uint64_t seed = 500);
ScenarioSpec SlowDatabaseScenario(int64_t start_ms, double hours, uint64_t seed = 2500);
ScenarioSpec NonHttpScenario(int64_t start_ms, double hours, uint64_t seed = 1);

std::vector<std::string> NamedScenarios();
std::optional<ScenarioSpec> NamedScenario(std::string_view name, int64_t start_ms, double hours,
                                          std::optional<uint64_t> seed = std::nullopt);

}  // namespace tracegrid::synth
