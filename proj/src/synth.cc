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

#include "tracegrid/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <set>

#include "json.hpp"
#include "tracegrid/error.h"

namespace tracegrid::synth {

using nlohmann::json;

std::string_view FaultKindName(FaultKind kind) {
  switch (kind) {
    case FaultKind::kRateLimit429: return "RATE_LIMIT_429";
    case FaultKind::kServerError5xx: return "SERVER_ERROR_5XX";
    case FaultKind::kLatencyDegrade: return "LATENCY_DEGRADE";
    case FaultKind::kNonHttpCode: return "NON_HTTP_CODE";
    case FaultKind::kLowTraffic: return "LOW_TRAFFIC";
  }
  return "RATE_LIMIT_429";
}

std::optional<FaultKind> ParseFaultKind(std::string_view name) {
  for (const auto k : {FaultKind::kRateLimit429, FaultKind::kServerError5xx,
                       FaultKind::kLatencyDegrade, FaultKind::kNonHttpCode,
                       FaultKind::kLowTraffic}) {
    if (FaultKindName(k) == name) return k;
  }
  return std::nullopt;
}

namespace {

[[noreturn]] void Invalid(const std::string& what) { throw Error(ErrorKind::kInvalidSpec, what); }

bool Covers(const Fault& f, const ScenarioSpec& spec, const Edge& edge, std::string_view dc,
            int64_t t_ms) {
  if (f.service != edge.callee) return false;
  if (f.caller && *f.caller != edge.caller) return false;
  if (f.data_center && *f.data_center != dc) return false;
  const int64_t begin = spec.start_ms + f.start_offset_ms;
  const int64_t end = spec.start_ms + f.end_offset_ms.value_or(spec.duration_ms);
  return t_ms >= begin && t_ms < end;
}

std::string Hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct CodeTable {
  std::vector<std::string> codes;
  std::discrete_distribution<size_t> pick;
};

CodeTable MakeCodeTable(const Edge& edge) {
  CodeTable t;
  std::vector<double> weights;
  for (const auto& [code, w] : edge.codes) {
    t.codes.push_back(code);
    weights.push_back(w);
  }
  t.pick = std::discrete_distribution<size_t>(weights.begin(), weights.end());
  return t;
}

}  // namespace

void ScenarioSpec::Validate() const {
  if (duration_ms <= 0) Invalid("duration_ms must be positive");
  if (start_ms % kBatchMs != 0) Invalid("start_ms must be aligned to whole minutes");
  if (deployments.empty()) Invalid("topology has no deployments");
  for (const auto& d : deployments) {
    if (d.data_center.empty() || d.microservice.empty()) Invalid("deployment with empty name");
  }
  for (const auto& e : edges) {
    const std::string name = e.caller + "->" + e.callee;
    if (e.caller.empty() || e.callee.empty()) Invalid("edge with empty endpoint");
    if (!(e.rate_per_min > 0)) Invalid("edge " + name + ": rate must be positive");
    if (!(e.median_ms > 0)) Invalid("edge " + name + ": median_ms must be positive");
    if (!(e.sigma >= 0)) Invalid("edge " + name + ": sigma must be non-negative");
    if (e.codes.empty()) Invalid("edge " + name + ": no return codes");
    double total = 0;
    for (const auto& [code, w] : e.codes) {
      if (code.empty() || !(w >= 0)) Invalid("edge " + name + ": bad return-code weight");
      total += w;
    }
    if (!(total > 0)) Invalid("edge " + name + ": return-code weights sum to zero");
  }
  for (const auto& f : faults) {
    const std::string name = std::string(FaultKindName(f.kind)) + " on " + f.service;
    if (f.service.empty()) Invalid("fault without target service");
    const bool probability = f.kind == FaultKind::kRateLimit429 ||
                             f.kind == FaultKind::kServerError5xx ||
                             f.kind == FaultKind::kNonHttpCode;
    if (probability && !(f.magnitude >= 0 && f.magnitude <= 1)) {
      Invalid(name + ": magnitude must be a probability");
    }
    if (!probability && !(f.magnitude > 0)) Invalid(name + ": magnitude must be positive");
    const int64_t end = f.end_offset_ms.value_or(duration_ms);
    if (f.start_offset_ms < 0 || end > duration_ms || f.start_offset_ms >= end) {
      Invalid(name + ": time range must lie within the scenario");
    }
  }
}

std::vector<std::string> ScenarioSpec::DataCenters() const {
  std::vector<std::string> out;
  for (const auto& d : deployments) {
    if (std::find(out.begin(), out.end(), d.data_center) == out.end()) out.push_back(d.data_center);
  }
  return out;
}

bool ScenarioSpec::Deployed(std::string_view data_center, std::string_view service) const {
  return std::any_of(deployments.begin(), deployments.end(), [&](const Deployment& d) {
    return d.data_center == data_center && d.microservice == service;
  });
}

void Generate(const ScenarioSpec& spec, const std::function<void(MinuteBatch&&)>& sink) {
  spec.Validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<CodeTable> code_tables;
  for (const auto& e : spec.edges) code_tables.push_back(MakeCodeTable(e));
  const auto data_centers = spec.DataCenters();

  for (int64_t offset = 0; offset < spec.duration_ms; offset += kBatchMs) {
    MinuteBatch batch;
    batch.minute_start_ms = spec.start_ms + offset;
    const int64_t minute_len = std::min(kBatchMs, spec.duration_ms - offset);
    const double fraction = static_cast<double>(minute_len) / static_cast<double>(kBatchMs);

    for (const auto& dc : data_centers) {
      for (size_t ei = 0; ei < spec.edges.size(); ++ei) {
        const Edge& edge = spec.edges[ei];
        if (!spec.Deployed(dc, edge.caller) || !spec.Deployed(dc, edge.callee)) continue;

        double rate = edge.rate_per_min * fraction;
        for (const auto& f : spec.faults) {
          if (f.kind == FaultKind::kLowTraffic && Covers(f, spec, edge, dc, batch.minute_start_ms)) {
            rate *= f.magnitude;
          }
        }
        int64_t n = 0;
        if (rate > 0) n = std::poisson_distribution<int64_t>(rate)(rng);

        std::uniform_int_distribution<int64_t> when(0, minute_len * 1000 - 1);
        for (int64_t i = 0; i < n; ++i) {
          TraceSpan span;
          span.trace_id = Hex64(rng()) + Hex64(rng());
          span.span_id = Hex64(rng());
          span.start_time_us = batch.minute_start_ms * 1000 + when(rng);
          span.caller_id = edge.caller;
          span.callee_id = edge.callee;
          span.app_instance_id = dc;
          span.return_code = code_tables[ei].codes[code_tables[ei].pick(rng)];

          const int64_t t_ms = span.start_time_ms();
          double median = edge.median_ms;
          for (const auto& f : spec.faults) {
            if (!Covers(f, spec, edge, dc, t_ms)) continue;
            switch (f.kind) {
              case FaultKind::kRateLimit429:
                if (unit(rng) < f.magnitude) span.return_code = "429";
                break;
              case FaultKind::kServerError5xx:
                if (unit(rng) < f.magnitude) span.return_code = "500";
                break;
              case FaultKind::kNonHttpCode:
                if (unit(rng) < f.magnitude) span.return_code = "-1";
                break;
              case FaultKind::kLatencyDegrade:
                median = f.magnitude;
                break;
              case FaultKind::kLowTraffic:
                break;
            }
          }
          double ms = median;
          if (edge.sigma > 0) ms = std::lognormal_distribution<double>(std::log(median), edge.sigma)(rng);
          span.duration_us = std::max<int64_t>(1, std::llround(ms * 1000.0));
          batch.spans.push_back(std::move(span));
        }
      }
    }
    std::sort(batch.spans.begin(), batch.spans.end(), [](const TraceSpan& a, const TraceSpan& b) {
      return a.start_time_us != b.start_time_us ? a.start_time_us < b.start_time_us
                                                : a.span_id < b.span_id;
    });
    sink(std::move(batch));
  }
}

std::vector<MinuteBatch> GenerateAll(const ScenarioSpec& spec) {
  std::vector<MinuteBatch> out;
  Generate(spec, [&](MinuteBatch&& b) { out.push_back(std::move(b)); });
  return out;
}

void WriteBatches(const ScenarioSpec& spec, std::ostream& out) {
  Generate(spec, [&](MinuteBatch&& b) {
    out << SpansToZipkinJson(b.spans, spec.instance_tag_key) << '\n';
  });
}

// ---------------------------------------------------------------------------
// JSON config

namespace {

template <typename T>
T Required(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) Invalid(where + ": missing \"" + key + "\"");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    Invalid(where + ": \"" + key + "\" has the wrong type");
  }
}

template <typename T>
T Optional(const json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return Required<T>(obj, key, where);
}

}  // namespace

ScenarioSpec ScenarioFromJson(std::string_view text) {
  const json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) Invalid("scenario config is not a JSON object");

  ScenarioSpec spec;
  spec.seed = Optional<uint64_t>(doc, "seed", 1, "scenario");
  spec.start_ms = Optional<int64_t>(doc, "start_ms", 0, "scenario");
  spec.duration_ms = Required<int64_t>(doc, "duration_ms", "scenario");
  spec.instance_tag_key =
      Optional<std::string>(doc, "instance_tag_key", std::string(kDefaultInstanceTagKey), "scenario");

  const auto topology = doc.find("topology");
  if (topology == doc.end() || !topology->is_object()) Invalid("scenario: missing \"topology\"");
  for (const auto& d : Required<json>(*topology, "deployments", "topology")) {
    spec.deployments.push_back({Required<std::string>(d, "data_center", "deployment"),
                                Required<std::string>(d, "microservice", "deployment")});
  }
  for (const auto& e : Required<json>(*topology, "edges", "topology")) {
    Edge edge;
    edge.caller = Required<std::string>(e, "caller", "edge");
    edge.callee = Required<std::string>(e, "callee", "edge");
    const std::string where = "edge " + edge.caller + "->" + edge.callee;
    edge.rate_per_min = Required<double>(e, "rate_per_min", where);
    if (const auto lat = e.find("latency"); lat != e.end()) {
      edge.median_ms = Required<double>(*lat, "median_ms", where);
      edge.sigma = Optional<double>(*lat, "sigma", edge.sigma, where);
    }
    if (e.contains("codes")) edge.codes = Required<std::map<std::string, double>>(e, "codes", where);
    spec.edges.push_back(std::move(edge));
  }
  if (const auto faults = doc.find("faults"); faults != doc.end()) {
    for (const auto& f : *faults) {
      Fault fault;
      const auto kind = Required<std::string>(f, "kind", "fault");
      const auto parsed = ParseFaultKind(kind);
      if (!parsed) Invalid("fault: unknown kind \"" + kind + "\"");
      fault.kind = *parsed;
      const auto target = f.find("target");
      if (target == f.end() || !target->is_object()) Invalid("fault: missing \"target\"");
      fault.service = Required<std::string>(*target, "service", "fault target");
      if (target->contains("caller")) fault.caller = Required<std::string>(*target, "caller", "fault target");
      if (target->contains("data_center")) {
        fault.data_center = Required<std::string>(*target, "data_center", "fault target");
      }
      fault.magnitude = Required<double>(f, "magnitude", "fault");
      fault.start_offset_ms = Optional<int64_t>(f, "start_offset_ms", 0, "fault");
      if (f.contains("end_offset_ms")) fault.end_offset_ms = Required<int64_t>(f, "end_offset_ms", "fault");
      spec.faults.push_back(std::move(fault));
    }
  }
  spec.Validate();
  return spec;
}

std::string ScenarioToJson(const ScenarioSpec& spec) {
  json deployments = json::array();
  for (const auto& d : spec.deployments) {
    deployments.push_back({{"data_center", d.data_center}, {"microservice", d.microservice}});
  }
  json edges = json::array();
  for (const auto& e : spec.edges) {
    edges.push_back({{"caller", e.caller},
                     {"callee", e.callee},
                     {"rate_per_min", e.rate_per_min},
                     {"latency", {{"median_ms", e.median_ms}, {"sigma", e.sigma}}},
                     {"codes", e.codes}});
  }
  json faults = json::array();
  for (const auto& f : spec.faults) {
    json target = {{"service", f.service}};
    if (f.caller) target["caller"] = *f.caller;
    if (f.data_center) target["data_center"] = *f.data_center;
    json fault = {{"kind", FaultKindName(f.kind)},
                  {"target", target},
                  {"magnitude", f.magnitude},
                  {"start_offset_ms", f.start_offset_ms}};
    if (f.end_offset_ms) fault["end_offset_ms"] = *f.end_offset_ms;
    faults.push_back(std::move(fault));
  }
  return json{{"seed", spec.seed},
              {"start_ms", spec.start_ms},
              {"duration_ms", spec.duration_ms},
              {"instance_tag_key", spec.instance_tag_key},
              {"topology", {{"deployments", deployments}, {"edges", edges}}},
              {"faults", faults}}
      .dump(2);
}

// ---------------------------------------------------------------------------
// Bundled scenarios

namespace {

int64_t HoursToMs(double hours) { return static_cast<int64_t>(std::llround(hours * 3'600'000.0)); }

void DeployEverywhere(ScenarioSpec& spec, const std::vector<std::string>& dcs,
                      const std::vector<std::string>& services) {
  for (const auto& dc : dcs) {
    for (const auto& s : services) spec.deployments.push_back({dc, s});
  }
}

Edge MakeEdge(std::string caller, std::string callee, double rate, double median_ms,
              double sigma = 0.5, std::map<std::string, double> codes = {{"200", 1.0}}) {
  Edge e;
  e.caller = std::move(caller);
  e.callee = std::move(callee);
  e.rate_per_min = rate;
  e.median_ms = median_ms;
  e.sigma = sigma;
  e.codes = std::move(codes);
  return e;
}

Fault MakeFault(FaultKind kind, std::string service, double magnitude,
                std::optional<std::string> caller = std::nullopt) {
  Fault f;
  f.kind = kind;
  f.service = std::move(service);
  f.caller = std::move(caller);
  f.magnitude = magnitude;
  return f;
}

const std::vector<std::string> kThreeDataCenters = {"dc-central", "dc-east", "dc-west"};

}  // namespace

ScenarioSpec DemoScenario(int64_t start_ms, double hours, uint64_t seed) {
  ScenarioSpec spec;
  spec.seed = seed;
  spec.start_ms = start_ms;
  spec.duration_ms = HoursToMs(hours);
  const std::vector<std::string> dcs = {"us-south", "eu-de", "jp-tok"};
  DeployEverywhere(spec, dcs,
                   {"console-ui", "api-gateway", "dashboard-broker", "preferences", "cloudant",
                    "datalayer", "iam", "catalog", "billing", "notifications", "resource-search",
                    "legacy-reports"});

  const std::map<std::string, double> web = {{"200", 0.95}, {"304", 0.03}, {"404", 0.015}, {"503", 0.005}};
  spec.edges = {
      MakeEdge("console-ui", "api-gateway", 120, 35, 0.4, web),
      MakeEdge("console-ui", "dashboard-broker", 60, 90, 0.5, web),
      MakeEdge("console-ui", "notifications", 40, 25, 0.4),
      MakeEdge("api-gateway", "iam", 90, 20, 0.3, {{"200", 0.97}, {"401", 0.03}}),
      MakeEdge("api-gateway", "catalog", 45, 60, 0.5, web),
      MakeEdge("api-gateway", "datalayer", 70, 45, 0.5),
      MakeEdge("api-gateway", "billing", 12, 120, 0.6),
      MakeEdge("api-gateway", "resource-search", 30, 150, 0.6, web),
      MakeEdge("api-gateway", "legacy-reports", 4, 400, 0.5),
      MakeEdge("dashboard-broker", "cloudant", 50, 30, 0.5),
      MakeEdge("dashboard-broker", "datalayer", 30, 45, 0.5),
      MakeEdge("preferences", "cloudant", 25, 25, 0.5),
      MakeEdge("console-ui", "preferences", 30, 40, 0.4),
      MakeEdge("datalayer", "cloudant", 55, 20, 0.5),
      MakeEdge("resource-search", "catalog", 20, 50, 0.5),
      MakeEdge("billing", "iam", 8, 20, 0.3),
  };

  // Faults sit in distinct parts of the timeline so each stands out when the
  // animation is played.
  const int64_t d = spec.duration_ms;
  Fault rate_limit = MakeFault(FaultKind::kRateLimit429, "iam", 0.4);
  rate_limit.start_offset_ms = d / 6;
  rate_limit.end_offset_ms = d / 3;
  Fault slow_dashboard = MakeFault(FaultKind::kLatencyDegrade, "cloudant", 2500, "dashboard-broker");
  slow_dashboard.start_offset_ms = d / 2;
  slow_dashboard.end_offset_ms = 2 * d / 3;
  Fault slow_preferences = slow_dashboard;
  slow_preferences.caller = "preferences";
  spec.faults = {
      rate_limit,
      MakeFault(FaultKind::kServerError5xx, "legacy-reports", 1.0),
      slow_dashboard,
      slow_preferences,
      MakeFault(FaultKind::kNonHttpCode, "notifications", 0.3),
      MakeFault(FaultKind::kLowTraffic, "billing", 0.05),
  };
  return spec;
}

ScenarioSpec RateLimitScenario(int64_t start_ms, double hours, uint64_t seed) {
  ScenarioSpec spec;
  spec.seed = seed;
  spec.start_ms = start_ms;
  spec.duration_ms = HoursToMs(hours);
  DeployEverywhere(spec, kThreeDataCenters, {"gateway", "svcA", "svcB", "svcR"});
  spec.edges = {
      MakeEdge("gateway", "svcR", 1300, 40),
      MakeEdge("gateway", "svcA", 60, 30),
      MakeEdge("svcA", "svcB", 40, 20, 0.5, {{"200", 0.99}, {"404", 0.01}}),
  };
  spec.faults = {MakeFault(FaultKind::kRateLimit429, "svcR", 0.4)};
  return spec;
}

ScenarioSpec DeadServiceScenario(int64_t start_ms, double hours, uint64_t seed) {
  ScenarioSpec spec;
  spec.seed = seed;
  spec.start_ms = start_ms;
  spec.duration_ms = HoursToMs(hours);
  DeployEverywhere(spec, kThreeDataCenters, {"gateway", "svcA", "svcB", "svcD"});
  spec.edges = {
      MakeEdge("gateway", "svcD", 20, 15),
      MakeEdge("gateway", "svcA", 60, 30, 0.5, {{"200", 0.98}, {"503", 0.02}}),
      MakeEdge("svcA", "svcB", 40, 20),
      MakeEdge("svcB", "svcD", 5, 15),
  };
  spec.faults = {MakeFault(FaultKind::kServerError5xx, "svcD", 1.0)};
  return spec;
}

ScenarioSpec SlowDatabaseScenario(int64_t start_ms, double hours, uint64_t seed) {
  ScenarioSpec spec;
  spec.seed = seed;
  spec.start_ms = start_ms;
  spec.duration_ms = HoursToMs(hours);
  DeployEverywhere(spec, kThreeDataCenters,
                   {"console-ui", "dashboard-broker", "preferences", "datalayer", "cloudant"});
  spec.edges = {
      MakeEdge("console-ui", "dashboard-broker", 40, 120),
      MakeEdge("console-ui", "preferences", 30, 60),
      MakeEdge("dashboard-broker", "cloudant", 30, 40, 0.5),
      MakeEdge("preferences", "cloudant", 20, 40, 0.5),
      MakeEdge("datalayer", "cloudant", 30, 40, 0.5),
      MakeEdge("console-ui", "datalayer", 25, 80),
  };
  spec.faults = {
      MakeFault(FaultKind::kLatencyDegrade, "cloudant", 2500, "dashboard-broker"),
      MakeFault(FaultKind::kLatencyDegrade, "cloudant", 2500, "preferences"),
  };
  return spec;
}

ScenarioSpec NonHttpScenario(int64_t start_ms, double hours, uint64_t seed) {
  ScenarioSpec spec;
  spec.seed = seed;
  spec.start_ms = start_ms;
  spec.duration_ms = HoursToMs(hours);
  DeployEverywhere(spec, kThreeDataCenters, {"console-ui", "notifications", "iam"});
  spec.edges = {
      MakeEdge("console-ui", "notifications", 40, 25),
      MakeEdge("console-ui", "iam", 40, 20),
  };
  spec.faults = {MakeFault(FaultKind::kNonHttpCode, "notifications", 0.3)};
  return spec;
}

std::vector<std::string> NamedScenarios() {
  return {"demo", "rate-limit", "dead-service", "slow-db", "non-http"};
}

std::optional<ScenarioSpec> NamedScenario(std::string_view name, int64_t start_ms, double hours,
                                          std::optional<uint64_t> seed) {
  std::optional<ScenarioSpec> spec;
  if (name == "demo") spec = DemoScenario(start_ms, hours);
  if (name == "rate-limit") spec = RateLimitScenario(start_ms, hours);
  if (name == "dead-service") spec = DeadServiceScenario(start_ms, hours);
  if (name == "slow-db") spec = SlowDatabaseScenario(start_ms, hours);
  if (name == "non-http") spec = NonHttpScenario(start_ms, hours);
  if (spec && seed) spec->seed = *seed;
  return spec;
}

}  // namespace tracegrid::synth
