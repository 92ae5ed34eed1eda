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

#include "tracegrid/api_json.h"

#include <charconv>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "tracegrid/error.h"

namespace tracegrid {

using nlohmann::json;

namespace {

[[noreturn]] void BadParam(std::string_view name, const std::string& what) {
  throw Error(ErrorKind::kInvalidSpec, std::string(name) + ": " + what);
}

int64_t ParseInt(std::string_view name, const std::string& text) {
  int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    BadParam(name, "expected an integer, got \"" + text + "\"");
  }
  return v;
}

double ParseReal(std::string_view name, const std::string& text) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || std::isnan(v)) {
    BadParam(name, "expected a number, got \"" + text + "\"");
  }
  return v;
}

json NullableReal(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string ShortestNumber(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

QuerySpec DecodeQuerySpec(const ParamLookup& params, int64_t default_step_ms) {
  QuerySpec spec;
  spec.step_ms = default_step_ms;

  if (const auto v = params("view")) {
    const auto view = ParseView(*v);
    if (!view) BadParam("view", "expected datacenter_services or caller_callee_pairs");
    spec.view = *view;
  }
  if (const auto v = params("metric")) {
    const auto metric = ParseMetric(*v);
    if (!metric) BadParam("metric", "expected call_volume, mean_rt, min_rt, max_rt or std_rt");
    spec.metric = *metric;
  }
  if (const auto v = params("mode")) {
    const auto mode = ParseValueMode(*v);
    if (!mode) BadParam("mode", "expected absolute or percent");
    spec.value_mode = *mode;
  }
  if (const auto v = params("codes"); v && !v->empty()) {
    std::set<std::string> codes;
    std::stringstream ss(*v);
    std::string code;
    while (std::getline(ss, code, ',')) {
      if (!code.empty()) codes.insert(code);
    }
    if (codes.empty()) BadParam("codes", "no return codes given");
    spec.code_filter = std::move(codes);
  }
  const auto lo = params("lo");
  const auto hi = params("hi");
  if ((lo && !lo->empty()) || (hi && !hi->empty())) {
    ValueRange range;
    if (lo && !lo->empty()) range.lo = ParseReal("lo", *lo);
    if (hi && !hi->empty()) range.hi = ParseReal("hi", *hi);
    spec.value_range = range;
  }
  const auto from = params("from");
  const auto to = params("to");
  if (!from) BadParam("from", "required");
  if (!to) BadParam("to", "required");
  spec.from = ParseInt("from", *from);
  spec.to = ParseInt("to", *to);
  if (const auto v = params("step"); v && !v->empty()) spec.step_ms = ParseInt("step", *v);

  spec.Validate();
  return spec;
}

std::string EncodeFrameSet(const HeatmapFrameSet& set) {
  const QuerySpec& spec = set.spec;
  json codes = nullptr;
  if (spec.code_filter) codes = json(std::vector<std::string>(spec.code_filter->begin(), spec.code_filter->end()));
  json echo = {
      {"view", ViewName(spec.view)},
      {"metric", MetricName(spec.metric)},
      {"codes", codes},
      {"mode", ValueModeName(spec.value_mode)},
      {"lo", spec.value_range ? NullableReal(spec.value_range->lo) : json(nullptr)},
      {"hi", spec.value_range ? NullableReal(spec.value_range->hi) : json(nullptr)},
      {"from", spec.from},
      {"to", spec.to},
      {"step", spec.step_ms},
  };

  json frames = json::array();
  for (const auto& f : set.frames) {
    json values = json::array();
    for (const auto& row : f.values) {
      json out_row = json::array();
      for (const auto& v : row) out_row.push_back(v ? json(*v) : json(nullptr));
      values.push_back(std::move(out_row));
    }
    frames.push_back({{"start", f.frame_start},
                      {"end", f.frame_end},
                      {"aggregate", f.is_aggregate},
                      {"x", f.x_labels},
                      {"y", f.y_labels},
                      {"values", std::move(values)}});
  }
  return json{{"spec", std::move(echo)}, {"frames", std::move(frames)}}.dump();
}

HeatmapFrameSet DecodeFrameSet(std::string_view text) {
  const json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorKind::kSchemaViolation, "heatmap response is not a JSON object");
  }
  try {
    HeatmapFrameSet set;
    const auto& echo = doc.at("spec");
    set.spec.view = ParseView(echo.at("view").get<std::string>()).value();
    set.spec.metric = ParseMetric(echo.at("metric").get<std::string>()).value();
    set.spec.value_mode = ParseValueMode(echo.at("mode").get<std::string>()).value();
    if (!echo.at("codes").is_null()) {
      set.spec.code_filter = echo.at("codes").get<std::set<std::string>>();
    }
    if (!echo.at("lo").is_null() || !echo.at("hi").is_null()) {
      ValueRange range;
      if (!echo.at("lo").is_null()) range.lo = echo.at("lo").get<double>();
      if (!echo.at("hi").is_null()) range.hi = echo.at("hi").get<double>();
      set.spec.value_range = range;
    }
    set.spec.from = echo.at("from").get<int64_t>();
    set.spec.to = echo.at("to").get<int64_t>();
    set.spec.step_ms = echo.at("step").get<int64_t>();

    for (const auto& f : doc.at("frames")) {
      HeatmapFrame frame;
      frame.frame_start = f.at("start").get<int64_t>();
      frame.frame_end = f.at("end").get<int64_t>();
      frame.is_aggregate = f.at("aggregate").get<bool>();
      frame.x_labels = f.at("x").get<std::vector<std::string>>();
      frame.y_labels = f.at("y").get<std::vector<std::string>>();
      for (const auto& row : f.at("values")) {
        std::vector<std::optional<double>> out_row;
        for (const auto& v : row) {
          out_row.push_back(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
        }
        frame.values.push_back(std::move(out_row));
      }
      set.frames.push_back(std::move(frame));
    }
    return set;
  } catch (const std::exception& e) {
    throw Error(ErrorKind::kSchemaViolation, std::string("heatmap response: ") + e.what());
  }
}

std::string EncodeCatalog(const Catalog& c) {
  return json{{"data_centers", c.data_centers},
              {"microservices", c.microservices},
              {"callers", c.callers},
              {"callees", c.callees},
              {"return_codes", c.return_codes}}
      .dump();
}

std::string EncodeIngestSummary(const IngestSummary& s) {
  return json{{"accepted", s.accepted}, {"skipped", s.skipped}, {"dropped_late", s.dropped_late}}
      .dump();
}

std::string EncodeError(std::string_view kind, std::string_view message) {
  return json{{"error", kind}, {"message", message}}.dump();
}

std::string FrameToCsv(const HeatmapFrame& frame) {
  std::string out = "y\\x";
  for (const auto& x : frame.x_labels) out += "," + CsvField(x);
  out += '\n';
  for (size_t yi = 0; yi < frame.y_labels.size(); ++yi) {
    out += CsvField(frame.y_labels[yi]);
    for (const auto& v : frame.values[yi]) {
      out += ',';
      if (v) out += ShortestNumber(*v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace tracegrid
