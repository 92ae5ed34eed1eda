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

#include "tracegrid/telemetry.h"

#include <cmath>

#include "json.hpp"
#include "tracegrid/error.h"

namespace tracegrid {

using nlohmann::json;

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kMalformedPayload: return "MalformedPayload";
    case ErrorKind::kOutOfBinSpan: return "OutOfBinSpan";
    case ErrorKind::kMisalignedPlan: return "MisalignedPlan";
    case ErrorKind::kOverlappingSnapshots: return "OverlappingSnapshots";
    case ErrorKind::kEmptyWindow: return "EmptyWindow";
    case ErrorKind::kSchemaViolation: return "SchemaViolation";
    case ErrorKind::kOutOfOrderAppend: return "OutOfOrderAppend";
    case ErrorKind::kStorageFailure: return "StorageFailure";
    case ErrorKind::kInvalidSpec: return "InvalidSpec";
  }
  return "Error";
}

int64_t TraceSpan::start_time_ms() const {
  int64_t ms = start_time_us / 1000;
  if (start_time_us % 1000 != 0 && start_time_us < 0) --ms;
  return ms;
}

std::string_view ViewName(View view) {
  return view == View::kDatacenterServices ? "datacenter_services" : "caller_callee_pairs";
}

std::optional<View> ParseView(std::string_view name) {
  if (name == "datacenter_services" || name == "dc" || name == "datacenter") {
    return View::kDatacenterServices;
  }
  if (name == "caller_callee_pairs" || name == "caller_callee" || name == "cc") {
    return View::kCallerCallee;
  }
  return std::nullopt;
}

namespace {

std::string_view Trim(std::string_view s) {
  constexpr std::string_view kSpace = " \t\r\n\f\v";
  const auto first = s.find_first_not_of(kSpace);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(kSpace);
  return s.substr(first, last - first + 1);
}

// Zipkin encodes timestamps and durations as integral JSON numbers; some
// emitters produce floats with a zero fractional part.
std::optional<int64_t> NonNegativeInteger(const json& node) {
  if (node.is_number_unsigned()) {
    const auto v = node.get<uint64_t>();
    if (v > static_cast<uint64_t>(INT64_MAX)) return std::nullopt;
    return static_cast<int64_t>(v);
  }
  if (node.is_number_integer()) {
    const auto v = node.get<int64_t>();
    if (v < 0) return std::nullopt;
    return v;
  }
  if (node.is_number_float()) {
    const double v = node.get<double>();
    if (!std::isfinite(v) || v < 0 || v != std::floor(v) || v >= 9.2e18) return std::nullopt;
    return static_cast<int64_t>(v);
  }
  return std::nullopt;
}

std::string StringField(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) return {};
  return std::string(Trim(it->get_ref<const std::string&>()));
}

std::string EndpointService(const json& span, const char* endpoint) {
  const auto it = span.find(endpoint);
  if (it == span.end() || !it->is_object()) return {};
  return StringField(*it, "serviceName");
}

// Tag values are strings in Zipkin v2; numbers are tolerated and rendered
// in their JSON form.
std::optional<std::string> TagValue(const json& tags, std::string_view key) {
  const auto it = tags.find(key);
  if (it == tags.end()) return std::nullopt;
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<int64_t>());
  if (it->is_number()) return it->dump();
  return std::nullopt;
}

std::optional<TraceSpan> ToSpan(const json& node, const ZipkinParseOptions& options) {
  if (!node.is_object()) return std::nullopt;

  TraceSpan span;
  span.trace_id = StringField(node, "traceId");
  span.span_id = StringField(node, "id");
  if (span.trace_id.empty() || span.span_id.empty()) return std::nullopt;

  const auto ts = node.find("timestamp");
  const auto dur = node.find("duration");
  if (ts == node.end() || dur == node.end()) return std::nullopt;
  const auto start = NonNegativeInteger(*ts);
  const auto duration = NonNegativeInteger(*dur);
  if (!start || !duration) return std::nullopt;
  span.start_time_us = *start;
  span.duration_us = *duration;

  span.caller_id = EndpointService(node, "localEndpoint");
  span.callee_id = EndpointService(node, "remoteEndpoint");
  if (span.callee_id.empty()) span.callee_id = StringField(node, "name");
  if (span.caller_id.empty() || span.callee_id.empty()) return std::nullopt;

  std::optional<std::string> code;
  std::optional<std::string> instance;
  if (const auto tags = node.find("tags"); tags != node.end()) {
    if (!tags->is_object()) return std::nullopt;
    code = TagValue(*tags, kHttpStatusTag);
    if (!code || Trim(*code).empty()) code = TagValue(*tags, kStatusCodeTag);
    instance = TagValue(*tags, options.instance_tag_key);
  }
  span.return_code = NormalizeReturnCode(code);
  const auto trimmed_instance = instance ? Trim(*instance) : std::string_view{};
  span.app_instance_id =
      trimmed_instance.empty() ? std::string(kPlaceholderInstance) : std::string(trimmed_instance);
  return span;
}

bool IsHttpStatus(std::string_view code) {
  return code.size() == 3 && code[0] >= '1' && code[0] <= '5' &&
         code.find_first_not_of("0123456789") == std::string_view::npos;
}

}  // namespace

std::string NormalizeReturnCode(std::optional<std::string_view> raw) {
  if (!raw) return std::string(kPlaceholderCode);
  const auto trimmed = Trim(*raw);
  if (trimmed.empty()) return std::string(kPlaceholderCode);
  return std::string(trimmed);
}

ZipkinParseResult ParseZipkinSpans(std::string_view payload, const ZipkinParseOptions& options) {
  json doc = json::parse(payload, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) {
    throw Error(ErrorKind::kMalformedPayload, "payload is not valid JSON");
  }
  if (!doc.is_array()) {
    throw Error(ErrorKind::kMalformedPayload, "expected a JSON array of spans");
  }

  ZipkinParseResult result;
  result.spans.reserve(doc.size());
  for (const auto& node : doc) {
    if (auto span = ToSpan(node, options)) {
      result.spans.push_back(std::move(*span));
    } else {
      ++result.skipped;
    }
  }
  return result;
}

std::string SpansToZipkinJson(const std::vector<TraceSpan>& spans,
                              std::string_view instance_tag_key) {
  json out = json::array();
  for (const auto& s : spans) {
    json tags = json::object();
    if (s.return_code != kPlaceholderCode) {
      tags[IsHttpStatus(s.return_code) ? std::string(kHttpStatusTag)
                                       : std::string(kStatusCodeTag)] = s.return_code;
    }
    tags[std::string(instance_tag_key)] = s.app_instance_id;
    out.push_back({
        {"traceId", s.trace_id},
        {"id", s.span_id},
        {"kind", "CLIENT"},
        {"name", s.callee_id},
        {"timestamp", s.start_time_us},
        {"duration", s.duration_us},
        {"localEndpoint", {{"serviceName", s.caller_id}}},
        {"remoteEndpoint", {{"serviceName", s.callee_id}}},
        {"tags", std::move(tags)},
    });
  }
  return out.dump();
}

}  // namespace tracegrid
