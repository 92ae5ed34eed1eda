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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tracegrid {

inline constexpr std::string_view kPlaceholderCode = "unknown";
inline constexpr std::string_view kPlaceholderInstance = "unknown";
inline constexpr std::string_view kDefaultInstanceTagKey = "app.instance";

// Tag keys consulted, in order, for a span's return code.
inline constexpr std::string_view kHttpStatusTag = "http.status_code";
inline constexpr std::string_view kStatusCodeTag = "status.code";

// One caller -> callee request observation.
struct TraceSpan {
  std::string trace_id;
  std::string span_id;
  int64_t start_time_us = 0;  // Unix epoch microseconds
  int64_t duration_us = 0;
  std::string caller_id;
  std::string callee_id;
  std::string app_instance_id;
  std::string return_code;

  int64_t start_time_ms() const;

  friend bool operator==(const TraceSpan&, const TraceSpan&) = default;
};

// Statistics for one (cell, return code) pair.
//
// Durations are milliseconds. A bundle with count == 0 never carries
// duration statistics; such bundles only arise when a persisted file holds
// statistic names this library does not know, which are kept in `extra`.
struct StatsBundle {
  uint64_t count = 0;
  std::optional<double> mean_ms;
  std::optional<double> min_ms;
  std::optional<double> max_ms;
  std::optional<double> std_ms;
  double pct = 0.0;
  std::map<std::string, double> extra;

  bool has_durations() const { return count > 0; }

  friend bool operator==(const StatsBundle&, const StatsBundle&) = default;
};

enum class View { kDatacenterServices, kCallerCallee };

std::string_view ViewName(View view);
std::optional<View> ParseView(std::string_view name);

// y_id is the app instance (or caller), x_id the microservice (or callee).
struct CellKey {
  View view = View::kDatacenterServices;
  std::string y_id;
  std::string x_id;

  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

struct ZipkinParseOptions {
  std::string instance_tag_key{kDefaultInstanceTagKey};
};

struct ZipkinParseResult {
  std::vector<TraceSpan> spans;
  size_t skipped = 0;
};

// Parses a Zipkin v2 JSON span array. Elements that cannot be mapped onto a
// TraceSpan are skipped and counted; only a non-array document throws
// (ErrorKind::kMalformedPayload).
ZipkinParseResult ParseZipkinSpans(std::string_view payload,
                                   const ZipkinParseOptions& options = {});

// Renders spans as a Zipkin v2 JSON array that ParseZipkinSpans maps back to
// the same TraceSpan values.
std::string SpansToZipkinJson(const std::vector<TraceSpan>& spans,
                              std::string_view instance_tag_key = kDefaultInstanceTagKey);

std::string NormalizeReturnCode(std::optional<std::string_view> raw);

}  // namespace tracegrid
