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
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tracegrid/aggregation.h"
#include "tracegrid/store.h"

namespace tracegrid {

enum class Metric { kCallVolume, kMeanRt, kMinRt, kMaxRt, kStdRt };
enum class ValueMode { kAbsolute, kPercent };

std::string_view MetricName(Metric metric);
std::optional<Metric> ParseMetric(std::string_view name);
std::string_view ValueModeName(ValueMode mode);
std::optional<ValueMode> ParseValueMode(std::string_view name);

// Inclusive; an unbounded side is +/- infinity.
struct ValueRange {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool Contains(double v) const { return v >= lo && v <= hi; }
  friend bool operator==(const ValueRange&, const ValueRange&) = default;
};

// Matches a return code against a filter entry. Entries are exact codes,
// or a status class such as "5xx" that matches any three-digit code with
// that leading digit.
bool CodeMatches(std::string_view filter_entry, std::string_view code);

struct QuerySpec {
  View view = View::kDatacenterServices;
  Metric metric = Metric::kCallVolume;
  std::optional<std::set<std::string>> code_filter;  // absent: all codes
  ValueMode value_mode = ValueMode::kAbsolute;
  std::optional<ValueRange> value_range;
  int64_t from = 0;  // epoch ms, inclusive
  int64_t to = 0;    // epoch ms, exclusive
  int64_t step_ms = kDefaultStepMs;

  static constexpr int64_t kDefaultStepMs = 60'000;

  // Throws ErrorKind::kInvalidSpec naming the offending field.
  void Validate() const;
  bool MatchesCode(std::string_view code) const;

  friend bool operator==(const QuerySpec&, const QuerySpec&) = default;
};

struct HeatmapFrame {
  std::vector<std::string> x_labels;
  std::vector<std::string> y_labels;
  std::vector<std::vector<std::optional<double>>> values;  // [y][x]
  int64_t frame_start = 0;
  int64_t frame_end = 0;
  bool is_aggregate = false;
};

// frames[0] aggregates the whole window; the rest are chronological.
struct HeatmapFrameSet {
  std::vector<HeatmapFrame> frames;
  QuerySpec spec;
};

// Builds frame 0 from the whole window and one frame per step_ms bin that
// holds data. `snapshots` are the base snapshots of the window, ascending.
HeatmapFrameSet BuildFrames(const QuerySpec& spec, std::span<const IntervalSnapshot> snapshots);
HeatmapFrameSet BuildFrames(const QuerySpec& spec, const SnapshotSource& source);

// Value of one cell of a code-level grid under the spec's metric, filter and
// mode, before range masking. Absent when the cell has nothing to report.
std::optional<double> CellValue(const QuerySpec& spec, const CodeStats& cell);

struct TileInfo {
  std::optional<double> value;
  std::string x_id;
  std::string y_id;
};

// Absent when either label is not on the frame's axes.
std::optional<TileInfo> CellLookup(const HeatmapFrame& frame, std::string_view x_id,
                                   std::string_view y_id);

struct Catalog {
  std::vector<std::string> data_centers;
  std::vector<std::string> microservices;
  std::vector<std::string> callers;
  std::vector<std::string> callees;
  std::vector<std::string> return_codes;
};

Catalog BuildCatalog(std::span<const IntervalSnapshot> snapshots);

}  // namespace tracegrid
