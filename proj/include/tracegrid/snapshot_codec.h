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

// Nested-JSON persistence format for interval snapshots:
//
//   {"<interval_start ms>": [{"caller_callee_pairs": {caller: {callee: {code: stats}}},
//                             "datacenter_services": {instance: {service: {code: stats}}}}],
//    ...}
//
// Output is canonical: compact, keys sorted bytewise at every level, and
// numbers rendered with at most nine fractional digits. Values therefore
// round-trip to CanonicalNumber(v), not to v itself.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tracegrid/aggregation.h"

namespace tracegrid {

inline constexpr int64_t kDefaultIntervalMs = 60'000;

// The statistic names the codec writes for a StatsBundle.
inline constexpr std::string_view kStatCount = "count";
inline constexpr std::string_view kStatMean = "mean_ms";
inline constexpr std::string_view kStatMin = "min_ms";
inline constexpr std::string_view kStatMax = "max_ms";
inline constexpr std::string_view kStatStd = "std_ms";
inline constexpr std::string_view kStatPct = "pct";

// Rounds to nine fractional digits and returns the shortest decimal that
// reads back as the same double.
std::string FormatNumber(double value);
double CanonicalNumber(double value);

// Applies CanonicalNumber to every statistic in the snapshot.
IntervalSnapshot Canonicalize(IntervalSnapshot snapshot);

// `"<ts>":[{...}]`, the member text of one snapshot inside a file object.
std::string SerializeSnapshotEntry(const IntervalSnapshot& snapshot);

std::string SerializeSnapshot(const IntervalSnapshot& snapshot);

// Serializes several snapshots into one document. Callers pass snapshots in
// ascending start order; the timestamps are emitted in that order.
std::string SerializeSnapshots(std::span<const IntervalSnapshot> snapshots);

// Joins pre-rendered entries into a document; byte-identical to
// SerializeSnapshots over the same snapshots.
std::string JoinEntries(std::span<const std::string> entries);
size_t JoinedSize(std::span<const std::string> entries);

// Parses a document into one snapshot per timestamp key, ascending by start.
// The format does not record interval length, so the caller supplies it.
// Statistic names other than the canonical ones are kept in
// StatsBundle::extra. Throws ErrorKind::kSchemaViolation naming the JSON
// path of the first offending node.
std::vector<IntervalSnapshot> ParseSnapshots(std::string_view text,
                                             int64_t interval_length_ms = kDefaultIntervalMs);

}  // namespace tracegrid
