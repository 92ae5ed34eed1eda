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
#include <span>
#include <string>

#include "tracegrid/telemetry.h"

namespace tracegrid {

// return code -> statistics
using CodeStats = std::map<std::string, StatsBundle>;
// y id -> x id -> per-code statistics
using CellGrid = std::map<std::string, std::map<std::string, CodeStats>>;

// All aggregates for the half-open bin [interval_start, interval_start +
// interval_length_ms). Cells without traffic are absent.
struct IntervalSnapshot {
  int64_t interval_start = 0;  // epoch ms
  int64_t interval_length_ms = 0;
  CellGrid datacenter_services;  // app instance -> callee service
  CellGrid caller_callee_pairs;  // caller -> callee

  int64_t interval_end() const { return interval_start + interval_length_ms; }

  CellGrid& grid(View view) {
    return view == View::kDatacenterServices ? datacenter_services : caller_callee_pairs;
  }
  const CellGrid& grid(View view) const {
    return view == View::kDatacenterServices ? datacenter_services : caller_callee_pairs;
  }

  bool empty() const { return datacenter_services.empty() && caller_callee_pairs.empty(); }

  friend bool operator==(const IntervalSnapshot&, const IntervalSnapshot&) = default;
};

// Folds spans that fall in one base interval into per-cell, per-code
// statistics. Standard deviation is the population form. Throws
// ErrorKind::kOutOfBinSpan when a span starts outside the bin.
IntervalSnapshot AggregateInterval(std::span<const TraceSpan> spans, int64_t interval_start,
                                   int64_t interval_length_ms);

// Pooled combination of two bundles with count >= 1. The pct field of the
// result is left at 0; callers recompute it per cell.
StatsBundle MergeBundles(const StatsBundle& a, const StatsBundle& b);

// Adds `bundle` into `into`. An empty `into` (count 0) takes the bundle as is.
void AccumulateBundle(StatsBundle& into, const StatsBundle& bundle);

// Sets pct = 100 * count / cell total for every code of every cell.
void RecomputePercentages(CellGrid& grid);

// Merges every cell of `from` into `into` with MergeBundles. Bundles with
// count == 0 carry no compoundable statistics and are skipped.
void MergeGridInto(CellGrid& into, const CellGrid& from);

}  // namespace tracegrid
