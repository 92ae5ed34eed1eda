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

#include "tracegrid/aggregation.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "tracegrid/error.h"

namespace tracegrid {

namespace {

using DurationGroups =
    std::map<std::string, std::map<std::string, std::map<std::string, std::vector<int64_t>>>>;

StatsBundle BundleFromDurations(const std::vector<int64_t>& durations_us) {
  StatsBundle b;
  b.count = durations_us.size();

  long double sum = 0;
  int64_t lo = durations_us.front();
  int64_t hi = durations_us.front();
  for (const int64_t d : durations_us) {
    sum += static_cast<long double>(d);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  const long double n = static_cast<long double>(b.count);
  const long double mean = sum / n;
  long double ss = 0;
  for (const int64_t d : durations_us) {
    const long double dev = static_cast<long double>(d) - mean;
    ss += dev * dev;
  }

  b.mean_ms = static_cast<double>(mean / 1000.0L);
  b.min_ms = static_cast<double>(lo) / 1000.0;
  b.max_ms = static_cast<double>(hi) / 1000.0;
  b.std_ms = b.count == 1 ? 0.0 : static_cast<double>(std::sqrt(ss / n) / 1000.0L);
  return b;
}

void Emit(const DurationGroups& groups, CellGrid& grid) {
  for (const auto& [y, row] : groups) {
    for (const auto& [x, codes] : row) {
      auto& cell = grid[y][x];
      for (const auto& [code, durations] : codes) {
        cell.emplace(code, BundleFromDurations(durations));
      }
    }
  }
  RecomputePercentages(grid);
}

}  // namespace

IntervalSnapshot AggregateInterval(std::span<const TraceSpan> spans, int64_t interval_start,
                                   int64_t interval_length_ms) {
  if (interval_length_ms <= 0) {
    throw Error(ErrorKind::kOutOfBinSpan, "interval length must be positive");
  }
  const int64_t interval_end = interval_start + interval_length_ms;

  DurationGroups by_instance;
  DurationGroups by_caller;
  for (const auto& span : spans) {
    const int64_t start_ms = span.start_time_ms();
    if (start_ms < interval_start || start_ms >= interval_end) {
      throw Error(ErrorKind::kOutOfBinSpan,
                  "span " + span.span_id + " starts at " + std::to_string(start_ms) +
                      " ms, outside [" + std::to_string(interval_start) + ", " +
                      std::to_string(interval_end) + ")");
    }
    by_instance[span.app_instance_id][span.callee_id][span.return_code].push_back(
        span.duration_us);
    by_caller[span.caller_id][span.callee_id][span.return_code].push_back(span.duration_us);
  }

  IntervalSnapshot snap;
  snap.interval_start = interval_start;
  snap.interval_length_ms = interval_length_ms;
  Emit(by_instance, snap.datacenter_services);
  Emit(by_caller, snap.caller_callee_pairs);
  return snap;
}

StatsBundle MergeBundles(const StatsBundle& a, const StatsBundle& b) {
  StatsBundle out;
  out.count = a.count + b.count;

  const long double na = static_cast<long double>(a.count);
  const long double nb = static_cast<long double>(b.count);
  const long double n = na + nb;
  const long double mean_a = a.mean_ms.value_or(0.0);
  const long double mean_b = b.mean_ms.value_or(0.0);
  const long double std_a = a.std_ms.value_or(0.0);
  const long double std_b = b.std_ms.value_or(0.0);

  const long double mean = (na * mean_a + nb * mean_b) / n;
  const long double da = mean_a - mean;
  const long double db = mean_b - mean;
  const long double variance =
      (na * (std_a * std_a + da * da) + nb * (std_b * std_b + db * db)) / n;

  out.mean_ms = static_cast<double>(mean);
  out.std_ms = static_cast<double>(std::sqrt(std::max(variance, 0.0L)));
  out.min_ms = std::min(a.min_ms.value_or(0.0), b.min_ms.value_or(0.0));
  out.max_ms = std::max(a.max_ms.value_or(0.0), b.max_ms.value_or(0.0));
  return out;
}

void AccumulateBundle(StatsBundle& into, const StatsBundle& bundle) {
  if (bundle.count == 0) return;
  if (into.count == 0) {
    into = bundle;
    into.extra.clear();
    into.pct = 0.0;
    return;
  }
  into = MergeBundles(into, bundle);
}

void RecomputePercentages(CellGrid& grid) {
  for (auto& [y, row] : grid) {
    for (auto& [x, codes] : row) {
      uint64_t total = 0;
      for (const auto& [code, b] : codes) total += b.count;
      for (auto& [code, b] : codes) {
        b.pct = total == 0 ? 0.0 : 100.0 * static_cast<double>(b.count) / static_cast<double>(total);
      }
    }
  }
}

void MergeGridInto(CellGrid& into, const CellGrid& from) {
  for (const auto& [y, row] : from) {
    for (const auto& [x, codes] : row) {
      for (const auto& [code, b] : codes) {
        if (b.count == 0) continue;
        AccumulateBundle(into[y][x][code], b);
      }
    }
  }
}

}  // namespace tracegrid
