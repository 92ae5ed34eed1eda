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

#include "tracegrid/resampling.h"

#include <algorithm>
#include <set>
#include <string>

#include "tracegrid/error.h"

namespace tracegrid {

namespace {

int64_t FloorDiv(int64_t a, int64_t b) {
  int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

void CheckDisjoint(std::span<const IntervalSnapshot> snapshots) {
  std::set<int64_t> starts;
  for (const auto& s : snapshots) {
    if (!starts.insert(s.interval_start).second) {
      throw Error(ErrorKind::kOverlappingSnapshots,
                  "duplicate interval_start " + std::to_string(s.interval_start));
    }
  }
  for (size_t i = 1; i < snapshots.size(); ++i) {
    if (snapshots[i].interval_start < snapshots[i - 1].interval_end()) {
      throw Error(ErrorKind::kOverlappingSnapshots,
                  "snapshot at " + std::to_string(snapshots[i].interval_start) +
                      " overlaps or precedes its predecessor");
    }
  }
}

}  // namespace

void ResamplePlan::Validate() const {
  if (source_step_ms <= 0 || target_step_ms <= 0) {
    throw Error(ErrorKind::kMisalignedPlan, "steps must be positive");
  }
  if (target_step_ms % source_step_ms != 0) {
    throw Error(ErrorKind::kMisalignedPlan,
                "target step " + std::to_string(target_step_ms) +
                    " ms is not a multiple of source step " + std::to_string(source_step_ms) +
                    " ms");
  }
  if (window_start >= window_end) {
    throw Error(ErrorKind::kMisalignedPlan, "window start must precede window end");
  }
  if (window_start % target_step_ms != 0 || window_end % target_step_ms != 0) {
    throw Error(ErrorKind::kMisalignedPlan,
                "window bounds must be multiples of the target step " +
                    std::to_string(target_step_ms) + " ms");
  }
}

std::vector<IntervalSnapshot> Resample(std::span<const IntervalSnapshot> snapshots,
                                       const ResamplePlan& plan) {
  plan.Validate();
  CheckDisjoint(snapshots);

  std::vector<IntervalSnapshot> out;
  for (const auto& s : snapshots) {
    if (s.interval_length_ms != plan.source_step_ms) {
      throw Error(ErrorKind::kMisalignedPlan,
                  "snapshot at " + std::to_string(s.interval_start) + " has length " +
                      std::to_string(s.interval_length_ms) + " ms, plan expects " +
                      std::to_string(plan.source_step_ms) + " ms");
    }
    if (s.interval_start < plan.window_start || s.interval_end() > plan.window_end) {
      throw Error(ErrorKind::kMisalignedPlan,
                  "snapshot at " + std::to_string(s.interval_start) + " lies outside the window");
    }
    const int64_t bin = FloorDiv(s.interval_start, plan.target_step_ms) * plan.target_step_ms;
    if (out.empty() || out.back().interval_start != bin) {
      IntervalSnapshot fresh;
      fresh.interval_start = bin;
      fresh.interval_length_ms = plan.target_step_ms;
      out.push_back(std::move(fresh));
    }
    MergeGridInto(out.back().datacenter_services, s.datacenter_services);
    MergeGridInto(out.back().caller_callee_pairs, s.caller_callee_pairs);
  }
  for (auto& bin : out) {
    RecomputePercentages(bin.datacenter_services);
    RecomputePercentages(bin.caller_callee_pairs);
  }
  return out;
}

IntervalSnapshot WindowAggregate(std::span<const IntervalSnapshot> snapshots) {
  if (snapshots.empty()) {
    throw Error(ErrorKind::kEmptyWindow, "no snapshots to aggregate");
  }
  CheckDisjoint(snapshots);

  int64_t start = snapshots.front().interval_start;
  int64_t end = snapshots.front().interval_end();
  IntervalSnapshot out;
  for (const auto& s : snapshots) {
    start = std::min(start, s.interval_start);
    end = std::max(end, s.interval_end());
    MergeGridInto(out.datacenter_services, s.datacenter_services);
    MergeGridInto(out.caller_callee_pairs, s.caller_callee_pairs);
  }
  out.interval_start = start;
  out.interval_length_ms = end - start;
  RecomputePercentages(out.datacenter_services);
  RecomputePercentages(out.caller_callee_pairs);
  return out;
}

}  // namespace tracegrid
