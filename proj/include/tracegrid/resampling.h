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
#include <span>
#include <vector>

#include "tracegrid/aggregation.h"

namespace tracegrid {

// target_step_ms must be a multiple of source_step_ms, and both window bounds
// must sit on the epoch-aligned target grid.
struct ResamplePlan {
  int64_t source_step_ms = 0;
  int64_t target_step_ms = 0;
  int64_t window_start = 0;
  int64_t window_end = 0;

  // Throws ErrorKind::kMisalignedPlan.
  void Validate() const;
};

// Re-bins base snapshots into target-step bins using pooled statistics.
// Bins without source data are omitted.
std::vector<IntervalSnapshot> Resample(std::span<const IntervalSnapshot> snapshots,
                                       const ResamplePlan& plan);

// Merges every snapshot into one spanning [min start, max end). Throws
// ErrorKind::kEmptyWindow on an empty list.
IntervalSnapshot WindowAggregate(std::span<const IntervalSnapshot> snapshots);

}  // namespace tracegrid
