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

// Wire encodings shared by the HTTP API and the command line tools.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "tracegrid/heatmap.h"
#include "tracegrid/service.h"

namespace tracegrid {

// Returns the raw value of a query parameter, if present.
using ParamLookup = std::function<std::optional<std::string>(std::string_view name)>;

// Decodes view, metric, codes (comma separated), mode, lo, hi, from, to and
// step. `default_step_ms` applies when step is absent. Throws
// ErrorKind::kInvalidSpec with the parameter name leading the message.
QuerySpec DecodeQuerySpec(const ParamLookup& params, int64_t default_step_ms);

// {spec, frames:[{start,end,aggregate,x,y,values}]}; absent cells are null.
std::string EncodeFrameSet(const HeatmapFrameSet& frames);
HeatmapFrameSet DecodeFrameSet(std::string_view text);

std::string EncodeCatalog(const Catalog& catalog);
std::string EncodeIngestSummary(const IngestSummary& summary);
std::string EncodeError(std::string_view kind, std::string_view message);

// Rows are y labels, columns x labels; absent cells are empty fields.
std::string FrameToCsv(const HeatmapFrame& frame);

}  // namespace tracegrid
