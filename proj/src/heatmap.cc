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

#include "tracegrid/heatmap.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "tracegrid/error.h"
#include "tracegrid/resampling.h"

namespace tracegrid {

std::string_view MetricName(Metric metric) {
  switch (metric) {
    case Metric::kCallVolume: return "call_volume";
    case Metric::kMeanRt: return "mean_rt";
    case Metric::kMinRt: return "min_rt";
    case Metric::kMaxRt: return "max_rt";
    case Metric::kStdRt: return "std_rt";
  }
  return "call_volume";
}

std::optional<Metric> ParseMetric(std::string_view name) {
  for (const auto m : {Metric::kCallVolume, Metric::kMeanRt, Metric::kMinRt, Metric::kMaxRt,
                       Metric::kStdRt}) {
    if (MetricName(m) == name) return m;
  }
  return std::nullopt;
}

std::string_view ValueModeName(ValueMode mode) {
  return mode == ValueMode::kAbsolute ? "absolute" : "percent";
}

std::optional<ValueMode> ParseValueMode(std::string_view name) {
  if (name == "absolute") return ValueMode::kAbsolute;
  if (name == "percent") return ValueMode::kPercent;
  return std::nullopt;
}

bool CodeMatches(std::string_view entry, std::string_view code) {
  if (entry.size() == 3 && entry[0] >= '1' && entry[0] <= '9' &&
      (entry[1] == 'x' || entry[1] == 'X') && (entry[2] == 'x' || entry[2] == 'X')) {
    return code.size() == 3 && code[0] == entry[0] && std::isdigit(static_cast<unsigned char>(code[1])) &&
           std::isdigit(static_cast<unsigned char>(code[2]));
  }
  return entry == code;
}

void QuerySpec::Validate() const {
  auto fail = [](const std::string& field, const std::string& what) {
    throw Error(ErrorKind::kInvalidSpec, field + ": " + what);
  };
  if (from >= to) fail("from", "window start must precede window end");
  if (step_ms <= 0) fail("step", "must be positive");
  if (from % step_ms != 0) {
    fail("from", "must be a multiple of the step (" + std::to_string(step_ms) + " ms)");
  }
  if (to % step_ms != 0) {
    fail("to", "must be a multiple of the step (" + std::to_string(step_ms) + " ms)");
  }
  if (code_filter && code_filter->empty()) fail("codes", "filter must not be empty when given");
  if (value_mode == ValueMode::kPercent) {
    if (metric != Metric::kCallVolume) fail("mode", "percent mode requires metric call_volume");
    if (!code_filter) fail("mode", "percent mode requires a return-code filter");
  }
  if (value_range) {
    if (std::isnan(value_range->lo) || std::isnan(value_range->hi)) fail("lo", "not a number");
    if (value_range->lo > value_range->hi) fail("lo", "must not exceed hi");
  }
}

bool QuerySpec::MatchesCode(std::string_view code) const {
  if (!code_filter) return true;
  return std::any_of(code_filter->begin(), code_filter->end(),
                     [&](const std::string& entry) { return CodeMatches(entry, code); });
}

std::optional<double> CellValue(const QuerySpec& spec, const CodeStats& cell) {
  uint64_t total = 0;
  StatsBundle merged;
  for (const auto& [code, bundle] : cell) {
    if (bundle.count == 0) continue;
    total += bundle.count;
    if (spec.MatchesCode(code)) AccumulateBundle(merged, bundle);
  }
  if (total == 0) return std::nullopt;

  switch (spec.metric) {
    case Metric::kCallVolume:
      if (spec.value_mode == ValueMode::kPercent) {
        return 100.0 * static_cast<double>(merged.count) / static_cast<double>(total);
      }
      return static_cast<double>(merged.count);
    case Metric::kMeanRt: return merged.count > 0 ? merged.mean_ms : std::nullopt;
    case Metric::kMinRt: return merged.count > 0 ? merged.min_ms : std::nullopt;
    case Metric::kMaxRt: return merged.count > 0 ? merged.max_ms : std::nullopt;
    case Metric::kStdRt: return merged.count > 0 ? merged.std_ms : std::nullopt;
  }
  return std::nullopt;
}

namespace {

struct Axes {
  std::vector<std::string> x;
  std::vector<std::string> y;
};

Axes AxesOf(const CellGrid& grid) {
  Axes axes;
  std::set<std::string> xs;
  for (const auto& [y, row] : grid) {
    if (row.empty()) continue;
    axes.y.push_back(y);
    for (const auto& [x, cell] : row) xs.insert(x);
  }
  axes.x.assign(xs.begin(), xs.end());
  return axes;
}

HeatmapFrame MakeFrame(const QuerySpec& spec, const Axes& axes, const CellGrid& grid,
                       int64_t start, int64_t end, bool aggregate) {
  HeatmapFrame frame;
  frame.x_labels = axes.x;
  frame.y_labels = axes.y;
  frame.frame_start = start;
  frame.frame_end = end;
  frame.is_aggregate = aggregate;
  frame.values.assign(axes.y.size(), std::vector<std::optional<double>>(axes.x.size()));

  for (size_t yi = 0; yi < axes.y.size(); ++yi) {
    const auto row = grid.find(axes.y[yi]);
    if (row == grid.end()) continue;
    for (size_t xi = 0; xi < axes.x.size(); ++xi) {
      const auto cell = row->second.find(axes.x[xi]);
      if (cell == row->second.end()) continue;
      auto value = CellValue(spec, cell->second);
      if (value && spec.value_range && !spec.value_range->Contains(*value)) value.reset();
      frame.values[yi][xi] = value;
    }
  }
  return frame;
}

}  // namespace

HeatmapFrameSet BuildFrames(const QuerySpec& spec, std::span<const IntervalSnapshot> snapshots) {
  spec.Validate();
  HeatmapFrameSet out;
  out.spec = spec;
  if (snapshots.empty()) return out;

  const int64_t source_step = snapshots.front().interval_length_ms;
  for (const auto& s : snapshots) {
    if (s.interval_length_ms != source_step) {
      throw Error(ErrorKind::kInvalidSpec, "window mixes snapshot lengths " +
                                               std::to_string(source_step) + " and " +
                                               std::to_string(s.interval_length_ms) + " ms");
    }
  }
  if (spec.step_ms % source_step != 0) {
    throw Error(ErrorKind::kInvalidSpec, "step: must be a multiple of the stored interval (" +
                                             std::to_string(source_step) + " ms)");
  }

  ResamplePlan plan;
  plan.source_step_ms = source_step;
  plan.target_step_ms = spec.step_ms;
  plan.window_start = spec.from;
  plan.window_end = spec.to;
  const auto bins = Resample(snapshots, plan);
  const auto whole = WindowAggregate(snapshots);

  const Axes axes = AxesOf(whole.grid(spec.view));
  out.frames.reserve(bins.size() + 1);
  out.frames.push_back(MakeFrame(spec, axes, whole.grid(spec.view), spec.from, spec.to, true));
  for (const auto& bin : bins) {
    out.frames.push_back(
        MakeFrame(spec, axes, bin.grid(spec.view), bin.interval_start, bin.interval_end(), false));
  }
  return out;
}

HeatmapFrameSet BuildFrames(const QuerySpec& spec, const SnapshotSource& source) {
  spec.Validate();
  const auto snapshots = source.LoadWindow(spec.from, spec.to);
  return BuildFrames(spec, snapshots);
}

std::optional<TileInfo> CellLookup(const HeatmapFrame& frame, std::string_view x_id,
                                   std::string_view y_id) {
  const auto xi = std::find(frame.x_labels.begin(), frame.x_labels.end(), x_id);
  const auto yi = std::find(frame.y_labels.begin(), frame.y_labels.end(), y_id);
  if (xi == frame.x_labels.end() || yi == frame.y_labels.end()) return std::nullopt;
  TileInfo info;
  info.x_id = *xi;
  info.y_id = *yi;
  info.value = frame.values[static_cast<size_t>(yi - frame.y_labels.begin())]
                           [static_cast<size_t>(xi - frame.x_labels.begin())];
  return info;
}

Catalog BuildCatalog(std::span<const IntervalSnapshot> snapshots) {
  std::set<std::string> dcs, services, callers, callees, codes;
  for (const auto& s : snapshots) {
    for (const auto& [dc, row] : s.datacenter_services) {
      dcs.insert(dc);
      for (const auto& [svc, cell] : row) {
        services.insert(svc);
        for (const auto& [code, b] : cell) codes.insert(code);
      }
    }
    for (const auto& [caller, row] : s.caller_callee_pairs) {
      callers.insert(caller);
      services.insert(caller);
      for (const auto& [callee, cell] : row) {
        callees.insert(callee);
        services.insert(callee);
        for (const auto& [code, b] : cell) codes.insert(code);
      }
    }
  }
  auto vec = [](const std::set<std::string>& s) { return std::vector<std::string>(s.begin(), s.end()); };
  return Catalog{vec(dcs), vec(services), vec(callers), vec(callees), vec(codes)};
}

}  // namespace tracegrid
