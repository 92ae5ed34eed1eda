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

// Test helpers: a brute-force statistics oracle, random span and snapshot
// generators, and a scratch directory.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "tracegrid/aggregation.h"
#include "tracegrid/telemetry.h"

namespace tracegrid::testing {

// Statistics computed straight from a list of integer microsecond durations.
// Sums are exact 128-bit integers, so the only rounding is the final
// division and square root.
struct OracleStats {
  uint64_t count = 0;
  double mean_ms = 0;
  double min_ms = 0;
  double max_ms = 0;
  double std_ms = 0;
};

inline OracleStats BruteForceStats(const std::vector<int64_t>& durations_us) {
  OracleStats out;
  out.count = durations_us.size();
  if (durations_us.empty()) return out;
  __int128 sum = 0;
  __int128 sum_sq = 0;
  for (const int64_t d : durations_us) {
    sum += d;
    sum_sq += static_cast<__int128>(d) * d;
  }
  const __int128 n = static_cast<__int128>(durations_us.size());
  const __int128 var_num = n * sum_sq - sum * sum;  // n^2 * variance
  const auto [lo, hi] = std::minmax_element(durations_us.begin(), durations_us.end());
  out.min_ms = static_cast<double>(*lo) / 1000.0;
  out.max_ms = static_cast<double>(*hi) / 1000.0;
  out.mean_ms = static_cast<double>(static_cast<long double>(sum) / static_cast<long double>(n) /
                                    1000.0L);
  out.std_ms = static_cast<double>(std::sqrt(static_cast<long double>(var_num)) /
                                   static_cast<long double>(n) / 1000.0L);
  return out;
}

// |actual - expected| <= rel * max(|expected|, floor).
inline bool Near(double actual, double expected, double rel = 1e-9, double floor = 0) {
  const double scale = std::max(std::abs(expected), floor);
  return std::abs(actual - expected) <= rel * scale;
}

// Groups raw spans the way the aggregation defines cells and codes.
// Key: (view, y, x, code).
using OracleKey = std::tuple<View, std::string, std::string, std::string>;

inline std::map<OracleKey, std::vector<int64_t>> GroupDurations(
    const std::vector<TraceSpan>& spans) {
  std::map<OracleKey, std::vector<int64_t>> groups;
  for (const auto& s : spans) {
    groups[{View::kDatacenterServices, s.app_instance_id, s.callee_id, s.return_code}].push_back(
        s.duration_us);
    groups[{View::kCallerCallee, s.caller_id, s.callee_id, s.return_code}].push_back(
        s.duration_us);
  }
  return groups;
}

struct RandomSpanOptions {
  std::vector<std::string> instances{"dc-a", "dc-b", "dc-c"};
  std::vector<std::string> services{"svc-1", "svc-2", "svc-3", "svc-4"};
  std::vector<std::string> codes{"200", "404", "429", "500", "-1"};
  int64_t max_duration_us = 5'000'000;
};

inline std::vector<TraceSpan> RandomSpans(std::mt19937_64& rng, size_t n, int64_t start_ms,
                                          int64_t length_ms,
                                          const RandomSpanOptions& opt = {}) {
  auto pick = [&rng](const std::vector<std::string>& v) -> const std::string& {
    return v[std::uniform_int_distribution<size_t>(0, v.size() - 1)(rng)];
  };
  std::uniform_int_distribution<int64_t> offset_us(0, length_ms * 1000 - 1);
  std::uniform_int_distribution<int64_t> duration(0, opt.max_duration_us);
  std::vector<TraceSpan> spans;
  spans.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    TraceSpan s;
    s.trace_id = "t" + std::to_string(rng() % 100000);
    s.span_id = "s" + std::to_string(i);
    s.start_time_us = start_ms * 1000 + offset_us(rng);
    s.duration_us = duration(rng);
    s.app_instance_id = pick(opt.instances);
    s.caller_id = pick(opt.services);
    s.callee_id = pick(opt.services);
    s.return_code = pick(opt.codes);
    spans.push_back(std::move(s));
  }
  return spans;
}

// A label drawn from a mix of plain identifiers and strings that need JSON
// escaping.
inline std::string RandomLabel(std::mt19937_64& rng) {
  static const std::vector<std::string> kAwkward = {
      "quote\"d", "back\\slash", "tab\there", "new\nline", "ctl\x01", "caf\xc3\xa9",
      "日本",     "",            " ",        "/slash",   "~tilde",  "a.b.c"};
  if (rng() % 4 == 0) return kAwkward[rng() % kAwkward.size()];
  std::string s = "n";
  const size_t len = 1 + rng() % 8;
  for (size_t i = 0; i < len; ++i) s += static_cast<char>('a' + rng() % 26);
  return s;
}

inline double RandomReal(std::mt19937_64& rng) {
  switch (rng() % 5) {
    case 0:
      return static_cast<double>(rng() % 100000);
    case 1:
      return std::uniform_real_distribution<double>(0, 1)(rng);
    case 2:
      return std::uniform_real_distribution<double>(0, 1e7)(rng);
    case 3:
      return std::ldexp(std::uniform_real_distribution<double>(0.5, 1)(rng),
                        static_cast<int>(rng() % 60) - 30);
    default:
      return 0.0;
  }
}

inline StatsBundle RandomBundle(std::mt19937_64& rng, bool allow_extra = true) {
  StatsBundle b;
  const bool opaque = allow_extra && rng() % 10 == 0;
  if (!opaque) {
    b.count = 1 + rng() % 100000;
    double lo = RandomReal(rng), hi = RandomReal(rng);
    if (lo > hi) std::swap(lo, hi);
    b.min_ms = lo;
    b.max_ms = hi;
    b.mean_ms = lo + (hi - lo) * std::uniform_real_distribution<double>(0, 1)(rng);
    b.std_ms = b.count == 1 ? 0.0 : (hi - lo) / 2;
    b.pct = std::uniform_real_distribution<double>(0, 100)(rng);
  }
  if (allow_extra && (opaque || rng() % 8 == 0)) {
    const size_t n = 1 + rng() % 3;
    for (size_t i = 0; i < n; ++i) b.extra["stat_" + RandomLabel(rng)] = RandomReal(rng);
  }
  return b;
}

inline IntervalSnapshot RandomSnapshot(std::mt19937_64& rng, int64_t start_ms,
                                       int64_t length_ms = 60'000) {
  IntervalSnapshot s;
  s.interval_start = start_ms;
  s.interval_length_ms = length_ms;
  for (auto* grid : {&s.datacenter_services, &s.caller_callee_pairs}) {
    const size_t ys = rng() % 4;
    for (size_t y = 0; y < ys; ++y) {
      auto& row = (*grid)[RandomLabel(rng)];
      const size_t xs = 1 + rng() % 4;
      for (size_t x = 0; x < xs; ++x) {
        auto& cell = row[RandomLabel(rng)];
        const size_t codes = 1 + rng() % 3;
        for (size_t c = 0; c < codes; ++c) {
          static const std::vector<std::string> kCodes = {"200", "429", "500", "-1", "unknown",
                                                          "OK"};
          cell[kCodes[rng() % kCodes.size()]] = RandomBundle(rng);
        }
      }
    }
  }
  return s;
}

// Removes the directory tree on destruction.
class ScratchDir {
 public:
  ScratchDir() {
    static std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("tracegrid-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace tracegrid::testing
