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

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "tracegrid/heatmap.h"
#include "tracegrid/store.h"
#include "tracegrid/telemetry.h"

namespace tracegrid {

enum class ClockMode { kWall, kManual };

std::string_view ClockModeName(ClockMode mode);
std::optional<ClockMode> ParseClockMode(std::string_view name);

struct ServiceConfig {
  int listen_port = 9411;
  std::string data_dir = "./data";
  int64_t base_interval_ms = 60'000;
  std::string instance_tag_key{kDefaultInstanceTagKey};
  ClockMode clock_mode = ClockMode::kWall;
  // Wall clock only: how long an interval stays open after it ends, so
  // producers that publish a minute's spans after the minute can land.
  int64_t seal_delay_ms = 60'000;
  std::string ui_dir;  // static assets served at "/", optional

  // Throws ErrorKind::kInvalidSpec.
  void Validate() const;
};

struct IngestSummary {
  uint64_t accepted = 0;
  uint64_t skipped = 0;
  uint64_t dropped_late = 0;

  IngestSummary& operator+=(const IngestSummary& o) {
    accepted += o.accepted;
    skipped += o.skipped;
    dropped_late += o.dropped_late;
    return *this;
  }
};

// Ingestion buffer, interval sealer and query front end over one
// SnapshotStore.
//
// Spans are buffered per base interval by start time. SealTick closes every
// interval that ended at or before `now`, aggregates it and appends it to the
// store. Spans for an interval that is already closed are dropped.
class TelemetryService {
 public:
  TelemetryService(ServiceConfig config, std::shared_ptr<BlobStore> blobs);

  // Opens a FilesystemBlobStore under config.data_dir.
  explicit TelemetryService(ServiceConfig config);

  // Throws kMalformedPayload for a non-array body and kStorageFailure while
  // the last seal attempt failed.
  IngestSummary Ingest(std::string_view zipkin_json);
  IngestSummary IngestParsed(ZipkinParseResult parsed);

  // Returns the snapshots written, oldest first; spans of an interval that
  // fails to persist stay buffered and the error propagates.
  std::vector<IntervalSnapshot> SealTick(int64_t now_ms);

  HeatmapFrameSet Heatmap(const QuerySpec& spec) const;
  Catalog CatalogFor(int64_t from, int64_t to) const;

  IngestSummary totals() const;
  bool storage_failing() const { return storage_failing_.load(); }
  // Start of the earliest interval still accepting spans.
  std::optional<int64_t> open_from() const;
  size_t buffered_spans() const;

  const ServiceConfig& config() const { return config_; }
  const SnapshotStore& store() const { return *store_; }

 private:
  int64_t IntervalOf(int64_t start_ms) const;

  ServiceConfig config_;
  std::unique_ptr<SnapshotStore> store_;
  ZipkinParseOptions parse_options_;

  mutable std::mutex mu_;
  std::map<int64_t, std::vector<TraceSpan>> buffers_;
  std::optional<int64_t> open_from_;
  IngestSummary totals_;
  std::atomic<bool> storage_failing_{false};
};

// Drives SealTick from the wall clock on a background thread.
class WallClockSealer {
 public:
  using ErrorHook = std::function<void(const std::exception&)>;

  WallClockSealer(TelemetryService& service, int64_t period_ms, ErrorHook on_error = {});
  ~WallClockSealer();

  WallClockSealer(const WallClockSealer&) = delete;
  WallClockSealer& operator=(const WallClockSealer&) = delete;

 private:
  void Run();

  TelemetryService& service_;
  int64_t period_ms_;
  ErrorHook on_error_;
  std::mutex mu_;
  std::condition_variable cv_;
  bool stop_ = false;
  std::thread thread_;
};

int64_t WallClockNowMs();

struct ReplayStats {
  size_t batches = 0;
  IngestSummary ingest;
  size_t snapshots_written = 0;
};

// Feeds newline-delimited Zipkin arrays (one batch per line) through
// `ingest`, then advances a manual clock to the start of the batch's first
// interval with `tick`. A final tick closes everything that was buffered.
// `speed` > 0 paces batches at `speed` simulated seconds per wall second.
struct ReplayHooks {
  std::function<IngestSummary(std::string_view line)> ingest;
  std::function<size_t(int64_t now_ms)> tick;  // returns snapshots written
};
ReplayStats Replay(std::istream& in, int64_t interval_ms, const ReplayHooks& hooks,
                   double speed = 0);
ReplayStats ReplayInto(TelemetryService& service, std::istream& in, double speed = 0);

}  // namespace tracegrid
