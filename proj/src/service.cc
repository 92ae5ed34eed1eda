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

#include "tracegrid/service.h"

#include <algorithm>
#include <chrono>
#include <istream>
#include <limits>

#include "tracegrid/aggregation.h"
#include "tracegrid/error.h"

namespace tracegrid {

std::string_view ClockModeName(ClockMode mode) {
  return mode == ClockMode::kWall ? "wall" : "manual";
}

std::optional<ClockMode> ParseClockMode(std::string_view name) {
  if (name == "wall") return ClockMode::kWall;
  if (name == "manual") return ClockMode::kManual;
  return std::nullopt;
}

void ServiceConfig::Validate() const {
  if (base_interval_ms <= 0) throw Error(ErrorKind::kInvalidSpec, "interval must be positive");
  if (seal_delay_ms < 0) throw Error(ErrorKind::kInvalidSpec, "seal delay must be non-negative");
  if (listen_port < 0 || listen_port > 65535) {
    throw Error(ErrorKind::kInvalidSpec, "port out of range");
  }
  if (instance_tag_key.empty()) throw Error(ErrorKind::kInvalidSpec, "instance tag key is empty");
}

namespace {

int64_t FloorTo(int64_t t, int64_t step) {
  int64_t q = t / step;
  if (t % step != 0 && t < 0) --q;
  return q * step;
}

}  // namespace

TelemetryService::TelemetryService(ServiceConfig config, std::shared_ptr<BlobStore> blobs)
    : config_(std::move(config)) {
  config_.Validate();
  SnapshotStore::Options options;
  options.interval_length_ms = config_.base_interval_ms;
  store_ = std::make_unique<SnapshotStore>(std::move(blobs), options);
  parse_options_.instance_tag_key = config_.instance_tag_key;
  if (const auto last = store_->LastStart()) open_from_ = *last + config_.base_interval_ms;
}

TelemetryService::TelemetryService(ServiceConfig config)
    : TelemetryService(config, std::make_shared<FilesystemBlobStore>(config.data_dir)) {}

int64_t TelemetryService::IntervalOf(int64_t start_ms) const {
  return FloorTo(start_ms, config_.base_interval_ms);
}

IngestSummary TelemetryService::Ingest(std::string_view zipkin_json) {
  if (storage_failing_) {
    throw Error(ErrorKind::kStorageFailure, "storage is failing; retry later");
  }
  return IngestParsed(ParseZipkinSpans(zipkin_json, parse_options_));
}

IngestSummary TelemetryService::IngestParsed(ZipkinParseResult parsed) {
  if (storage_failing_) {
    throw Error(ErrorKind::kStorageFailure, "storage is failing; retry later");
  }
  IngestSummary summary;
  summary.skipped = parsed.skipped;

  std::lock_guard lock(mu_);
  for (auto& span : parsed.spans) {
    const int64_t interval = IntervalOf(span.start_time_ms());
    if (open_from_ && interval < *open_from_) {
      ++summary.dropped_late;
      continue;
    }
    buffers_[interval].push_back(std::move(span));
    ++summary.accepted;
  }
  totals_ += summary;
  return summary;
}

std::vector<IntervalSnapshot> TelemetryService::SealTick(int64_t now_ms) {
  std::lock_guard lock(mu_);
  std::vector<IntervalSnapshot> sealed;
  const int64_t len = config_.base_interval_ms;

  while (!buffers_.empty() && buffers_.begin()->first + len <= now_ms) {
    auto node = buffers_.begin();
    IntervalSnapshot snap = AggregateInterval(node->second, node->first, len);
    try {
      store_->Append(snap);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kStorageFailure) storage_failing_ = true;
      throw;
    }
    storage_failing_ = false;
    open_from_ = node->first + len;
    buffers_.erase(node);
    sealed.push_back(std::move(snap));
  }
  // Intervals that ended without receiving spans are closed as well.
  const int64_t closed_until = FloorTo(now_ms, len);
  if (!open_from_ || *open_from_ < closed_until) open_from_ = closed_until;
  return sealed;
}

HeatmapFrameSet TelemetryService::Heatmap(const QuerySpec& spec) const {
  if (spec.step_ms > 0 && spec.step_ms % config_.base_interval_ms != 0) {
    throw Error(ErrorKind::kInvalidSpec, "step: must be a multiple of the base interval (" +
                                             std::to_string(config_.base_interval_ms) + " ms)");
  }
  return BuildFrames(spec, *store_);
}

Catalog TelemetryService::CatalogFor(int64_t from, int64_t to) const {
  const auto snapshots = store_->LoadWindow(from, to);
  return BuildCatalog(snapshots);
}

IngestSummary TelemetryService::totals() const {
  std::lock_guard lock(mu_);
  return totals_;
}

std::optional<int64_t> TelemetryService::open_from() const {
  std::lock_guard lock(mu_);
  return open_from_;
}

size_t TelemetryService::buffered_spans() const {
  std::lock_guard lock(mu_);
  size_t n = 0;
  for (const auto& [interval, spans] : buffers_) n += spans.size();
  return n;
}

// ---------------------------------------------------------------------------

int64_t WallClockNowMs() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

WallClockSealer::WallClockSealer(TelemetryService& service, int64_t period_ms, ErrorHook on_error)
    : service_(service), period_ms_(period_ms), on_error_(std::move(on_error)) {
  thread_ = std::thread([this] { Run(); });
}

WallClockSealer::~WallClockSealer() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  cv_.notify_all();
  thread_.join();
}

void WallClockSealer::Run() {
  std::unique_lock lock(mu_);
  while (!stop_) {
    cv_.wait_for(lock, std::chrono::milliseconds(period_ms_), [this] { return stop_; });
    if (stop_) break;
    lock.unlock();
    try {
      service_.SealTick(WallClockNowMs() - service_.config().seal_delay_ms);
    } catch (const std::exception& e) {
      if (on_error_) on_error_(e);
    }
    lock.lock();
  }
}

// ---------------------------------------------------------------------------

ReplayStats Replay(std::istream& in, int64_t interval_ms, const ReplayHooks& hooks, double speed) {
  ReplayStats stats;
  std::optional<int64_t> last_batch_start;
  std::optional<int64_t> max_start;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

    const auto parsed = ParseZipkinSpans(line);
    std::optional<int64_t> batch_start;
    for (const auto& s : parsed.spans) {
      const int64_t t = s.start_time_ms();
      batch_start = batch_start ? std::min(*batch_start, t) : t;
      max_start = max_start ? std::max(*max_start, t) : t;
    }

    if (speed > 0 && batch_start && last_batch_start && *batch_start > *last_batch_start) {
      const double wall_ms = static_cast<double>(*batch_start - *last_batch_start) / speed;
      std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(wall_ms));
    }

    stats.ingest += hooks.ingest(line);
    ++stats.batches;
    if (batch_start) {
      stats.snapshots_written += hooks.tick(FloorTo(*batch_start, interval_ms));
      last_batch_start = batch_start;
    }
  }
  if (max_start) stats.snapshots_written += hooks.tick(FloorTo(*max_start, interval_ms) + interval_ms);
  return stats;
}

ReplayStats ReplayInto(TelemetryService& service, std::istream& in, double speed) {
  ReplayHooks hooks;
  hooks.ingest = [&](std::string_view line) { return service.Ingest(line); };
  hooks.tick = [&](int64_t now) { return service.SealTick(now).size(); };
  return Replay(in, service.config().base_interval_ms, hooks, speed);
}

}  // namespace tracegrid
